"""Hyperparameter value map for heavy ball via the per-mode recursion.

When A^T A is diagonal the 2d x 2d moment map splits into d independent
2x2 blocks, so evaluating the k-fold map at the identity costs O(d) per
(momentum, rate) cell.  The resulting value map over the full 199 x 301
grid locates the fastest-converging pair; the full-size run (d=30,
k=10^4, as in the batch command) takes minutes, so this demo uses a
smaller instance.

Writes demos/out/phb_grid.csv (schema phb-grid-v1).
"""

import os

import numpy as np

from rfgopt import DistributionSpec, default_grid, grid_search, make_phb_quadratic
from rfgopt.experiments import write_csv

OUT = os.path.join(os.path.dirname(__file__), "out")
os.makedirs(OUT, exist_ok=True)

p = make_phb_quadratic(5, seed=2024)
spec = DistributionSpec("bernoulli", 1.0)
mus, etas = default_grid()
print(f"grid: {mus.size} momentum values x {etas.size} rates = {mus.size * etas.size} cells")

result = grid_search(p, spec, mus, etas, k_target=1000)
print(f"best pair: mu* = {result.mu_star:+.2f}, eta* = {result.eta_star:.4g}")
finite = np.isfinite(result.values)
print(f"divergent cells: {(~finite).sum()} of {result.values.size}")

rows = []
for i, mu in enumerate(result.mus):
    for j, eta in enumerate(result.etas):
        rows.append([mu, eta, result.values[i, j]])
write_csv(os.path.join(OUT, "phb_grid.csv"), "phb-grid-v1",
          ["mu", "eta", "max_eigenvalue"], rows)
print(f"value map written to {OUT}/phb_grid.csv")
