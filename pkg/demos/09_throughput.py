"""Iterations per second: estimator steps vs analytic-gradient steps.

One estimator step needs a single paired primal/tangent forward pass; the
baseline needs a forward plus a hand-written backward pass.  Numbers are
hardware-dependent and informational only.

Writes demos/out/throughput.csv (schema bench-v1).
"""

import os

from rfgopt.experiments import run_benchmark, write_csv

OUT = os.path.join(os.path.dirname(__file__), "out")
os.makedirs(OUT, exist_ok=True)

rows = run_benchmark([100, 200, 300], [4], iters=100, master_seed=0)
print(f"{'N':>4} {'L':>3} {'baseline it/s':>14} {'estimator it/s':>15} {'delta%':>8}")
for r in rows:
    print(f"{r.width:>4} {r.depth:>3} {r.baseline_iters_per_sec:>14.1f} "
          f"{r.rfg_iters_per_sec:>15.1f} {r.delta_pct:>+8.1f}")

write_csv(os.path.join(OUT, "throughput.csv"), "bench-v1",
          ["N", "L", "baseline_iters_per_sec", "rfg_iters_per_sec", "delta_pct"],
          [[r.width, r.depth, r.baseline_iters_per_sec, r.rfg_iters_per_sec, r.delta_pct]
           for r in rows])
print(f"table written to {OUT}/throughput.csv")
