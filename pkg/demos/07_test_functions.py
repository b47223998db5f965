"""Five direction laws race on the Rosenbrock and Ackley test functions.

Both start at (0.5, 0.5) with the variance set to its optimal value per
law.  Rosenbrock uses the staircase schedule (initial 1e-3, decay 0.1
every 25 steps; see experiments.TESTFN_SCHEDULES for why 1e-1 is not
usable); Ackley uses a constant 2.4e-3.  Divergent runs are excluded from
the mean but counted.

Writes demos/out/testfn_<function>_<law>.csv (schema testfn-v1).
"""

import os

from rfgopt import KINDS
from rfgopt.experiments import run_test_function_experiment, write_csv
from rfgopt.pilots import ACKLEY_ITERS, ROSENBROCK_ITERS

OUT = os.path.join(os.path.dirname(__file__), "out")
os.makedirs(OUT, exist_ok=True)

for name, iters in (("rosenbrock", ROSENBROCK_ITERS), ("ackley", ACKLEY_ITERS)):
    print(f"{name} ({iters} iterations, 5 seeds):")
    for kind in KINDS:
        curve = run_test_function_experiment(name, kind, "optimal", 1e-6, 5, iters, 2024)
        final = curve.mean[-1] if curve.mean.size else float("nan")
        print(f"  {kind:<10} final mean objective {final:.4g}   diverged {curve.n_diverged}/5")
        rows = [
            [int(k), curve.mean[i] if curve.mean.size else float("nan"),
             curve.std[i] if curve.std.size else float("nan"), curve.overlay[i],
             curve.n_runs - curve.n_diverged, curve.n_diverged]
            for i, k in enumerate(curve.ks)
        ]
        write_csv(os.path.join(OUT, f"testfn_{name}_{kind}.csv"), "testfn-v1",
                  ["k", "mean_objective", "std_objective", "overlay", "runs", "diverged"],
                  rows)
print(f"\ncurves written to {OUT}/testfn_<function>_<law>.csv")
