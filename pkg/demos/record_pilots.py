"""Regenerate the pilot numbers behind src/rfgopt/pilots.py.

Runs the committed pilot seeds (100..104) for the test-function and
function-approximation tasks and prints the endpoints the thresholds were
derived from.  Run this after changing schedules, generators or defaults,
then update pilots.py by hand with fresh margins.
"""

import numpy as np

from rfgopt.experiments import run_fa_experiment, run_test_function_experiment
from rfgopt.pilots import ACKLEY_ITERS, FA_ETA, FA_ITERS, ROSENBROCK_ITERS

SEEDS = range(100, 105)

print(f"rosenbrock ({ROSENBROCK_ITERS} iters, default schedule):")
for seed in SEEDS:
    c = run_test_function_experiment("rosenbrock", "bernoulli", "optimal", 1e-6, 1,
                                     ROSENBROCK_ITERS, seed)
    final = c.mean[-1] if c.mean.size else float("nan")
    print(f"  seed {seed}: final {final:.5g}  diverged {c.n_diverged}")

print(f"ackley ({ACKLEY_ITERS} iters, constant 2.4e-3):")
for seed in SEEDS:
    c = run_test_function_experiment("ackley", "bernoulli", "optimal", 1e-6, 1,
                                     ACKLEY_ITERS, seed)
    final = c.mean[-1] if c.mean.size else float("nan")
    print(f"  seed {seed}: final {final:.5g}  diverged {c.n_diverged}")

print(f"function approximation (eta {FA_ETA}, {FA_ITERS} iters):")
for seed in SEEDS:
    r = run_fa_experiment(100, 40, FA_ETA, FA_ITERS, seed)
    valid = r.rfg_loss[np.isfinite(r.rfg_loss)]
    print(f"  seed {seed}: initial {r.rfg_loss[0]:.5g} final {valid[-1]:.5g} "
          f"reduction {r.rfg_loss[0] / valid[-1]:.1f}x diverged {r.rfg_diverged}")
