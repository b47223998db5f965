"""Descent and heavy-ball loops driven by the randomized forward gradient.

One fresh direction vector is drawn per step and used for both the inner
product and the update direction.  Runs are deterministic given their
generator; independent runs take independent streams (see
``distributions.stream``) so they can execute concurrently and aggregate
order-independently.
"""

import math
from dataclasses import dataclass

import numpy as np

from .distributions import sample_vector
from .estimator import rfg

__all__ = [
    "LRSchedule",
    "GDState",
    "PHBState",
    "RunResult",
    "gd_step",
    "phb_step",
    "run",
    "DIVERGENCE_THRESHOLD",
]

DIVERGENCE_THRESHOLD = 1e12


@dataclass(frozen=True)
class LRSchedule:
    """Constant or staircase-exponential learning rate.

    The staircase value at step k is base * decay_rate ** floor(k / decay_step).
    """

    kind: str = "constant"
    base: float = 1e-2
    decay_rate: float = 1.0
    decay_step: int = 1

    def __post_init__(self):
        if self.kind not in ("constant", "staircase"):
            raise ValueError(f"schedule kind must be 'constant' or 'staircase', got {self.kind!r}")
        if not self.base > 0:
            raise ValueError(f"base rate must be positive, got {self.base}")
        if not 0 < self.decay_rate <= 1:
            raise ValueError(f"decay rate must lie in (0, 1], got {self.decay_rate}")
        if self.decay_step < 1:
            raise ValueError(f"decay step must be >= 1, got {self.decay_step}")

    @classmethod
    def constant(cls, base):
        return cls(kind="constant", base=base)

    @classmethod
    def staircase(cls, base, decay_rate, decay_step):
        return cls(kind="staircase", base=base, decay_rate=decay_rate, decay_step=decay_step)

    def value(self, k):
        if self.kind == "constant":
            return self.base
        return self.base * self.decay_rate ** (k // self.decay_step)


@dataclass
class GDState:
    x: np.ndarray
    k: int = 0


@dataclass
class PHBState:
    x: np.ndarray
    x_prev: np.ndarray
    k: int = 0


def gd_step(state, f, cfg, eta, rng):
    """x <- x - eta * (directional derivative along z) * z, fresh z."""
    if eta < 0:
        raise ValueError(f"learning rate must be >= 0, got {eta}")
    z = sample_vector(cfg.distribution, state.x.size, rng)
    g = rfg(f, state.x, z, cfg.h)
    return GDState(x=state.x - eta * g, k=state.k + 1)


def phb_step(state, f, cfg, eta, mu, rng):
    """Heavy-ball update x <- x - eta * estimate + mu * (x - x_prev)."""
    if eta < 0:
        raise ValueError(f"learning rate must be >= 0, got {eta}")
    z = sample_vector(cfg.distribution, state.x.size, rng)
    g = rfg(f, state.x, z, cfg.h)
    x_new = state.x - eta * g + mu * (state.x - state.x_prev)
    return PHBState(x=x_new, x_prev=state.x, k=state.k + 1)


@dataclass
class RunResult:
    """Per-iteration trajectory of one seeded run.

    ``ks`` are strictly increasing post-step indices starting at 1; rows
    are complete unless the run diverged or hit ``stop_tol`` early.
    ``squared_errors`` is ||x_k - x_star||^2 (nan when no minimizer is
    known); ``objectives`` is f(x_k) when recorded (nan otherwise).
    """

    ks: np.ndarray
    squared_errors: np.ndarray
    objectives: np.ndarray
    initial_squared_error: float
    initial_objective: float
    diverged: bool
    stopped_early: bool
    final_x: np.ndarray


def run(
    optimizer,
    f,
    cfg,
    schedule,
    x0,
    rng,
    max_iters,
    mu=0.0,
    x_minus1=None,
    target=None,
    stop_tol=None,
    record_objective=True,
):
    """Drive one seeded optimization run and record its trajectory.

    ``optimizer`` is "gd" or "phb"; "phb" starts from x_prev = x_minus1
    (default: x0, making the first step a plain descent step).  ``target``
    is the known minimizer for error tracking.  The run aborts, flagged
    diverged, when the tracked quantity (squared error when the target is
    known, else the objective) exceeds ``DIVERGENCE_THRESHOLD`` or turns
    non-finite; the last finite iterate is kept.
    """
    if optimizer not in ("gd", "phb"):
        raise ValueError(f"optimizer must be 'gd' or 'phb', got {optimizer!r}")
    if max_iters < 1:
        raise ValueError(f"max_iters must be >= 1, got {max_iters}")
    x0 = np.asarray(x0, dtype=float)
    if target is not None:
        target = np.asarray(target, dtype=float)

    def sq_err(x):
        if target is None:
            return math.nan
        diff = x - target
        return float(diff @ diff)

    def objective(x):
        return float(f.evaluate(x) if hasattr(f, "evaluate") else f(x))

    if optimizer == "phb":
        prev = x0 if x_minus1 is None else np.asarray(x_minus1, dtype=float)
        state = PHBState(x=x0.copy(), x_prev=prev.copy(), k=0)
    else:
        state = GDState(x=x0.copy(), k=0)

    ks, errs, objs = [], [], []
    init_err = sq_err(x0)
    init_obj = objective(x0) if record_objective else math.nan
    diverged = False
    stopped_early = False
    last_x = x0.copy()
    for _ in range(max_iters):
        eta = schedule.value(state.k)
        if optimizer == "phb":
            state = phb_step(state, f, cfg, eta, mu, rng)
        else:
            state = gd_step(state, f, cfg, eta, rng)
        err = sq_err(state.x)
        obj = objective(state.x) if record_objective else math.nan
        tracked = err if target is not None else obj
        if record_objective or target is not None:
            if not math.isfinite(tracked) or abs(tracked) > DIVERGENCE_THRESHOLD:
                diverged = True
                break
        ks.append(state.k)
        errs.append(err)
        objs.append(obj)
        last_x = state.x
        if stop_tol is not None and target is not None and err <= stop_tol:
            stopped_early = True
            break
    return RunResult(
        ks=np.asarray(ks, dtype=int),
        squared_errors=np.asarray(errs, dtype=float),
        objectives=np.asarray(objs, dtype=float),
        initial_squared_error=init_err,
        initial_objective=init_obj,
        diverged=diverged,
        stopped_early=stopped_early,
        final_x=last_x,
    )
