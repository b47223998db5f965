"""The randomized forward-mode gradient estimator.

For a direction z, the directional derivative is either the exact forward
pass value grad f(x)^T z (h = 0) or the forward difference
(f(x + h z) - f(x)) / h (h > 0, evaluation only), and the gradient
estimate is that scalar times z.  The estimator never normalizes z; all
variance control lives in the sampling law.
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import forward_ad
from .distributions import DistributionSpec

__all__ = ["RFGConfig", "directional_derivative", "rfg"]

DEFAULT_H = 1e-6


@dataclass(frozen=True)
class RFGConfig:
    """Forward-difference step (0 = exact) plus the direction sampling law."""

    h: float = DEFAULT_H
    distribution: DistributionSpec = field(default_factory=lambda: DistributionSpec("bernoulli", 1.0))

    def __post_init__(self):
        if self.h < 0:
            raise ValueError(f"forward-difference step must be >= 0, got {self.h}")


def _evaluate(f, x):
    return float(f.evaluate(x) if hasattr(f, "evaluate") else f(x))


def directional_derivative(f, x, z, h):
    """grad f(x)^T z exactly (h=0) or by forward difference (h>0).

    At h = 0 the objective must expose a differentiation path: an
    ``ObjectiveFunction`` with a jvp hook, or a callable evaluable on dual
    scalars.  Non-finite values propagate with a RuntimeWarning.
    """
    if h < 0:
        raise ValueError(f"forward-difference step must be >= 0, got {h}")
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    if x.shape != z.shape:
        raise ValueError(f"direction shape {z.shape} does not match point shape {x.shape}")
    if h == 0:
        hook = getattr(f, "jvp_hook", None)
        if hook is not None:
            return float(hook(x, z).directional_derivative)
        target = f.evaluate if hasattr(f, "evaluate") else f
        return forward_ad.jvp(target, x, z).directional_derivative
    base = _evaluate(f, x)
    shifted = _evaluate(f, x + h * z)
    dd = (shifted - base) / h
    if not math.isfinite(dd):
        warnings.warn("forward difference produced a non-finite value", RuntimeWarning, stacklevel=2)
    return dd


def rfg(f, x, z, h):
    """The gradient estimate: directional_derivative(f, x, z, h) * z."""
    z = np.asarray(z, dtype=float)
    return directional_derivative(f, x, z, h) * z
