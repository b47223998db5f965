"""Objective-function container shared by the estimator and the optimizers."""

from dataclasses import dataclass

import numpy as np

__all__ = ["ObjectiveFunction"]


@dataclass
class ObjectiveFunction:
    """A scalar objective with optional differentiation hooks.

    ``jvp_hook(x, v)`` returns a TangentEvaluation with the exact
    directional derivative; ``exact_gradient(x)`` returns grad f(x).  When
    both exist they must agree (jvp derivative equals <exact_gradient, v>).
    ``minimizer`` is the known argmin when there is one.
    """

    dimension: int
    evaluate: callable
    jvp_hook: callable = None
    exact_gradient: callable = None
    minimizer: np.ndarray = None
    initial_point: np.ndarray = None
    name: str = ""

    def __call__(self, x):
        return self.evaluate(x)
