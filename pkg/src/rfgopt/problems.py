"""Objective zoo: conditioned synthetic least squares, two classic 2-D test
functions, and a small function-approximation task with an analytic
exact-gradient baseline."""

import math
from dataclasses import dataclass

import numpy as np

from . import forward_ad
from .mlp import MlpParameters, init_mlp, mlp_forward, mlp_jvp, mlp_loss, mlp_loss_gradient
from .objectives import ObjectiveFunction
from .quadratic import QuadraticProblem
from .distributions import stream

__all__ = [
    "make_gd_quadratic",
    "make_phb_quadratic",
    "rosenbrock",
    "ackley",
    "rosenbrock_objective",
    "ackley_objective",
    "fa_target",
    "FunctionFitProblem",
    "make_fa_problem",
    "make_mlp_regression_problem",
]


def make_gd_quadratic(d, target_cond_of_A=10.0, seed=0):
    """Square least-squares instance with cond(A) fixed exactly.

    M with N(0,1) entries is factored M = U S V^T and rebuilt with singular
    values linspace(1, cond), so cond(A^T A) = cond^2 regardless of d; b
    has N(5, 1) entries.  Deterministic per seed.
    """
    if d < 2:
        raise ValueError(f"dimension must be >= 2, got {d}")
    if not target_cond_of_A >= 1:
        raise ValueError(f"condition number must be >= 1, got {target_cond_of_A}")
    rng = stream(seed, "gd-quadratic")
    M = rng.normal(size=(d, d))
    U, _, Vt = np.linalg.svd(M)
    s_new = np.linspace(1.0, target_cond_of_A, d)
    A = (U * s_new) @ Vt
    b = rng.normal(loc=5.0, scale=1.0, size=d)
    return QuadraticProblem.from_data(A, b)


def make_phb_quadratic(d, seed=0):
    """Square instance A = U S with diagonal Gram matrix and cond(A) = 10.

    The first two singular values are 1 and 10, the rest Uniform(1, 10);
    because A = U S with orthogonal U, A^T A = S^2 is diagonal, which is
    the domain where the per-mode heavy-ball reduction is exact.
    """
    if d < 2:
        raise ValueError(f"dimension must be >= 2, got {d}")
    rng = stream(seed, "phb-quadratic")
    M = rng.normal(size=(d, d))
    U, _, _ = np.linalg.svd(M)
    s_new = np.empty(d)
    s_new[0], s_new[1] = 1.0, 10.0
    if d > 2:
        s_new[2:] = rng.uniform(1.0, 10.0, size=d - 2)
    A = U * s_new
    b = rng.normal(loc=5.0, scale=1.0, size=d)
    return QuadraticProblem.from_data(A, b)


def rosenbrock(x):
    """100 (x2 - x1^2)^2 + (x1 - 1)^2; zero exactly at (1, 1)."""
    x1, x2 = x[0], x[1]
    return 100.0 * (x2 - x1 ** 2) ** 2 + (x1 - 1) ** 2


def ackley(x, variant="standard"):
    """The 2-D Ackley function; zero exactly at (0, 0) in standard form.

    variant="as-printed" keeps an alternative with a positive exponent and
    no 1/2 averaging, which does not vanish at the origin and grows
    without bound; it exists only for side-by-side fidelity runs.
    """
    x1, x2 = x[0], x[1]
    if variant == "standard":
        radial = forward_ad.sqrt(0.5 * (x1 ** 2 + x2 ** 2))
        return (
            -20.0 * forward_ad.exp(-0.2 * radial)
            - forward_ad.exp(0.5 * (forward_ad.cos(2 * math.pi * x1) + forward_ad.cos(2 * math.pi * x2)))
            + math.e
            + 20.0
        )
    if variant == "as-printed":
        radial = forward_ad.sqrt(x1 ** 2 + x2 ** 2)
        return (
            -20.0 * forward_ad.exp(0.5 * radial)
            - forward_ad.exp(forward_ad.cos(2 * math.pi * x1) + forward_ad.cos(2 * math.pi * x2))
            + math.e
            + 20.0
        )
    raise ValueError(f"unknown ackley variant {variant!r}")


def _dual_objective(fn, dimension, minimizer, name):
    def evaluate(x):
        return float(fn(np.asarray(x, dtype=float)))

    def jvp_hook(x, v):
        return forward_ad.jvp(fn, x, v)

    return ObjectiveFunction(
        dimension=dimension,
        evaluate=evaluate,
        jvp_hook=jvp_hook,
        minimizer=np.asarray(minimizer, dtype=float),
        name=name,
    )


def rosenbrock_objective():
    return _dual_objective(rosenbrock, 2, (1.0, 1.0), "rosenbrock")


def ackley_objective(variant="standard"):
    minimizer = (0.0, 0.0) if variant == "standard" else None
    obj = _dual_objective(lambda x: ackley(x, variant=variant), 2, (0.0, 0.0), "ackley")
    if variant != "standard":
        obj.minimizer = None
        obj.name = "ackley-as-printed"
    return obj


def fa_target(x):
    """Target curve sin(2 pi x) exp(-x^2) for the fitting task."""
    x = np.asarray(x, dtype=float)
    return np.sin(2.0 * math.pi * x) * np.exp(-(x ** 2))


@dataclass
class FunctionFitProblem:
    """A network-fitting objective over flattened parameters."""

    objective: ObjectiveFunction
    inputs: np.ndarray
    targets: np.ndarray
    template: MlpParameters

    def predict(self, theta, xs):
        params = self.template.with_flat(theta)
        return mlp_forward(params, np.asarray(xs, dtype=float)).ravel()


def make_mlp_regression_problem(inputs, targets, layer_sizes, seed=0, activation="tanh"):
    """Mean-squared-error fit of an MLP, parameterized by the flat vector.

    The objective exposes the forward-mode jvp hook (one tangent per
    parameter tensor) and the analytic hand-written gradient of this fixed
    architecture as the exact-gradient baseline.
    """
    inputs = np.asarray(inputs, dtype=float)
    targets = np.asarray(targets, dtype=float)
    template = init_mlp(layer_sizes, stream(seed, "mlp-init"), activation=activation)
    theta0 = template.flatten()

    def evaluate(theta):
        return mlp_loss(template.with_flat(theta), inputs, targets)

    def jvp_hook(theta, v):
        params = template.with_flat(theta)
        seed_params = template.with_flat(v)
        return mlp_jvp(params, inputs, targets, seed_params)

    def gradient(theta):
        return mlp_loss_gradient(template.with_flat(theta), inputs, targets).flatten()

    objective = ObjectiveFunction(
        dimension=theta0.size,
        evaluate=evaluate,
        jvp_hook=jvp_hook,
        exact_gradient=gradient,
        initial_point=theta0,
        name="mlp-regression",
    )
    return FunctionFitProblem(objective=objective, inputs=inputs, targets=targets, template=template)


def make_fa_problem(m=100, width=40, seed=0, interval=(-2.0, 2.0)):
    """The function-approximation task: width-40 tanh net, one hidden layer.

    Sample points are uniform on ``interval`` (fixed per seed); targets
    come from :func:`fa_target`.
    """
    if m < 1:
        raise ValueError(f"need at least one sample, got {m}")
    rng = stream(seed, "fa-data")
    xs = rng.uniform(interval[0], interval[1], size=m)
    ys = fa_target(xs)
    return make_mlp_regression_problem(xs, ys, layer_sizes=(1, width, 1), seed=seed)
