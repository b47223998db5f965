import math

import numpy as np
import pytest

from rfgopt.forward_ad import (
    DomainError,
    DualScalar,
    dual_apply,
    jvp,
)


def test_linear_function_through_duals():
    # f(x) = 5x + 3 at x = 4 seeded with 1: value 23, derivative 5
    y = dual_apply("mul", DualScalar(5, 0), DualScalar(4, 1))
    assert (y.primal, y.tangent) == (20.0, 5.0)
    y = dual_apply("add", y, DualScalar(3, 0))
    assert (y.primal, y.tangent) == (23.0, 5.0)


def test_add_zero_is_identity():
    y = dual_apply("add", DualScalar(2.5, -1.25), DualScalar(0, 0))
    assert (y.primal, y.tangent) == (2.5, -1.25)


def test_tanh_at_zero_passes_tangent():
    y = dual_apply("tanh", DualScalar(0.0, 3.0))
    assert (y.primal, y.tangent) == (0.0, 3.0)


def test_product_rule_exact():
    a, b, c, d = 1.7, -0.3, 2.2, 0.9
    y = DualScalar(a, b) * DualScalar(c, d)
    assert y.primal == a * c
    assert y.tangent == a * d + b * c


def test_division_by_zero_primal_names_op():
    with pytest.raises(DomainError, match="div"):
        dual_apply("div", DualScalar(1, 0), DualScalar(0, 1))


def test_sqrt_of_negative_primal_names_op():
    with pytest.raises(DomainError, match="sqrt"):
        dual_apply("sqrt", DualScalar(-1.0, 1.0))


def test_unknown_op_rejected():
    with pytest.raises(ValueError, match="unknown elementary"):
        dual_apply("log", DualScalar(1.0, 0.0))


def test_abs_subgradient_zero_at_kink():
    assert abs(DualScalar(0.0, 5.0)).tangent == 0.0
    assert abs(DualScalar(-2.0, 3.0)).tangent == -3.0
    assert abs(DualScalar(2.0, 3.0)).tangent == 3.0


@pytest.mark.parametrize(
    "op,args,deriv",
    [
        ("exp", (0.3,), math.exp(0.3)),
        ("sin", (0.7,), math.cos(0.7)),
        ("cos", (0.7,), -math.sin(0.7)),
        ("sqrt", (1.9,), 0.5 / math.sqrt(1.9)),
        ("tanh", (0.4,), 1.0 - math.tanh(0.4) ** 2),
    ],
)
def test_unary_tangent_rules(op, args, deriv):
    y = dual_apply(op, DualScalar(args[0], 1.0))
    assert y.tangent == pytest.approx(deriv, rel=1e-14)


def test_integer_power_rule():
    y = DualScalar(1.5, 2.0) ** 3
    assert y.primal == pytest.approx(1.5 ** 3)
    assert y.tangent == pytest.approx(3 * 1.5 ** 2 * 2.0)
    assert (DualScalar(2.0, 1.0) ** 0).tangent == 0.0


def test_jvp_scaled_norm_example():
    te = jvp(lambda x: 0.5 * np.sum((2 * x) ** 2), [0.0, 4.0, 6.0], [1.0, 1.0, 1.0])
    assert te.value == pytest.approx(104.0, rel=1e-12)
    assert te.directional_derivative == pytest.approx(40.0, rel=1e-12)


def test_jvp_zero_seed():
    te = jvp(lambda x: np.sum(np.exp(x)), [0.1, -0.2], [0.0, 0.0])
    assert te.directional_derivative == 0.0


def test_jvp_unit_seed_reads_gradient_component():
    # f = 0.5||x||^2 has gradient x; seeding e3 reads the third component
    te = jvp(lambda x: 0.5 * np.sum(x ** 2), [0.0, 1.0, 2.0], [0.0, 0.0, 1.0])
    assert te.value == pytest.approx(2.5, rel=1e-12)
    assert te.directional_derivative == pytest.approx(2.0, rel=1e-12)


def test_jvp_dimension_mismatch():
    with pytest.raises(ValueError, match="seed shape"):
        jvp(lambda x: np.sum(x), [1.0, 2.0], [1.0])


def _random_polynomial(rng, d, n_terms=6, max_deg=3):
    coeffs = rng.normal(size=n_terms)
    powers = rng.integers(0, max_deg + 1, size=(n_terms, d))

    def poly(x):
        total = 0.0
        for c, p in zip(coeffs, powers):
            term = c
            for i in range(d):
                term = term * x[i] ** int(p[i])
            total = total + term
        return total

    def grad(x):
        g = np.zeros(d)
        for c, p in zip(coeffs, powers):
            for i in range(d):
                if p[i] == 0:
                    continue
                term = c * p[i] * x[i] ** (int(p[i]) - 1)
                for j in range(d):
                    if j != i:
                        term *= x[j] ** int(p[j])
                g[i] += term
        return g

    return poly, grad


def test_polynomial_directional_derivatives_match_analytic():
    rng = np.random.default_rng(7)
    for _ in range(25):
        d = int(rng.integers(2, 5))
        poly, grad = _random_polynomial(rng, d)
        x = rng.normal(size=d)
        v = rng.normal(size=d)
        te = jvp(poly, x, v)
        expected = float(grad(x) @ v)
        assert te.value == pytest.approx(poly(x), rel=1e-12)
        assert te.directional_derivative == pytest.approx(expected, rel=1e-12, abs=1e-12)


def test_jvp_linear_in_seed():
    rng = np.random.default_rng(11)
    f = lambda x: np.sum(np.sin(x) * np.exp(0.1 * x)) + x[0] * x[1]
    x = rng.normal(size=3)
    v = rng.normal(size=3)
    w = rng.normal(size=3)
    a, b = 1.7, -0.4
    lhs = jvp(f, x, a * v + b * w).directional_derivative
    rhs = a * jvp(f, x, v).directional_derivative + b * jvp(f, x, w).directional_derivative
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_chain_rule_composition():
    rng = np.random.default_rng(13)
    g = lambda x: np.sum(x ** 2) + np.sum(np.cos(x))  # scalar inner function
    f = lambda u: u[0] ** 3 + np.exp(-u[0])
    x = rng.normal(size=4)
    v = rng.normal(size=4)
    inner = jvp(g, x, v)
    outer = jvp(f, [inner.value], [inner.directional_derivative])
    composed = jvp(lambda x: f([g(x)]), x, v)
    assert composed.value == pytest.approx(outer.value, rel=1e-12)
    assert composed.directional_derivative == pytest.approx(
        outer.directional_derivative, rel=1e-12
    )


def test_nonfinite_result_warns():
    with pytest.warns(RuntimeWarning):
        jvp(lambda x: np.exp(x[0]), [1000.0], [1.0])
