"""Monte-Carlo verification of the closed-form moment identities.

Every analytic moment the toolkit relies on is checked against a seeded
sample mean with a 3-standard-error acceptance band (one-sided for
bounds).  The heavy-tailed sixth-moment cases use a larger sample because
the variance of their estimator is driven by twelfth moments.  The
analytic kurtosis/sixth-moment values come from the distributions module,
so the oracle and the closed forms share one source of truth.
"""

import math
from dataclasses import dataclass

import numpy as np

from .distributions import (
    KINDS,
    DistributionSpec,
    kurtosis,
    optimal_variance,
    sample_matrix,
    stream,
)
from .quadratic import QuadraticProblem, exact_gradient, f_variance_factor

__all__ = [
    "MomentCheckReport",
    "check_weighted_inner_product",
    "check_paired_inner_products",
    "check_quartic_map_norm",
    "check_weighted_outer_product",
    "check_moment_identities",
    "check_second_moment",
    "check_relative_error",
    "expected_relative_squared_error",
    "estimate_norm_moments",
    "run_verification_suite",
]

_CHUNK = 500_000


@dataclass
class MomentCheckReport:
    """One identity checked: analytic value vs Monte-Carlo estimate.

    ``passed`` is |estimate - analytic| <= 3 SE for equalities and
    estimate <= analytic + 3 SE for bounds (``is_bound``).  For
    matrix-valued identities the reported numbers belong to the
    max-deviation entry (named in ``detail``) and ``passed`` covers every
    entry.
    """

    name: str
    analytic: float
    estimate: float
    se: float
    n_samples: int
    passed: bool
    is_bound: bool = False
    detail: str = ""

    def __str__(self):
        tag = "bound" if self.is_bound else "equality"
        status = "pass" if self.passed else "FAIL"
        return (
            f"[{status}] {self.name} ({tag}, n={self.n_samples}): "
            f"analytic={self.analytic:.6g} estimate={self.estimate:.6g} se={self.se:.3g}"
            + (f" [{self.detail}]" if self.detail else "")
        )


class _ScalarAccumulator:
    def __init__(self):
        self.n = 0
        self.total = 0.0
        self.total_sq = 0.0

    def add(self, samples):
        self.n += samples.size
        self.total += float(samples.sum())
        self.total_sq += float((samples * samples).sum())

    def mean_se(self):
        mean = self.total / self.n
        var = max(self.total_sq / self.n - mean * mean, 0.0)
        return mean, math.sqrt(var / self.n)


def _mc_scalar(spec, d, n, rng, sample_fn):
    acc = _ScalarAccumulator()
    remaining = int(n)
    while remaining > 0:
        batch = min(remaining, _CHUNK)
        z = sample_matrix(spec, batch, d, rng)
        acc.add(sample_fn(z))
        remaining -= batch
    return acc.mean_se()


def _scalar_report(name, analytic, estimate, se, n, is_bound=False, detail=""):
    if is_bound:
        passed = estimate <= analytic + 3.0 * se
    else:
        passed = abs(estimate - analytic) <= 3.0 * se
    return MomentCheckReport(
        name=name, analytic=float(analytic), estimate=float(estimate), se=float(se),
        n_samples=int(n), passed=bool(passed), is_bound=is_bound, detail=detail,
    )


def check_weighted_inner_product(spec, d, a, n_samples, rng):
    """E[<a,z>^2 ||z||^2] = sigma^4 (kurtosis + d - 1) ||a||^2."""
    a = np.asarray(a, dtype=float)
    analytic = spec.variance ** 2 * (spec.kappa4 + d - 1.0) * float(a @ a)
    est, se = _mc_scalar(spec, d, n_samples, rng, lambda z: (z @ a) ** 2 * np.sum(z * z, axis=1))
    return _scalar_report("weighted-inner-product", analytic, est, se, n_samples)


def check_paired_inner_products(spec, d, a, b, n_samples, rng):
    """E[<a,z>^2 <b,z>^2 ||z||^2] via alpha/beta coefficients.

    alpha = kappa6 + (d-1) kappa4 weights sum_i a_i^2 b_i^2;
    beta = d - 2 + 2 kappa4 weights sum_{i!=j} (a_i^2 b_j^2 + 2 a_i b_i a_j b_j).
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    alpha = spec.kappa6 + (d - 1.0) * spec.kappa4
    beta = d - 2.0 + 2.0 * spec.kappa4
    same = float(np.sum(a * a * b * b))
    cross = float(a @ a) * float(b @ b) - same
    paired = float(a @ b) ** 2 - same
    analytic = spec.variance ** 3 * (alpha * same + beta * (cross + 2.0 * paired))
    est, se = _mc_scalar(
        spec, d, n_samples, rng,
        lambda z: (z @ a) ** 2 * (z @ b) ** 2 * np.sum(z * z, axis=1),
    )
    return _scalar_report("paired-inner-products", analytic, est, se, n_samples)


def check_quartic_map_norm(spec, d, A, n_samples, rng):
    """E[||Az||^4 ||z||^2] = sigma^6 F(d, kappa4, kappa6, A)."""
    A = np.asarray(A, dtype=float)
    analytic = spec.variance ** 3 * f_variance_factor(d, spec.kappa4, spec.kappa6, A)
    est, se = _mc_scalar(
        spec, d, n_samples, rng,
        lambda z: np.sum((z @ A.T) ** 2, axis=1) ** 2 * np.sum(z * z, axis=1),
    )
    return _scalar_report("quartic-map-norm", analytic, est, se, n_samples)


def check_weighted_outer_product(spec, d, b_diag, U, n_samples, rng):
    """E[z ||B U^T z||^2 z^T], checked entrywise.

    With C = U B^2 U^T the expectation is sigma^4 (tr(B^2) I
    + 2 offdiag(C) + (kurtosis - 1) Diag(C)); the off-diagonal part
    vanishes exactly when C is diagonal (e.g. U = I).
    """
    b_diag = np.asarray(b_diag, dtype=float)
    U = np.asarray(U, dtype=float)
    if not np.allclose(U @ U.T, np.eye(d), atol=1e-10):
        raise ValueError("U must be orthogonal")
    C = (U * b_diag[None, :] ** 2) @ U.T
    analytic = spec.variance ** 2 * (
        float(np.sum(b_diag ** 2)) * np.eye(d)
        + 2.0 * (C - np.diag(np.diag(C)))
        + (spec.kappa4 - 1.0) * np.diag(np.diag(C))
    )
    total = np.zeros((d, d))
    total_sq = np.zeros((d, d))
    remaining = int(n_samples)
    while remaining > 0:
        batch = min(remaining, _CHUNK)
        z = sample_matrix(spec, batch, d, rng)
        w = ((z @ U) ** 2) @ (b_diag ** 2)
        total += np.einsum("ni,nj,n->ij", z, z, w)
        total_sq += np.einsum("ni,nj,n->ij", z * z, z * z, w * w)
        remaining -= batch
    n = int(n_samples)
    mean = total / n
    var = np.maximum(total_sq / n - mean * mean, 0.0)
    se = np.sqrt(var / n)
    dev = np.abs(mean - analytic)
    ok = dev <= 3.0 * se
    worst = np.unravel_index(int(np.argmax(np.where(se > 0, dev / np.maximum(se, 1e-300), dev))), dev.shape)
    worst = (int(worst[0]), int(worst[1]))
    return MomentCheckReport(
        name="weighted-outer-product",
        analytic=float(analytic[worst]),
        estimate=float(mean[worst]),
        se=float(se[worst]),
        n_samples=n,
        passed=bool(ok.all()),
        detail=f"max-deviation entry {worst}",
    )


def check_moment_identities(spec, d, a, b, A, b_diag, U, n_samples, rng, n_heavy=None):
    """All four direction-moment identities for one spec and dimension.

    ``n_heavy`` (default ``n_samples``) applies to the two sixth-moment
    identities; pass a larger value for the heavy-tailed laws.
    """
    n_heavy = n_samples if n_heavy is None else n_heavy
    return [
        check_weighted_inner_product(spec, d, a, n_samples, rng),
        check_paired_inner_products(spec, d, a, b, n_heavy, rng),
        check_quartic_map_norm(spec, d, A, n_heavy, rng),
        check_weighted_outer_product(spec, d, b_diag, U, n_samples, rng),
    ]


_NORM_MOMENT_CACHE = {}


def estimate_norm_moments(spec, d, n_samples=100_000, seed=0):
    """Monte-Carlo (E||z||^3, SE, E||z||^5, SE); cached per arguments."""
    if n_samples < 10_000:
        raise ValueError("norm-moment estimates need at least 1e4 samples")
    key = (spec.kind, spec.variance, d, int(n_samples), seed)
    if key not in _NORM_MOMENT_CACHE:
        rng = stream(seed, "norm-moments", spec.kind, d)
        acc3, acc5 = _ScalarAccumulator(), _ScalarAccumulator()
        remaining = int(n_samples)
        while remaining > 0:
            batch = min(remaining, _CHUNK)
            z = sample_matrix(spec, batch, d, rng)
            norms = np.sqrt(np.sum(z * z, axis=1))
            acc3.add(norms ** 3)
            acc5.add(norms ** 5)
            remaining -= batch
        m3, se3 = acc3.mean_se()
        m5, se5 = acc5.mean_se()
        _NORM_MOMENT_CACHE[key] = (m3, se3, m5, se5)
    return _NORM_MOMENT_CACHE[key]


def _quadratic_error_samples(p, x, spec, h, n_samples, rng, relative):
    """Chunked samples of ||estimate - grad f||^2 (optionally relative)."""
    g = exact_gradient(p, x)
    g_sq = float(g @ g)
    acc = _ScalarAccumulator()
    remaining = int(n_samples)
    while remaining > 0:
        batch = min(remaining, _CHUNK)
        z = sample_matrix(spec, batch, p.dim, rng)
        dd = z @ g
        if h > 0:
            dd = dd + 0.5 * h * np.sum((z @ p.A.T) ** 2, axis=1)
        err = dd ** 2 * np.sum(z * z, axis=1) - 2.0 * dd * (z @ g) + g_sq
        if relative:
            err = err / g_sq
        acc.add(err)
        remaining -= batch
    return acc.mean_se(), g_sq


def check_second_moment(p, x, spec, h, n_samples, seed=0, rng=None):
    """Expected squared error of the estimate against the closed form.

    h = 0: equality E||est - grad f||^2 = ((d + kurtosis - 1) sigma^4
    - 2 sigma^2 + 1) ||grad f||^2.  h > 0: one-sided smoothness bound with
    L = lambda_max(A^T A):
    (h^2 L^2 / 2) sigma^6 (kappa6 + (d - 2 + 3 kappa4)(d - 1)) d
    + h L ||grad f|| E[||z||^5 + ||z||^3] + the h = 0 constant.
    """
    rng = stream(seed, "second-moment", spec.kind) if rng is None else rng
    d = p.dim
    k4 = spec.kappa4
    s2 = spec.variance
    base = ((d + k4 - 1.0) * s2 ** 2 - 2.0 * s2 + 1.0)
    (est, se), g_sq = _quadratic_error_samples(p, x, spec, h, n_samples, rng, relative=False)
    if h == 0:
        return _scalar_report("second-moment", base * g_sq, est, se, n_samples)
    L = p.lambda_max
    k6 = spec.kappa6
    m3, _, m5, _ = estimate_norm_moments(spec, d, max(100_000, min(int(n_samples), 1_000_000)), seed=seed)
    bound = (
        0.5 * h * h * L * L * s2 ** 3 * (k6 + (d - 2.0 + 3.0 * k4) * (d - 1.0)) * d
        + h * L * math.sqrt(g_sq) * (m5 + m3)
        + base * g_sq
    )
    return _scalar_report("second-moment-bound", bound, est, se, n_samples, is_bound=True)


def expected_relative_squared_error(d, kind, variance):
    """1 - 1/(d+k4-1) + (d+k4-1)(sigma^2 - 1/(d+k4-1))^2; minimal at the optimal variance."""
    k = d + kurtosis(kind) - 1.0
    return 1.0 - 1.0 / k + k * (variance - 1.0 / k) ** 2


def check_relative_error(p, x, spec, n_samples, seed=0, rng=None):
    """Relative squared error at h = 0 against its closed form.

    Falls back to the absolute form (analytic 0) when grad f(x) = 0.
    """
    rng = stream(seed, "relative-error", spec.kind) if rng is None else rng
    g = exact_gradient(p, x)
    if float(g @ g) == 0.0:
        return _scalar_report("relative-error(absolute-at-stationary)", 0.0, 0.0, 0.0, n_samples)
    analytic = expected_relative_squared_error(p.dim, spec.kind, spec.variance)
    (est, se), _ = _quadratic_error_samples(p, x, spec, 0.0, n_samples, rng, relative=True)
    return _scalar_report("relative-error", analytic, est, se, n_samples)


def run_verification_suite(n_samples=1_000_000, n_heavy=10_000_000, master_seed=2024, dims=(2, 3, 5)):
    """The full identity suite across all five laws; returns all reports.

    Identities run per (law, dimension) with freshly drawn a, b, A,
    diagonal B and orthogonal U (QR of a square normal matrix); the
    estimator second-moment equality, the h > 0 bound and the
    optimal-variance relative error run once per law on random quadratics.
    """
    reports = []
    for kind in KINDS:
        heavy = n_heavy if kind == "laplace" else n_samples
        for d in dims:
            draw = stream(master_seed, "suite-data", kind, d)
            a = draw.normal(size=d)
            b = draw.normal(size=d)
            A = draw.normal(size=(d + 1, d))
            b_diag = draw.normal(size=d)
            U, _ = np.linalg.qr(draw.normal(size=(d, d)))
            rng = stream(master_seed, "suite-mc", kind, d)
            spec = DistributionSpec(kind, 1.0)
            for rep in check_moment_identities(spec, d, a, b, A, b_diag, U, n_samples, rng, n_heavy=heavy):
                rep.name = f"{rep.name}[{kind},d={d}]"
                reports.append(rep)
        # estimator-level checks on a fixed random quadratic
        d = 5
        gen = stream(master_seed, "suite-quadratic", kind)
        p = QuadraticProblem.from_data(gen.normal(size=(d + 2, d)), gen.normal(size=d + 2))
        x = gen.normal(size=d)
        spec1 = DistributionSpec(kind, 1.0)
        rep = check_second_moment(p, x, spec1, 0.0, n_samples, rng=stream(master_seed, "sm0", kind))
        rep.name = f"{rep.name}[{kind},d={d}]"
        reports.append(rep)
        rep = check_second_moment(p, x, spec1, 1e-2, n_samples, seed=master_seed,
                                  rng=stream(master_seed, "smh", kind))
        rep.name = f"{rep.name}[{kind},d={d},h=0.01]"
        reports.append(rep)
        d_rel = 10
        gen = stream(master_seed, "suite-rel", kind)
        p_rel = QuadraticProblem.from_data(gen.normal(size=(d_rel, d_rel)), gen.normal(size=d_rel))
        spec_opt = DistributionSpec(kind, optimal_variance(d_rel, kind))
        rep = check_relative_error(p_rel, gen.normal(size=d_rel), spec_opt, n_samples,
                                   rng=stream(master_seed, "rel", kind))
        rep.name = f"{rep.name}[{kind},d={d_rel},optimal-variance]"
        reports.append(rep)
    return reports
