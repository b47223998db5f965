"""Closed-form moment and convergence theory for f(x) = 0.5 ||Ax - b||^2.

Everything here is exact for quadratics: the estimator decomposition, its
first two moments, the optimal gradient-descent learning rate and
contraction rate, and the linear map that propagates the second moment of
the stacked heavy-ball error through one step.  The heavy-ball map is
implemented as the exact expectation E[Mbar^T S Mbar] over the direction
vector; on states whose blocks are diagonal with a diagonal Gram matrix
A^T A it reduces to a per-mode recursion on 2x2 blocks (`psi_blocks`),
which is what the hyperparameter grid search iterates.
"""

from dataclasses import dataclass

import numpy as np

from .distributions import sample_matrix, stream
from .forward_ad import TangentEvaluation
from .objectives import ObjectiveFunction

__all__ = [
    "QuadraticProblem",
    "PhbStateMatrix",
    "PhbHyperparams",
    "GridSearchResult",
    "exact_gradient",
    "rfg_decomposition",
    "f_variance_factor",
    "rfg_moments",
    "optimal_gd_lr",
    "gd_rate_and_bound",
    "gd_second_moment_map",
    "phi_map",
    "psi_blocks",
    "psi_max_eigenvalue",
    "phb_error_prediction",
    "phb_error_curve",
    "grid_search",
    "default_grid",
]

_PSD_TOL = 1e-10


@dataclass
class QuadraticProblem:
    """Least-squares data with the spectral pieces the theory needs.

    eigenvalues are those of A^T A in ascending order, U_A holds the
    corresponding orthonormal eigenvectors as columns (sign fixed so each
    column's largest-magnitude entry is positive), x_star solves the normal
    equations, and kappa = lambda_max / lambda_min.
    """

    A: np.ndarray
    b: np.ndarray
    eigenvalues: np.ndarray
    U_A: np.ndarray
    x_star: np.ndarray

    @classmethod
    def from_data(cls, A, b):
        A = np.asarray(A, dtype=float)
        b = np.asarray(b, dtype=float)
        if A.ndim != 2 or b.ndim != 1 or A.shape[0] != b.shape[0]:
            raise ValueError(f"incompatible shapes A {A.shape}, b {b.shape}")
        gram = A.T @ A
        lam, U = np.linalg.eigh(gram)
        if lam[0] <= lam[-1] * 1e-12 or lam[0] <= 0:
            raise ValueError("A^T A is singular; full column rank is required")
        # reproducible eigenvector signs
        for j in range(U.shape[1]):
            if U[np.argmax(np.abs(U[:, j])), j] < 0:
                U[:, j] = -U[:, j]
        x_star = np.linalg.solve(gram, A.T @ b)
        return cls(A=A, b=b, eigenvalues=lam, U_A=U, x_star=x_star)

    @property
    def dim(self):
        return self.A.shape[1]

    @property
    def lambda_min(self):
        return float(self.eigenvalues[0])

    @property
    def lambda_max(self):
        return float(self.eigenvalues[-1])

    @property
    def kappa(self):
        return self.lambda_max / self.lambda_min

    @property
    def gram(self):
        return self.A.T @ self.A

    def has_diagonal_gram(self, tol=1e-8):
        """True when A^T A is diagonal (per-mode heavy-ball reduction is exact)."""
        g = self.gram
        off = g - np.diag(np.diag(g))
        return float(np.abs(off).max(initial=0.0)) <= tol * max(1.0, float(np.abs(g).max()))

    def objective(self):
        """The quadratic as an ObjectiveFunction with analytic hooks."""
        A, b = self.A, self.b

        def evaluate(x):
            r = A @ x - b
            return 0.5 * float(r @ r)

        def gradient(x):
            return A.T @ (A @ x - b)

        def jvp_hook(x, v):
            g = gradient(x)
            return TangentEvaluation(evaluate(x), float(g @ v))

        return ObjectiveFunction(
            dimension=self.dim,
            evaluate=evaluate,
            jvp_hook=jvp_hook,
            exact_gradient=gradient,
            minimizer=self.x_star.copy(),
            name="quadratic",
        )


def exact_gradient(p, x):
    """grad f(x) = A^T (A x - b)."""
    return p.A.T @ (p.A @ np.asarray(x, dtype=float) - p.b)


def rfg_decomposition(p, x, z, h):
    """Split the estimate into (z^T grad f) z and the step-size part.

    For quadratics the forward difference is exact:
    (f(x+hz) - f(x))/h = z^T grad f(x) + (h/2)||Az||^2, so the two returned
    vectors sum to the full estimate.
    """
    if h < 0:
        raise ValueError(f"forward-difference step must be >= 0, got {h}")
    z = np.asarray(z, dtype=float)
    g = exact_gradient(p, x)
    exact_part = float(z @ g) * z
    Az = p.A @ z
    bias_part = 0.5 * h * float(Az @ Az) * z
    return exact_part, bias_part


def f_variance_factor(d, kappa4, kappa6, A):
    """The quartic direction-moment factor E[||Az||^4 ||z||^2] / sigma^6.

    Double sum over row pairs (k, l) of
    alpha * sum_i A_ki^2 A_li^2 + beta * sum_{i != j} (A_ki^2 A_lj^2
    + 2 A_ki A_li A_kj A_lj), alpha = kappa6 + (d-1) kappa4,
    beta = d - 2 + 2 kappa4; evaluated through the Gram matrix
    G = A^T A as alpha * sum_i G_ii^2 + beta * ((tr G)^2 + 2||G||_F^2
    - 3 sum_i G_ii^2).
    """
    A = np.asarray(A, dtype=float)
    if A.shape[1] != d:
        raise ValueError(f"A has {A.shape[1]} columns, expected {d}")
    alpha = kappa6 + (d - 1) * kappa4
    beta = d - 2.0 + 2.0 * kappa4
    g = A.T @ A
    diag_sq = float(np.sum(np.diag(g) ** 2))
    tr = float(np.trace(g))
    fro_sq = float(np.sum(g * g))
    return alpha * diag_sq + beta * (tr * tr - diag_sq + 2.0 * (fro_sq - diag_sq))


def rfg_moments(p, x, spec, h):
    """Mean vector and total variance of the estimate at x.

    mean = sigma^2 grad f(x); variance = (kappa4 + d - 2) sigma^4
    ||grad f||^2 + (h^2/4) sigma^6 F.  (The d-1 sometimes quoted for the
    first constant double-counts ||E||^2: the second moment of (z^T g) z
    is (kappa4 + d - 1) sigma^4 ||g||^2, and subtracting ||sigma^2 g||^2
    leaves kappa4 + d - 2; the d = 1 two-point case, where the estimator
    is exact and the variance is 0, pins it.)
    """
    d = p.dim
    g = exact_gradient(p, x)
    mean = spec.variance * g
    k4, k6 = spec.kappa4, spec.kappa6
    var = (k4 + d - 2.0) * spec.variance ** 2 * float(g @ g)
    if h > 0:
        var += 0.25 * h * h * spec.variance ** 3 * f_variance_factor(d, k4, k6, p.A)
    return mean, var


def optimal_gd_lr(p, spec):
    """Constant learning rate 2 / ((kappa4+d-1) sigma^2 (lmax+lmin))."""
    d = p.dim
    return (1.0 / ((spec.kappa4 + d - 1.0) * spec.variance)) * 2.0 / (p.lambda_max + p.lambda_min)


def gd_rate_and_bound(p, spec, h, k, initial_error_sq):
    """Contraction rate and the expected-squared-error bound at step k.

    r = 1 - (1/(kappa4+d-1)) (1 - ((kA-1)/(kA+1))^2) under the optimal
    learning rate; the bound is the geometric-series closed form of the
    per-step inequality E_{k+1} <= r E_k + (eta^2 h^2 / 4) sigma^6 F:
    bound(k) = r^k E_0 + (1 - r^k) h^2 sigma^2 F
    / ((lmax+lmin)^2 (kappa4+d-1) (1 - ((kA-1)/(kA+1))^2)).
    ``k`` may be an integer or an array of iteration indices.
    """
    d = p.dim
    if p.lambda_min <= 0:
        raise ValueError("condition number undefined: lambda_min must be positive")
    k4 = spec.kappa4
    big_k = k4 + d - 1.0
    rho = (p.kappa - 1.0) / (p.kappa + 1.0)
    contraction_gap = 1.0 - rho * rho
    r = 1.0 - contraction_gap / big_k
    k_arr = np.asarray(k)
    rk = r ** k_arr
    bound = rk * initial_error_sq
    if h > 0:
        f_factor = f_variance_factor(d, k4, spec.kappa6, p.A)
        tail = (
            h * h * spec.variance * f_factor
            / ((p.lambda_max + p.lambda_min) ** 2 * big_k * contraction_gap)
        )
        bound = bound + (1.0 - rk) * tail
    if np.isscalar(k) or k_arr.ndim == 0:
        return r, float(bound)
    return r, bound


def gd_second_moment_map(S, eta, spec, p):
    """One exact step of the descent error second moment: E[P^T S P].

    P = I - eta z z^T A^T A; for symmetric S the expectation is
    S - eta s2 (QS + SQ) + eta^2 s2^2 Q (tr(S) I + 2S + (k4-3) Diag(S)) Q
    with Q = A^T A, in the standard basis where z has i.i.d. coordinates.
    """
    S = np.asarray(S, dtype=float)
    q = p.gram
    s2, k4 = spec.variance, spec.kappa4
    inner = np.trace(S) * np.eye(p.dim) + 2.0 * S + (k4 - 3.0) * np.diag(np.diag(S))
    out = S - eta * s2 * (q @ S + S @ q) + (eta * s2) ** 2 * (q @ inner @ q)
    return 0.5 * (out + out.T)


@dataclass
class PhbStateMatrix:
    """Symmetric 2d x 2d state [[S1, S2^T], [S2, S3]] stored by blocks.

    ``s2`` is the lower-left block.  S1 must be positive semidefinite for
    the propagation step (it is the second moment of the current error).
    """

    s1: np.ndarray
    s2: np.ndarray
    s3: np.ndarray

    def __post_init__(self):
        self.s1 = np.asarray(self.s1, dtype=float)
        self.s2 = np.asarray(self.s2, dtype=float)
        self.s3 = np.asarray(self.s3, dtype=float)
        d = self.s1.shape[0]
        for name, blk in (("s1", self.s1), ("s2", self.s2), ("s3", self.s3)):
            if blk.shape != (d, d):
                raise ValueError(f"block {name} has shape {blk.shape}, expected {(d, d)}")

    @property
    def dim(self):
        return self.s1.shape[0]

    @classmethod
    def identity(cls, d):
        return cls(np.eye(d), np.zeros((d, d)), np.eye(d))

    @classmethod
    def from_full(cls, S):
        S = np.asarray(S, dtype=float)
        n = S.shape[0]
        if S.ndim != 2 or S.shape[1] != n or n % 2:
            raise ValueError(f"expected a square even-sized matrix, got shape {S.shape}")
        if not np.allclose(S, S.T, atol=1e-12 * max(1.0, float(np.abs(S).max()))):
            raise ValueError("state matrix must be symmetric")
        d = n // 2
        return cls(S[:d, :d], S[d:, :d], S[d:, d:])

    def full(self):
        return np.block([[self.s1, self.s2.T], [self.s2, self.s3]])

    def symmetrized(self):
        return PhbStateMatrix(
            0.5 * (self.s1 + self.s1.T), self.s2.copy(), 0.5 * (self.s3 + self.s3.T)
        )


@dataclass(frozen=True)
class PhbHyperparams:
    """Heavy-ball momentum/learning-rate pair plus the sampling moments."""

    mu: float
    eta: float
    sigma2: float = 1.0
    kappa4: float = 1.0

    def __post_init__(self):
        if not self.eta > 0:
            raise ValueError(f"learning rate must be positive, got {self.eta}")
        if not self.sigma2 > 0:
            raise ValueError(f"sigma2 must be positive, got {self.sigma2}")
        if self.kappa4 < 1.0:
            raise ValueError(f"kurtosis must be >= 1, got {self.kappa4}")

    @classmethod
    def for_spec(cls, mu, eta, spec):
        return cls(mu=mu, eta=eta, sigma2=spec.variance, kappa4=spec.kappa4)


def _check_s1_psd(s1):
    scale = max(1.0, float(np.abs(s1).max(initial=0.0)))
    if float(np.linalg.eigvalsh(0.5 * (s1 + s1.T))[0]) < -_PSD_TOL * scale:
        raise ValueError("S1 block is not positive semidefinite")


def phi_map(S, hp, p):
    """One exact step of the stacked heavy-ball error second moment.

    Returns E[Mbar^T S Mbar] over the direction vector, where Mbar is the
    one-step transition written in the eigenbasis of A^T A.  With
    V = (1+mu) I - eta s2 Sigma, U = U_A, G = U S1 U^T and
    K = tr(S1) I + 2 G + (kappa4 - 3) Diag(G):

        H1 = (1+mu)^2 S1 - (1+mu) eta s2 (Sigma S1 + S1 Sigma)
             + (eta s2)^2 Sigma U^T K U Sigma + V S2^T + S2 V + S3
        H2 = -mu (S1 V + S2^T)
        H3 = mu^2 S1

    On states with diagonal blocks and a diagonal Gram matrix this equals
    the per-mode recursion of `psi_blocks`.
    """
    d = p.dim
    if S.dim != d:
        raise ValueError(f"state dimension {S.dim} does not match problem dimension {d}")
    _check_s1_psd(S.s1)
    mu, es2 = hp.mu, hp.eta * hp.sigma2
    lam = p.eigenvalues
    U = p.U_A
    s1, s2, s3 = S.s1, S.s2, S.s3

    with np.errstate(over="ignore", invalid="ignore"):
        v_diag = (1.0 + mu) - es2 * lam
        G = U @ s1 @ U.T
        K = np.trace(s1) * np.eye(d) + 2.0 * G + (hp.kappa4 - 3.0) * np.diag(np.diag(G))
        # Sigma and V are diagonal: row/column scaling instead of matmuls
        sig_s1 = lam[:, None] * s1
        quartic = es2 ** 2 * (lam[:, None] * (U.T @ K @ U) * lam[None, :])
        s2_v = s2 * v_diag[None, :]
        h1 = (
            (1.0 + mu) ** 2 * s1
            - (1.0 + mu) * es2 * (sig_s1 + sig_s1.T)
            + quartic
            + s2_v.T + s2_v
            + s3
        )
        h2 = -mu * (s1 * v_diag[None, :] + s2.T)
        h3 = mu ** 2 * s1
    return PhbStateMatrix(h1, h2, h3).symmetrized()


def psi_blocks(s1, s2, s3, hp, eigenvalues):
    """Per-mode 2x2 blocks of the heavy-ball moment step, shape (d, 2, 2).

    Valid as a reduction of `phi_map` on diagonal states when the Gram
    matrix A^T A is diagonal.  With v_i = 1 + mu - eta s2 lambda_i:

        h1_i = v_i^2 s1_i + 2 v_i s2_i + s3_i
               + (eta s2 lambda_i)^2 (sum_j s1_j + (kappa4 - 2) s1_i)
        h2_i = -mu (v_i s1_i + s2_i)
        h3_i = mu^2 s1_i
    """
    s1 = np.asarray(s1, dtype=float)
    s2 = np.asarray(s2, dtype=float)
    s3 = np.asarray(s3, dtype=float)
    lam = np.asarray(eigenvalues, dtype=float)
    es2 = hp.eta * hp.sigma2
    v = (1.0 + hp.mu) - es2 * lam
    h1 = v * v * s1 + 2.0 * v * s2 + s3 + (es2 * lam) ** 2 * (s1.sum() + (hp.kappa4 - 2.0) * s1)
    h2 = -hp.mu * (v * s1 + s2)
    h3 = hp.mu ** 2 * s1
    blocks = np.empty((lam.size, 2, 2))
    blocks[:, 0, 0] = h1
    blocks[:, 0, 1] = blocks[:, 1, 0] = h2
    blocks[:, 1, 1] = h3
    return blocks


def psi_max_eigenvalue(block):
    """Largest eigenvalue of a symmetric 2x2 block (vectorized over leading axes)."""
    block = np.asarray(block, dtype=float)
    h1 = block[..., 0, 0]
    h2 = block[..., 0, 1]
    h3 = block[..., 1, 1]
    mid = 0.5 * (h1 + h3)
    rad = np.sqrt((0.5 * (h1 - h3)) ** 2 + h2 * h2)
    out = mid + rad
    return float(out) if out.ndim == 0 else out


def _stacked_basis_change(p, e0):
    d = p.dim
    e0 = np.asarray(e0, dtype=float)
    if e0.shape != (2 * d,):
        raise ValueError(f"stacked error must have shape {(2 * d,)}, got {e0.shape}")
    return np.concatenate([p.U_A.T @ e0[:d], p.U_A.T @ e0[d:]])


def phb_error_curve(p, hp, e0, num_iters, h=0.0, spec=None, n_samples=100_000, seed=0):
    """Predicted E||stacked error at step k||^2 for k = 0..num_iters.

    Iterates the moment map from the identity and evaluates the quadratic
    form in the rotated initial error.  For h > 0 the accumulated
    step-size term is added, with the direction-moment weight matrix
    estimated by Monte Carlo from ``spec`` (n_samples draws).
    """
    if num_iters < 0:
        raise ValueError("num_iters must be >= 0")
    if h > 0 and spec is None:
        raise ValueError("h > 0 needs the sampling spec for the correction term")
    e_tilde = _stacked_basis_change(p, e0)
    d = p.dim
    if h > 0:
        z = sample_matrix(spec, int(n_samples), d, stream(seed, "phb-h-term"))
        az_sq = np.sum((z @ p.A.T) ** 2, axis=1)
        w = z @ p.U_A  # rows are U^T z
        weight = (w * az_sq[:, None] ** 2).T @ w / z.shape[0]
    state = PhbStateMatrix.identity(d)
    out = np.empty(num_iters + 1)
    correction = 0.0
    for k in range(num_iters + 1):
        full = state.full()
        out[k] = float(e_tilde @ full @ e_tilde) + correction
        if k == num_iters:
            break
        if h > 0:
            correction += 0.25 * (hp.eta * h) ** 2 * float(np.sum(weight * state.s1))
        state = phi_map(state, hp, p)
        if not np.isfinite(state.s1).all():
            raise OverflowError("moment recursion diverged for these hyperparameters")
    return out


def phb_error_prediction(p, hp, e0, k, h=0.0, spec=None, n_samples=100_000, seed=0):
    """Predicted E||stacked error||^2 at a single step k."""
    return float(phb_error_curve(p, hp, e0, int(k), h=h, spec=spec, n_samples=n_samples, seed=seed)[-1])


@dataclass
class GridSearchResult:
    mu_star: float
    eta_star: float
    mus: np.ndarray
    etas: np.ndarray
    values: np.ndarray  # shape (len(mus), len(etas)); non-finite mapped to +inf


def default_grid():
    """mu = i/100 for i in -99..99; eta = 10^(-5 + j/100) for j in 0..300."""
    mus = np.arange(-99, 100) * 1e-2
    etas = 10.0 ** (-5.0 + np.arange(0, 301) / 100.0)
    return mus, etas


def grid_search(p, spec, mus=None, etas=None, k_target=10_000):
    """Largest eigenvalue of the k_target-fold moment map at identity, per (mu, eta).

    Requires a diagonal Gram matrix A^T A, where the per-mode reduction is
    an exact diagonalization of the moment map.  Cells whose recursion
    overflows are treated as divergent (+inf).  Returns the argmin pair and
    the full value map.
    """
    if not p.has_diagonal_gram():
        raise ValueError(
            "grid search needs a diagonal A^T A; the per-mode reduction is not "
            "exact for this problem"
        )
    mus = default_grid()[0] if mus is None else np.asarray(mus, dtype=float)
    etas = default_grid()[1] if etas is None else np.asarray(etas, dtype=float)
    if mus.size == 0 or etas.size == 0:
        raise ValueError("grid must contain at least one (mu, eta) pair")
    lam = p.eigenvalues
    d = lam.size
    k4 = spec.kappa4
    es2 = spec.variance * etas  # eta sigma^2 per eta
    # broadcast shapes: (n_mu, n_eta, d)
    mu_g = mus[:, None, None]
    esl = es2[None, :, None] * lam[None, None, :]
    v = (1.0 + mu_g) - esl
    s1 = np.ones((mus.size, etas.size, d))
    s2 = np.zeros_like(s1)
    s3 = np.ones_like(s1)
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(int(k_target)):
            tot = s1.sum(axis=-1, keepdims=True)
            h1 = v * v * s1 + 2.0 * v * s2 + s3 + esl * esl * (tot + (k4 - 2.0) * s1)
            h2 = -mu_g * (v * s1 + s2)
            s3 = mu_g * mu_g * s1
            s1, s2 = h1, h2
        mid = 0.5 * (s1 + s3)
        rad = np.sqrt((0.5 * (s1 - s3)) ** 2 + s2 * s2)
        values = (mid + rad).max(axis=-1)
    values = np.where(np.isfinite(values), values, np.inf)
    flat = int(np.argmin(values))
    i, j = np.unravel_index(flat, values.shape)
    return GridSearchResult(
        mu_star=float(mus[i]), eta_star=float(etas[j]), mus=mus, etas=etas, values=values
    )
