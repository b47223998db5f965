"""The five coordinate sampling laws and their exact standardized moments.

All five are symmetric about zero (odd moments vanish) and are treated as
scale families: a spec fixes the kind and the per-coordinate variance
sigma^2, and a draw at variance sigma^2 is exactly sigma times the
unit-variance draw produced from the same generator state.  Kurtosis and
the sixth standardized moment are scale-free.

Sixth moments: Bernoulli 1, Uniform 27/7, Wigner 5 (Catalan moments of the
semicircle), Gaussian 15, Laplace 90 (E|Z|^n = n! b^n for scale b, so
720 b^6 / (2 b^2)^3 = 90; the Monte-Carlo suite pins this value).
"""

import zlib
from dataclasses import dataclass

import numpy as np

__all__ = [
    "KINDS",
    "DistributionSpec",
    "kurtosis",
    "sixth_standardized_moment",
    "optimal_variance",
    "sample_vector",
    "sample_matrix",
    "stream",
]

KINDS = ("bernoulli", "uniform", "wigner", "gaussian", "laplace")

_KURTOSIS = {
    "bernoulli": 1.0,
    "uniform": 1.8,
    "wigner": 2.0,
    "gaussian": 3.0,
    "laplace": 6.0,
}

_SIXTH = {
    "bernoulli": 1.0,
    "uniform": 27.0 / 7.0,
    "wigner": 5.0,
    "gaussian": 15.0,
    "laplace": 90.0,
}


@dataclass(frozen=True)
class DistributionSpec:
    """A sampling law: one of the five kinds plus the coordinate variance."""

    kind: str
    variance: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown distribution kind {self.kind!r}; choose from {KINDS}")
        if not self.variance > 0:
            raise ValueError(f"variance must be positive, got {self.variance}")

    @property
    def sigma(self):
        return float(np.sqrt(self.variance))

    @property
    def kappa4(self):
        return kurtosis(self.kind)

    @property
    def kappa6(self):
        return sixth_standardized_moment(self.kind)


def kurtosis(kind):
    """Fourth standardized moment of one coordinate (scale-free)."""
    try:
        return _KURTOSIS[kind]
    except KeyError:
        raise ValueError(f"unknown distribution kind {kind!r}") from None


def sixth_standardized_moment(kind):
    """Sixth standardized moment of one coordinate (scale-free)."""
    try:
        return _SIXTH[kind]
    except KeyError:
        raise ValueError(f"unknown distribution kind {kind!r}") from None


def optimal_variance(d, kind):
    """Variance 1/(d + kurtosis - 1) minimizing the estimator's relative squared error."""
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    return 1.0 / (d + kurtosis(kind) - 1.0)


def _unit_draw(kind, shape, rng):
    """A draw with unit coordinate variance."""
    if kind == "bernoulli":
        return rng.integers(0, 2, size=shape).astype(float) * 2.0 - 1.0
    if kind == "uniform":
        half = np.sqrt(3.0)
        return rng.uniform(-half, half, size=shape)
    if kind == "wigner":
        # semicircle of radius r is Beta(3/2, 3/2) affinely mapped to [-r, r];
        # radius 2 gives unit variance (var = r^2/4)
        return 2.0 * (2.0 * rng.beta(1.5, 1.5, size=shape) - 1.0)
    if kind == "gaussian":
        return rng.standard_normal(size=shape)
    if kind == "laplace":
        return rng.laplace(0.0, 1.0 / np.sqrt(2.0), size=shape)
    raise ValueError(f"unknown distribution kind {kind!r}")


def sample_vector(spec, d, rng):
    """d i.i.d. coordinates with mean 0 and variance spec.variance."""
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    return spec.sigma * _unit_draw(spec.kind, d, rng)


def sample_matrix(spec, n, d, rng):
    """n stacked draws, shape (n, d); one row per direction vector."""
    return spec.sigma * _unit_draw(spec.kind, (n, d), rng)


def stream(master_seed, *path):
    """Derive an independent generator from (master_seed, path...).

    Path entries may be ints or short strings (hashed); streams for
    different paths never collide, so per-run generators need no
    coordination and adding runs never perturbs existing ones.
    """
    words = [int(master_seed) & 0xFFFFFFFF]
    for p in path:
        if isinstance(p, str):
            words.append(zlib.crc32(p.encode("utf-8")))
        else:
            words.append(int(p) & 0xFFFFFFFF)
    return np.random.default_rng(np.random.SeedSequence(words))
