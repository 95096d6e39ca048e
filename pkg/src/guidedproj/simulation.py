"""Synthetic benchmark data: two shifted-subspace groups and three noisy groups.

Setup 1 (two groups, p = 350). Group 1 has mean 0.5 on coordinates 51-100
(1-based) and a random 50-dimensional covariance block there. Group 2 has
mean -0.5 on the 50 coordinates starting at index ``r`` (1 <= r <= 100) and
its own random block there. All other coordinates are independent N(0, 1).

Setup 2 (three groups, p = 75 + r). Three 25-coordinate blocks carry means
of 0 or 1 so that every pair of groups differs by 1 in exactly 50
coordinates; each group has a random 50-dimensional covariance over its two
mean-1 blocks. ``r`` trailing coordinates are pure N(0, 1) noise.

Random covariance blocks default to the ``"eigen"`` construction
(eigenvalues uniform on [1, 10], uniformly random eigenvectors), so that the
informative blocks carry more variance than the identity noise. The
``"correlation"`` construction gives unit-diagonal blocks instead.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import DataMatrix
from .errors import InvalidConfigError

SETUP1_DIM = 350
BLOCK = 50


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


COVARIANCE_METHODS = ("correlation", "eigen")
EIGEN_RANGE = (1.0, 10.0)


def random_covariance(dim: int, rng_seed=None, method: str = "correlation") -> np.ndarray:
    """Random positive-definite covariance matrix.

    ``"correlation"``: draws ``A`` with iid N(0, 1) entries, forms
    ``A A' / dim`` and rescales it to unit diagonal. Square ``A`` makes the
    result positive definite with probability one.

    ``"eigen"``: ``Q diag(lam) Q'`` with ``lam`` uniform on [1, 10] and ``Q``
    a uniformly distributed orthogonal matrix.

    Args:
        dim: Matrix size, ``>= 1``.
        rng_seed: Integer seed or ``numpy.random.Generator``.
        method: ``"correlation"`` or ``"eigen"``.
    """
    if dim < 1:
        raise InvalidConfigError(f"dim must be >= 1, got {dim}")
    if method not in COVARIANCE_METHODS:
        raise InvalidConfigError(f"unknown covariance method {method!r}")
    rng = _rng(rng_seed)
    if method == "eigen":
        Q, R = np.linalg.qr(rng.standard_normal((dim, dim)))
        Q = Q * np.where(np.diag(R) < 0, -1.0, 1.0)
        lam = rng.uniform(*EIGEN_RANGE, size=dim)
        S = (Q * lam) @ Q.T
        return (S + S.T) / 2
    A = rng.standard_normal((dim, dim))
    C = A @ A.T / dim
    d = np.sqrt(np.diag(C))
    S = C / np.outer(d, d)
    S = (S + S.T) / 2
    np.fill_diagonal(S, 1.0)
    return S


def sample_mvn(mean: np.ndarray, cov: np.ndarray, size: int, rng) -> np.ndarray:
    """Draw ``size`` rows from N(mean, cov) via a Cholesky factor."""
    rng = _rng(rng)
    try:
        L = np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        L = np.linalg.cholesky(cov + 1e-10 * np.eye(cov.shape[0]))
    Z = rng.standard_normal((size, mean.shape[0]))
    return mean + Z @ L.T


@dataclass(frozen=True)
class Setup1Spec:
    r: int
    n_per_group: int = 100
    rng_seed: int = 42
    covariance: str = "eigen"

    def __post_init__(self):
        if not 1 <= self.r <= 100:
            raise InvalidConfigError(f"setup 1 needs 1 <= r <= 100, got {self.r}")
        if self.n_per_group < 1:
            raise InvalidConfigError("n_per_group must be >= 1")
        if self.covariance not in COVARIANCE_METHODS:
            raise InvalidConfigError(f"unknown covariance method {self.covariance!r}")


@dataclass(frozen=True)
class Setup2Spec:
    r: int
    n_per_group: int = 100
    rng_seed: int = 42
    covariance: str = "eigen"

    def __post_init__(self):
        if self.r < 0:
            raise InvalidConfigError(f"setup 2 needs r >= 0, got {self.r}")
        if self.n_per_group < 1:
            raise InvalidConfigError("n_per_group must be >= 1")
        if self.covariance not in COVARIANCE_METHODS:
            raise InvalidConfigError(f"unknown covariance method {self.covariance!r}")


def setup1_parameters(r: int, rng_seed=None, covariance: str = "eigen"):
    """Means and covariances of both setup-1 groups.

    ``r`` is the 1-based start index of group 2's informative block.
    Returns ``[(mu_1, Sigma_1), (mu_2, Sigma_2)]``.
    """
    Setup1Spec(r)
    rng = _rng(rng_seed)
    start2 = r - 1
    params = []
    for start, shift in ((BLOCK, 0.5), (start2, -0.5)):
        mu = np.zeros(SETUP1_DIM)
        mu[start : start + BLOCK] = shift
        cov = np.eye(SETUP1_DIM)
        cov[start : start + BLOCK, start : start + BLOCK] = random_covariance(BLOCK, rng, covariance)
        params.append((mu, cov))
    return params


def setup1_informative(r: int) -> int:
    """Number of coordinates informative for at least one setup-1 group."""
    return BLOCK + min(BLOCK, abs(51 - r))


def gen_setup1(spec: Setup1Spec) -> DataMatrix:
    """Sample setup 1: ``2 * n_per_group`` rows, 350 columns, labels "1"/"2"."""
    rng = _rng(spec.rng_seed)
    params = setup1_parameters(spec.r, rng, spec.covariance)
    blocks = [sample_mvn(mu, cov, spec.n_per_group, rng) for mu, cov in params]
    labels = np.repeat(["1", "2"], spec.n_per_group)
    return DataMatrix(np.vstack(blocks), labels, [f"x{j + 1}" for j in range(SETUP1_DIM)])


SETUP2_PATTERNS = ((1, 1, 0), (1, 0, 1), (0, 1, 1))


def setup2_parameters(r: int, rng_seed=None, covariance: str = "eigen"):
    """Means and covariances of the three setup-2 groups."""
    Setup2Spec(r)
    rng = _rng(rng_seed)
    p = 75 + r
    params = []
    for pattern in SETUP2_PATTERNS:
        mu = np.zeros(p)
        cols = []
        for b, on in enumerate(pattern):
            if on:
                mu[25 * b : 25 * (b + 1)] = 1.0
                cols.extend(range(25 * b, 25 * (b + 1)))
        cov = np.eye(p)
        cov[np.ix_(cols, cols)] = random_covariance(BLOCK, rng, covariance)
        params.append((mu, cov))
    return params


def gen_setup2(spec: Setup2Spec) -> DataMatrix:
    """Sample setup 2: ``3 * n_per_group`` rows, ``75 + r`` columns."""
    rng = _rng(spec.rng_seed)
    params = setup2_parameters(spec.r, rng, spec.covariance)
    blocks = [sample_mvn(mu, cov, spec.n_per_group, rng) for mu, cov in params]
    labels = np.repeat(["1", "2", "3"], spec.n_per_group)
    p = 75 + spec.r
    return DataMatrix(np.vstack(blocks), labels, [f"x{j + 1}" for j in range(p)])


def expected_group_distance(r: int) -> float:
    """Distance between the setup-1 group means, ``sqrt(50 - min(50, |51 - r|) / 2)``.

    Largest (``sqrt(50)``) when both informative blocks coincide at ``r = 51``.
    """
    if not 1 <= r <= 100:
        raise InvalidConfigError(f"r must lie in [1, 100], got {r}")
    return float(np.sqrt(50 - 0.5 * min(50, abs(51 - r))))
