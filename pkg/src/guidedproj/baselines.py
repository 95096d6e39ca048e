"""Reference transforms: classical PCA, Gaussian random projections, diffusion maps."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .data import as_matrix
from .errors import DegenerateKernelError, InvalidConfigError

RANK_TOL = 1e-10


@dataclass(frozen=True)
class TransformResult:
    """Scores of a transform plus the parameters that produced them."""

    scores: np.ndarray
    method: str
    parameters: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    @property
    def k(self) -> int:
        return self.scores.shape[1]


def _fix_signs(vt):
    idx = np.argmax(np.abs(vt), axis=1)
    signs = np.sign(vt[np.arange(vt.shape[0]), idx])
    signs[signs == 0] = 1.0
    return signs


def centered_rank(X) -> int:
    """Numerical rank of the column-centred data."""
    values = as_matrix(X)
    s = np.linalg.svd(values - values.mean(axis=0), compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > RANK_TOL * s[0]))


def pca_transform(X, k: int) -> TransformResult:
    """Scores on the first ``k`` principal components.

    The data are column-centred; scores are ``U_k * d_k`` from the thin SVD,
    with each loading vector's largest-magnitude entry made positive.
    """
    values = as_matrix(X)
    Xc = values - values.mean(axis=0)
    U, s, vt = np.linalg.svd(Xc, full_matrices=False)
    rank = int(np.sum(s > RANK_TOL * s[0])) if s[0] > 0 else 0
    if not 1 <= k <= rank:
        raise InvalidConfigError(f"k must lie in [1, rank={rank}], got {k}")
    signs = _fix_signs(vt[:k])
    scores = U[:, :k] * s[:k] * signs
    return TransformResult(
        scores,
        "pca",
        {"k": int(k)},
        {"loadings": vt[:k].T * signs, "singular_values": s[:k], "mean": values.mean(axis=0)},
    )


def random_projection(X, k: int, rng_seed=None) -> TransformResult:
    """Project onto ``k`` Gaussian directions, scaled by ``1/sqrt(k)``.

    The scaling makes squared distances unbiased:
    ``E ||R'x - R'y||^2 / k = ||x - y||^2``.
    """
    if k < 1:
        raise InvalidConfigError(f"k must be >= 1, got {k}")
    values = as_matrix(X)
    rng = rng_seed if isinstance(rng_seed, np.random.Generator) else np.random.default_rng(rng_seed)
    R = rng.standard_normal((values.shape[1], k))
    seed = None if isinstance(rng_seed, np.random.Generator) else rng_seed
    return TransformResult(values @ R / np.sqrt(k), "rp", {"k": int(k), "rng_seed": seed},
                           {"matrix": R})


def kth_neighbour_distances(X, knn: int, distances=None) -> np.ndarray:
    """Distance from each observation to its ``knn``-th nearest other observation."""
    D = squareform(pdist(as_matrix(X))) if distances is None else distances
    n = D.shape[0]
    if not 1 <= knn < n:
        raise InvalidConfigError(f"knn must lie in [1, {n}), got {knn}")
    # column 0 of each sorted row is the self-distance
    return np.sort(D, axis=1)[:, knn]


def diffusion_map(X, knn: int, k: int, distances=None) -> TransformResult:
    """Diffusion-map coordinates with a data-driven kernel width.

    ``epsilon = 2 * median_i(d_{i,(knn)})**2``; the Gaussian kernel
    ``exp(-d**2 / epsilon)`` is row-normalized into a Markov matrix. Its
    eigenvectors are obtained from the symmetric conjugate
    ``D^-1/2 W D^-1/2``. The stationary (constant) eigenvector is removed and
    the next ``k`` right eigenvectors, scaled by their eigenvalues, are the
    scores.

    Raises:
        DegenerateKernelError: Some observation has no numerically non-zero
            kernel weight to any other observation.
    """
    values = as_matrix(X)
    D = squareform(pdist(values)) if distances is None else np.asarray(distances, float)
    n = D.shape[0]
    if not 1 <= k <= n - 1:
        raise InvalidConfigError(f"k must lie in [1, {n - 1}], got {k}")
    eps = 2.0 * float(np.median(kth_neighbour_distances(values, knn, D))) ** 2
    if eps <= 0:
        raise DegenerateKernelError("kernel width is zero (duplicate neighbourhoods)")
    W = np.exp(-(D**2) / eps)
    off = W.sum(axis=1) - np.diag(W)
    if np.any(off <= np.finfo(float).tiny):
        raise DegenerateKernelError("kernel has isolated observations")
    deg = W.sum(axis=1)
    root = np.sqrt(deg)
    S = W / np.outer(root, root)
    # deflate the known stationary direction so it is never mixed into the rest
    v0 = root / np.linalg.norm(root)
    evals, evecs = np.linalg.eigh(S - np.outer(v0, v0))
    stationary = int(np.argmax(np.abs(evecs.T @ v0)))
    evals = np.delete(evals, stationary)
    evecs = np.delete(evecs, stationary, axis=1)
    order = np.argsort(evals)[::-1]
    evals, evecs = evals[order], evecs[:, order]
    lam = evals[:k]
    psi = evecs[:, :k] / root[:, None] * np.sqrt(deg.sum())
    signs = _fix_signs(psi.T)
    scores = psi * signs * lam
    spectrum = np.concatenate([[1.0], evals])
    return TransformResult(
        scores,
        "diff",
        {"knn": int(knn), "k": int(k)},
        {"epsilon": eps, "eigenvalues": spectrum},
    )
