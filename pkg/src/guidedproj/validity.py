"""Cluster validity indices and Ward hierarchical clustering.

Indices:

* Gamma (Baker-Hubert): compares every within-cluster distance with every
  between-cluster distance; concordant minus discordant over their sum,
  ties excluded.
* Silhouette (Rousseeuw): mean of ``(b - a) / max(a, b)``; singleton
  clusters score 0.
* C-index (Hubert-Levin): within-cluster distance sum rescaled between the
  sums of the ``N_w`` smallest and largest distances. Smaller is better.
* F-measure (Larsen-Aone): class-size weighted best-match F1 between a
  clustering and reference classes.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .data import DataMatrix, as_matrix
from .errors import InvalidConfigError, InvalidDataError, UndefinedIndexError


def encode_labels(labels) -> tuple[np.ndarray, int]:
    """Map arbitrary cluster ids to ``0..k-1`` (sorted by id)."""
    labels = np.asarray(labels)
    if labels.ndim != 1:
        raise InvalidDataError("labels must be one-dimensional")
    _, codes = np.unique(labels, return_inverse=True)
    return codes.astype(int), int(codes.max()) + 1 if codes.size else 0


def _condensed(X, precomputed: bool) -> np.ndarray:
    if precomputed:
        D = np.asarray(X, dtype=float)
        if D.ndim == 1:
            return D
        if D.ndim != 2 or D.shape[0] != D.shape[1]:
            raise InvalidDataError("precomputed distances must be a square matrix")
        return squareform(D, checks=False)
    return pdist(as_matrix(X))


def _n_from_condensed(m: int) -> int:
    n = int(round((1 + np.sqrt(1 + 8 * m)) / 2))
    if n * (n - 1) // 2 != m:
        raise InvalidDataError("condensed distance vector has invalid length")
    return n


def _pair_mask(codes: np.ndarray) -> np.ndarray:
    """Condensed-order boolean mask of within-cluster pairs."""
    i, j = np.triu_indices(codes.shape[0], k=1)
    return codes[i] == codes[j]


def _prepare(X, labels, precomputed):
    d = _condensed(X, precomputed)
    n = _n_from_condensed(d.shape[0])
    codes, k = encode_labels(labels)
    if codes.shape[0] != n:
        raise InvalidDataError(f"expected {n} labels, got {codes.shape[0]}")
    return d, codes, k


def gamma_index(X, labels, precomputed: bool = False) -> float:
    """Baker-Hubert Gamma of a partition, in ``[-1, 1]``; larger is better.

    Args:
        X: ``(n, p)`` observations, or distances when ``precomputed``
            (square matrix or condensed vector).
        labels: Cluster id per observation.
    """
    d, codes, k = _prepare(X, labels, precomputed)
    if k < 2:
        raise InvalidConfigError("Gamma needs at least 2 clusters")
    within_mask = _pair_mask(codes)
    within = d[within_mask]
    between = np.sort(d[~within_mask])
    if within.size == 0 or between.size == 0:
        raise UndefinedIndexError("Gamma needs within- and between-cluster pairs")
    # s_plus: pairs with within < between; s_minus: within > between
    s_plus = np.sum(between.size - np.searchsorted(between, within, side="right"))
    s_minus = np.sum(np.searchsorted(between, within, side="left"))
    total = s_plus + s_minus
    if total == 0:
        raise UndefinedIndexError("all within/between comparisons are ties")
    return float((s_plus - s_minus) / total)


def silhouette_index(X, labels, precomputed: bool = False) -> float:
    """Mean silhouette width, in ``[-1, 1]``; larger is better."""
    d, codes, k = _prepare(X, labels, precomputed)
    n = codes.shape[0]
    if k < 2:
        raise InvalidConfigError("silhouette needs at least 2 clusters")
    if n < k + 1:
        raise InvalidConfigError("silhouette needs n >= k + 1")
    D = squareform(d)
    counts = np.bincount(codes, minlength=k)
    onehot = np.zeros((n, k))
    onehot[np.arange(n), codes] = 1.0
    sums = D @ onehot
    own = counts[codes]
    s = np.zeros(n)
    multi = own > 1
    a = sums[np.arange(n), codes] / np.maximum(own - 1, 1)
    means = sums / counts
    means[np.arange(n), codes] = np.inf
    b = means.min(axis=1)
    denom = np.maximum(a, b)
    ok = multi & (denom > 0)
    s[ok] = (b[ok] - a[ok]) / denom[ok]
    return float(s.mean())


def c_index(X, labels, precomputed: bool = False) -> float:
    """Hubert-Levin C-index, in ``[0, 1]``; smaller is better."""
    d, codes, k = _prepare(X, labels, precomputed)
    if k < 2:
        raise InvalidConfigError("C-index needs at least 2 clusters")
    within_mask = _pair_mask(codes)
    n_w = int(within_mask.sum())
    if n_w == 0 or n_w == d.size:
        raise UndefinedIndexError("C-index needs 0 < N_w < number of pairs")
    s_w = d[within_mask].sum()
    ordered = np.sort(d)
    s_min = ordered[:n_w].sum()
    s_max = ordered[-n_w:].sum()
    if s_max == s_min:
        raise UndefinedIndexError("C-index undefined: all distances equal")
    return float((s_w - s_min) / (s_max - s_min))


def f_measure(predicted, truth) -> float:
    """Larsen-Aone F-measure of ``predicted`` against reference ``truth``."""
    predicted = np.asarray(predicted)
    truth = np.asarray(truth)
    if predicted.shape != truth.shape:
        raise InvalidDataError(
            f"label vectors differ in length: {predicted.shape} vs {truth.shape}"
        )
    pc, kp = encode_labels(predicted)
    tc, kt = encode_labels(truth)
    n = tc.shape[0]
    table = np.zeros((kt, kp))
    np.add.at(table, (tc, pc), 1.0)
    n_i = table.sum(axis=1, keepdims=True)
    n_j = table.sum(axis=0, keepdims=True)
    with np.errstate(invalid="ignore", divide="ignore"):
        prec = table / n_j
        rec = table / n_i
        f = np.where(table > 0, 2 * prec * rec / (prec + rec), 0.0)
    return float(np.sum(n_i[:, 0] / n * f.max(axis=1)))


class WardTree:
    """Ward agglomerative clustering, fitted once and cut at any ``k``.

    Merges are found by the Lance-Williams update on squared Euclidean
    distances; ``heights`` holds the merge criterion values.

    Example:
        >>> tree = WardTree(np.array([[0.0], [0.1], [5.0], [5.2]]))
        >>> tree.labels(2).tolist()
        [0, 0, 1, 1]
    """

    def __init__(self, X):
        if not isinstance(X, DataMatrix) and np.ndim(X) == 1:
            X = np.asarray(X, dtype=float)[:, None]
        values = as_matrix(X)
        n = values.shape[0]
        self.n = n
        D = squareform(pdist(values, "sqeuclidean"))
        np.fill_diagonal(D, np.inf)
        size = np.ones(n)
        active = np.ones(n, dtype=bool)
        merges = []
        heights = []
        for _ in range(n - 1):
            flat = int(np.argmin(D))
            i, j = divmod(flat, n)
            if i > j:
                i, j = j, i
            dij = D[i, j]
            ni, nj = size[i], size[j]
            nk = size
            new = ((ni + nk) * D[i] + (nj + nk) * D[j] - nk * dij) / (ni + nj + nk)
            new[~active] = np.inf
            new[i] = np.inf
            D[i, :] = new
            D[:, i] = new
            D[j, :] = np.inf
            D[:, j] = np.inf
            active[j] = False
            size[i] = ni + nj
            merges.append((i, j))
            heights.append(dij)
        self.merges = merges
        self.heights = np.asarray(heights)

    def labels(self, k: int) -> np.ndarray:
        """Cluster ids ``0..k-1`` ordered by first appearance."""
        if not 1 <= k <= self.n:
            raise InvalidConfigError(f"k must lie in [1, {self.n}], got {k}")
        parent = np.arange(self.n)

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for i, j in self.merges[: self.n - k]:
            parent[find(j)] = find(i)
        roots = np.array([find(a) for a in range(self.n)])
        _, first, codes = np.unique(roots, return_index=True, return_inverse=True)
        rank = np.argsort(np.argsort(first))
        return rank[codes]


def ward_cluster(X, k: int) -> np.ndarray:
    """Partition ``X`` into ``k`` clusters by Ward linkage."""
    return WardTree(X).labels(k)


def best_f_measure(X, truth, max_clusters: int | None = 50, tree: WardTree | None = None):
    """Best F-measure over Ward cuts with ``1..max_clusters`` clusters.

    Returns ``(f, k)``; the smallest ``k`` wins ties.
    """
    tree = WardTree(X) if tree is None else tree
    top = tree.n if max_clusters is None else min(tree.n, max_clusters)
    best = (-1.0, 0)
    for k in range(1, top + 1):
        f = f_measure(tree.labels(k), truth)
        if f > best[0]:
            best = (f, k)
    return best


@dataclass
class ValidationReport:
    """Index values for one transformed data set.

    ``c_index`` is reported raw (smaller is better).
    """

    gamma: float | None = None
    silhouette: float | None = None
    c_index: float | None = None
    f_measure: float | None = None
    best_k: int | None = None
    method: str = "raw"
    parameters: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def evaluate(X, labels, method: str = "raw", parameters=None, max_clusters: int | None = 50):
    """Compute all four indices for ``X`` against reference ``labels``.

    Indices that are undefined for this input are left as ``None``.
    """
    d = pdist(as_matrix(X))
    report = ValidationReport(method=method, parameters=dict(parameters or {}))
    for name, fn in (("gamma", gamma_index), ("silhouette", silhouette_index), ("c_index", c_index)):
        try:
            setattr(report, name, fn(d, labels, precomputed=True))
        except (UndefinedIndexError, InvalidConfigError):
            pass
    report.f_measure, report.best_k = best_f_measure(X, labels, max_clusters)
    return report
