"""Local projection model of a small selection of observations.

A selection of ``q`` rows is centred by its mean and scaled by its column
standard deviations; the thin SVD of that standardized ``q x p`` block gives
an orthonormal basis of (at most) ``q - 1`` directions. Any observation can
then be compared with the selection through

* the orthogonal distance (OD): length of the residual of the standardized
  observation after projecting onto the basis, and
* the score distance (SD): Mahalanobis length of the projected coordinates
  under the selection's own covariance in the basis, ``D**2 / (q - 1)``.

Observations are always evaluated in the standardized coordinates
``(x - mu_hat) / sigma_hat`` of the selection, i.e. the space in which the
basis was computed.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .data import as_matrix
from .errors import DegenerateSelectionError, InvalidDataError, InvalidSelectionError

ZERO_VARIANCE_TOL = 1e-12
RANK_TOL = 1e-10


class OSDKind(str, enum.Enum):
    """How orthogonal and score distances are folded into one number."""

    OD = "od"
    SD = "sd"
    NORMALIZED_SUM = "normalized-sum"


@dataclass(frozen=True)
class Projection:
    """Fitted standardized-selection model.

    Attributes:
        mu_hat: Column means of the selection, shape ``(p,)``.
        sigma_hat: Guarded column standard deviations, shape ``(p,)``.
        basis: Right singular vectors, shape ``(p, r)``, orthonormal columns.
        singular_values: Shape ``(r,)``, strictly positive, non-increasing.
        q: Number of selected observations.
        indices: The selected row indices, in the order given.
    """

    mu_hat: np.ndarray
    sigma_hat: np.ndarray
    basis: np.ndarray
    singular_values: np.ndarray
    q: int
    indices: tuple[int, ...] = ()

    @property
    def effective_rank(self) -> int:
        return int(self.singular_values.shape[0])

    @property
    def p(self) -> int:
        return int(self.mu_hat.shape[0])

    def standardize(self, x) -> np.ndarray:
        """Centre and scale observations with the selection's location and scale."""
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.p:
            raise InvalidDataError(f"expected {self.p} coordinates, got {x.shape[-1]}")
        if not np.all(np.isfinite(x)):
            raise InvalidDataError("observation contains non-finite values")
        return (x - self.mu_hat) / self.sigma_hat

    def scores(self, x) -> np.ndarray:
        """Coordinates of standardized observations in the basis."""
        return self.standardize(x) @ self.basis

    def orthogonal_distance(self, x) -> np.ndarray | float:
        """OD of one observation (1-D input) or of each row (2-D input)."""
        z = self.standardize(x)
        resid = z - (z @ self.basis) @ self.basis.T
        od = np.linalg.norm(resid, axis=-1)
        return float(od) if od.ndim == 0 else od

    def score_distance(self, x) -> np.ndarray | float:
        """SD of one observation (1-D input) or of each row (2-D input)."""
        if self.effective_rank == 0:
            raise DegenerateSelectionError("score distance needs effective rank >= 1")
        t = self.scores(x) / self.singular_values
        sd = np.sqrt(self.q - 1) * np.linalg.norm(t, axis=-1)
        return float(sd) if sd.ndim == 0 else sd

    def projected_covariance(self, X_sel) -> np.ndarray:
        """Covariance of the selection's own scores, ``S'S / (q - 1)``.

        ``X_sel`` are the raw selected rows. Equals ``diag(D**2) / (q - 1)``
        up to rounding.
        """
        S = self.scores(as_matrix(X_sel))
        return S.T @ S / (self.q - 1)

    def osd(self, x, kind=OSDKind.OD, od_scale: float = 1.0, sd_scale: float = 1.0):
        """Combined distance; see :func:`osd`."""
        kind = OSDKind(kind)
        if kind is OSDKind.OD:
            return self.orthogonal_distance(x)
        if kind is OSDKind.SD:
            return self.score_distance(x)
        if od_scale <= 0 or sd_scale <= 0:
            raise InvalidDataError("normalizers must be positive")
        return self.orthogonal_distance(x) / od_scale + self.score_distance(x) / sd_scale


def _fix_signs(vt: np.ndarray) -> np.ndarray:
    # largest-magnitude entry of each right singular vector made positive
    idx = np.argmax(np.abs(vt), axis=1)
    signs = np.sign(vt[np.arange(vt.shape[0]), idx])
    signs[signs == 0] = 1.0
    return vt * signs[:, None]


def fit_projection(X, sel: Sequence[int]) -> Projection:
    """Fit the standardized-selection model on rows ``sel`` of ``X``.

    Args:
        X: DataMatrix or ``(n, p)`` array.
        sel: ``q >= 2`` distinct row indices.

    Raises:
        InvalidSelectionError: Fewer than two indices, duplicates, or
            indices out of range.
        InvalidDataError: Non-finite input.
        DegenerateSelectionError: Every singular value is (numerically) zero,
            e.g. all selected rows identical.
    """
    values = as_matrix(X)
    n = values.shape[0]
    idx = np.asarray(list(sel), dtype=int)
    q = idx.shape[0]
    if q < 2:
        raise InvalidSelectionError(f"selection needs at least 2 indices, got {q}")
    if np.unique(idx).shape[0] != q:
        raise InvalidSelectionError("selection contains duplicate indices")
    if idx.min() < 0 or idx.max() >= n:
        raise InvalidSelectionError(f"selection indices must lie in [0, {n})")

    block = values[idx]
    mu = block.mean(axis=0)
    sigma = block.std(axis=0, ddof=1)
    smax = sigma.max()
    sigma = np.where((smax == 0) | (sigma < ZERO_VARIANCE_TOL * smax), 1.0, sigma)

    Z = (block - mu) / sigma
    _, d, vt = np.linalg.svd(Z, full_matrices=False)
    if d.shape[0] == 0 or d[0] <= 0 or not np.isfinite(d[0]):
        raise DegenerateSelectionError("standardized selection is the zero matrix")
    keep = d > RANK_TOL * d[0]
    d = d[keep]
    vt = _fix_signs(vt[keep])
    return Projection(
        mu_hat=mu,
        sigma_hat=sigma,
        basis=np.ascontiguousarray(vt.T),
        singular_values=d,
        q=q,
        indices=tuple(int(i) for i in idx),
    )


def orthogonal_distance(P: Projection, x):
    return P.orthogonal_distance(x)


def score_distance(P: Projection, x):
    return P.score_distance(x)


def osd(P: Projection, x, kind=OSDKind.OD, od_scale: float = 1.0, sd_scale: float = 1.0):
    """Combined orthogonal/score distance of ``x`` to the selection.

    ``kind`` is ``"od"`` (default), ``"sd"`` or ``"normalized-sum"``. The
    normalized sum is ``OD / od_scale + SD / sd_scale``; callers pass the
    normalizers, typically the median OD and SD over a reference sample.
    """
    return P.osd(x, kind, od_scale=od_scale, sd_scale=sd_scale)
