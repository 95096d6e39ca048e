"""Construction of the guided sequence of projections.

The sequence starts from the densest group of ``q`` observations (the seed),
adds the observation closest to it, orders the seed by leave-one-out
distances, and then grows the ordered index list one observation at a time at
whichever end (left or right window of ``q`` indices) has the closer
candidate. Every run of ``q`` consecutive indices in the final order defines
one projection; evaluating an observation against all ``n - q + 1`` of them
gives its guided-projection representation.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.spatial.distance import cdist

from .data import DataMatrix, as_matrix, csv_text
from .errors import InvalidConfigError, InvalidDataError
from .projection import OSDKind, Projection, fit_projection

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SequencerConfig:
    """Parameters of the sequence construction.

    ``q`` must satisfy ``2 <= q < n``; values between 5 and 30 are typical.
    """

    q: int = 10
    osd_kind: OSDKind = OSDKind.OD
    rng_seed: int = 42

    def __post_init__(self):
        if int(self.q) != self.q or self.q < 2:
            raise InvalidConfigError(f"q must be an integer >= 2, got {self.q}")
        object.__setattr__(self, "q", int(self.q))
        object.__setattr__(self, "osd_kind", OSDKind(self.osd_kind))


@dataclass(frozen=True)
class Step:
    index: int
    side: str
    osd: float


@dataclass
class GuidedSequence:
    """Ordered observation indices defining the sliding windows.

    Attributes:
        order: Row indices in sequence order; complete sequences are a
            permutation of ``range(n)``.
        q: Window size.
        seed_set: The initial dense selection, in ascending index order.
        step_log: One record per added observation.
        osd_kind: Distance used for guidance and for the transform.
        rng_seed: Seed of the tie-breaking stream.
    """

    order: list[int]
    q: int
    seed_set: list[int]
    step_log: list[Step] = field(default_factory=list)
    osd_kind: OSDKind = OSDKind.OD
    rng_seed: int = 42

    @property
    def n_windows(self) -> int:
        return len(self.order) - self.q + 1

    def window(self, j: int) -> list[int]:
        """Indices of window ``j`` (0-based)."""
        if not 0 <= j < self.n_windows:
            raise IndexError(f"window {j} out of range [0, {self.n_windows})")
        return self.order[j : j + self.q]

    def to_dict(self) -> dict:
        return {
            "q": self.q,
            "osd_kind": self.osd_kind.value,
            "rng_seed": self.rng_seed,
            "order": [int(i) for i in self.order],
            "seed_set": [int(i) for i in self.seed_set],
            "step_log": [
                {"step": s + 1, "index": int(st.index), "side": st.side, "osd": float(st.osd)}
                for s, st in enumerate(self.step_log)
            ],
        }

    def to_json(self, **extra) -> str:
        doc = self.to_dict()
        doc.update(extra)
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, doc: dict) -> GuidedSequence:
        return cls(
            order=[int(i) for i in doc["order"]],
            q=int(doc["q"]),
            seed_set=[int(i) for i in doc["seed_set"]],
            step_log=[Step(int(s["index"]), s["side"], float(s["osd"])) for s in doc["step_log"]],
            osd_kind=OSDKind(doc.get("osd_kind", "od")),
            rng_seed=int(doc.get("rng_seed", 42)),
        )


@dataclass(frozen=True)
class GPMatrix:
    """Guided-projection representation: one row per observation, one column per window."""

    values: np.ndarray

    @property
    def n_windows(self) -> int:
        return self.values.shape[1]

    def column_names(self) -> list[str]:
        return [f"gp_{j + 1}" for j in range(self.n_windows)]

    def to_csv(self, labels=None, label_column: str = "label") -> str:
        return csv_text(self.values, self.column_names(), labels, label_column)


def _pick_min(values: np.ndarray, candidates: np.ndarray, rng: np.random.Generator):
    """Index into ``candidates`` of the minimum value; exact ties broken by ``rng``."""
    best = values.min()
    tied = np.flatnonzero(values == best)
    pos = tied[0] if tied.shape[0] == 1 else rng.choice(tied)
    return int(candidates[pos]), float(best)


def _check_q(n: int, q: int):
    if not 2 <= q < n:
        raise InvalidConfigError(f"q must satisfy 2 <= q < n={n}, got q={q}")


def select_seed(X, q: int, rng_seed: int = 42, distances: np.ndarray | None = None) -> list[int]:
    """Return the ``q`` indices forming the densest neighbourhood.

    The centre ``i0`` minimizes the distance to its ``q``-th nearest
    observation (counting itself at distance 0). The seed is every
    observation no farther from ``i0`` than that distance; boundary ties are
    thinned by seeded random choice so that exactly ``q`` indices remain.
    """
    values = as_matrix(X)
    n = values.shape[0]
    _check_q(n, q)
    rng = np.random.default_rng(rng_seed)
    D = cdist(values, values) if distances is None else distances
    kth = np.sort(D, axis=1)[:, q - 1]
    i0, radius = _pick_min(kth, np.arange(n), rng)
    row = D[i0]
    inside = np.flatnonzero(row < radius)
    boundary = np.flatnonzero(row == radius)
    need = q - inside.shape[0]
    if need < boundary.shape[0]:
        boundary = np.sort(rng.choice(boundary, size=need, replace=False))
    return sorted(int(i) for i in np.concatenate([inside, boundary]))


class _Scorer:
    """Evaluates OSD of candidate rows against fitted windows."""

    def __init__(self, values: np.ndarray, kind: OSDKind):
        self.values = values
        self.kind = kind

    def fit(self, sel) -> tuple[Projection, float, float]:
        P = fit_projection(self.values, sel)
        if self.kind is OSDKind.NORMALIZED_SUM:
            od_scale, sd_scale = _median_scales(P, self.values)
        else:
            od_scale = sd_scale = 1.0
        return P, od_scale, sd_scale

    def score(self, fitted, rows: np.ndarray) -> np.ndarray:
        P, od_scale, sd_scale = fitted
        return np.atleast_1d(P.osd(self.values[rows], self.kind, od_scale, sd_scale))


def _median_scales(P: Projection, reference: np.ndarray) -> tuple[float, float]:
    od_med = float(np.median(P.orthogonal_distance(reference)))
    sd_med = float(np.median(P.score_distance(reference)))
    # guards against a reference dominated by the selection itself
    return (od_med if od_med > 0 else 1.0), (sd_med if sd_med > 0 else 1.0)


class _State:
    """Mutable working state during construction."""

    def __init__(self, order, seed_set, available, rng, step_log):
        self.order = list(order)
        self.seed_set = list(seed_set)
        self.available = np.array(sorted(available), dtype=int)
        self.rng = rng
        self.step_log = list(step_log)
        self.left = None
        self.right = None


def order_initial(X, seed_sel: Sequence[int], cfg: SequencerConfig) -> GuidedSequence:
    """First step: add the closest outside observation and order the seed.

    Returns a partial sequence ``(j_1, ..., j_q, i_1)`` where the seed
    members are sorted by decreasing leave-one-out distance.
    """
    seq, _ = _initial_state(as_matrix(X), list(seed_sel), cfg)
    return seq


def _initial_state(values, seed_sel, cfg):
    n = values.shape[0]
    q = len(seed_sel)
    _check_q(n, q)
    scorer = _Scorer(values, cfg.osd_kind)
    rng = np.random.default_rng([cfg.rng_seed, 1])
    available = np.setdiff1d(np.arange(n), seed_sel)
    fitted0 = scorer.fit(seed_sel)
    i1, d1 = _pick_min(scorer.score(fitted0, available), available, rng)

    lod = np.empty(q)
    for k, j in enumerate(seed_sel):
        loo = [m for m in seed_sel if m != j] + [i1]
        lod[k] = scorer.score(scorer.fit(loo), np.array([j]))[0]
    # decreasing LOD; exact ties in seeded random order
    perm = rng.permutation(q)
    ranked = perm[np.argsort(-lod[perm], kind="stable")]
    order = [int(seed_sel[k]) for k in ranked] + [i1]

    seq = GuidedSequence(
        order=order,
        q=q,
        seed_set=sorted(int(i) for i in seed_sel),
        step_log=[Step(i1, "R", d1)],
        osd_kind=cfg.osd_kind,
        rng_seed=cfg.rng_seed,
    )
    state = _State(order, seq.seed_set, np.setdiff1d(available, [i1]), rng, seq.step_log)
    return seq, state


def _advance(state: _State, scorer: _Scorer, q: int) -> Step:
    if state.left is None:
        state.left = scorer.fit(state.order[:q])
    if state.right is None:
        state.right = scorer.fit(state.order[-q:])
    cand = state.available
    i_left, d_left = _pick_min(scorer.score(state.left, cand), cand, state.rng)
    i_right, d_right = _pick_min(scorer.score(state.right, cand), cand, state.rng)
    if d_left <= d_right:
        step = Step(i_left, "L", d_left)
        state.order.insert(0, i_left)
        state.left = None
    else:
        step = Step(i_right, "R", d_right)
        state.order.append(i_right)
        state.right = None
    state.available = state.available[state.available != step.index]
    state.step_log.append(step)
    return step


def advance_step(X, state: GuidedSequence, cfg: SequencerConfig) -> GuidedSequence:
    """Add one observation at the left or right end of a partial sequence.

    The left window is the first ``q`` indices and the right window the last
    ``q``. Each proposes its closest available observation; the smaller
    distance wins, with ties going to the left.
    """
    values = as_matrix(X)
    n = values.shape[0]
    available = np.setdiff1d(np.arange(n), state.order)
    if available.shape[0] == 0:
        raise InvalidConfigError("sequence is already complete")
    rng = np.random.default_rng([cfg.rng_seed, 2, len(state.step_log)])
    work = _State(state.order, state.seed_set, available, rng, state.step_log)
    _advance(work, _Scorer(values, cfg.osd_kind), state.q)
    return GuidedSequence(
        order=work.order,
        q=state.q,
        seed_set=list(state.seed_set),
        step_log=work.step_log,
        osd_kind=state.osd_kind,
        rng_seed=state.rng_seed,
    )


def window_projections(X, seq: GuidedSequence) -> list[tuple[Projection, float, float]]:
    """Fit every window of a complete sequence (with its OSD normalizers)."""
    scorer = _Scorer(as_matrix(X), seq.osd_kind)
    return [scorer.fit(seq.window(j)) for j in range(seq.n_windows)]


def transform(seq: GuidedSequence, X_fit, X_new) -> GPMatrix:
    """Evaluate observations of ``X_new`` against all windows of ``seq``.

    Windows are fitted on ``X_fit`` (the data the sequence was built from).
    Row ``i`` of the result is the guided-projection representation of
    ``X_new[i]``.
    """
    fit_values = as_matrix(X_fit)
    new_values = as_matrix(X_new)
    if new_values.shape[1] != fit_values.shape[1]:
        raise InvalidDataError(
            f"X_new has {new_values.shape[1]} columns, expected {fit_values.shape[1]}"
        )
    if sorted(seq.order) != list(range(fit_values.shape[0])):
        raise InvalidDataError("sequence order is not a permutation of the fit rows")
    fitted = window_projections(fit_values, seq)
    out = np.empty((new_values.shape[0], len(fitted)))
    for j, (P, od_scale, sd_scale) in enumerate(fitted):
        out[:, j] = P.osd(new_values, seq.osd_kind, od_scale, sd_scale)
    return GPMatrix(out)


def build_order(X, cfg: SequencerConfig = SequencerConfig()) -> GuidedSequence:
    """Run the full sequence construction (no transform)."""
    values = as_matrix(X)
    n = values.shape[0]
    _check_q(n, cfg.q)
    seed = select_seed(values, cfg.q, cfg.rng_seed)
    seq, state = _initial_state(values, seed, cfg)
    scorer = _Scorer(values, cfg.osd_kind)
    while state.available.shape[0] > 0:
        _advance(state, scorer, cfg.q)
    seq.order = state.order
    seq.step_log = state.step_log
    logger.debug("guided sequence built: n=%d q=%d left-steps=%d", n, cfg.q,
                 sum(s.side == "L" for s in seq.step_log))
    return seq


def build_sequence(X, cfg: SequencerConfig = SequencerConfig()) -> tuple[GuidedSequence, GPMatrix]:
    """Build the guided sequence and the in-sample guided-projection matrix.

    >>> rng = np.random.default_rng(0)
    >>> seq, gp = build_sequence(rng.normal(size=(30, 40)), SequencerConfig(q=5))
    >>> gp.values.shape
    (30, 26)
    """
    seq = build_order(X, cfg)
    return seq, transform(seq, X, X)


def guided_projections(X, q: int = 10, osd_kind=OSDKind.OD, rng_seed: int = 42) -> np.ndarray:
    """Convenience wrapper returning only the ``n x (n - q + 1)`` GP values."""
    if isinstance(X, DataMatrix):
        X = X.values
    return build_sequence(X, SequencerConfig(q, osd_kind, rng_seed))[1].values
