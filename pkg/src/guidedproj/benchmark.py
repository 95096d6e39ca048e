"""Per-method grid optimisation of validity indices and replicated experiments.

Every transform is tuned separately for every index: each grid point is
transformed and scored, and the best value per index is kept together with
the parameters that achieved it. The F-measure is computed on Ward cuts over
a sweep of cluster counts and the best cut is kept as well.
"""

from __future__ import annotations

import json
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.spatial.distance import pdist

from .baselines import centered_rank, diffusion_map, pca_transform, random_projection
from .data import as_matrix
from .errors import GuidedProjectionError, InvalidConfigError
from .sequencer import SequencerConfig, build_sequence
from .simulation import Setup1Spec, Setup2Spec, gen_setup1, gen_setup2, setup1_informative
from .validity import WardTree, best_f_measure, c_index, gamma_index, silhouette_index

logger = logging.getLogger(__name__)

INDICES = ("gamma", "silhouette", "c_index", "f_measure")
METHODS = ("raw", "gp", "pca", "rp", "diff")
MINIMIZED = {"c_index"}

SCALES = {
    "desk": {"n_per_group": 50, "replicates": 10, "rp_repeats": 50},
    "paper": {"n_per_group": 100, "replicates": 25, "rp_repeats": 500},
}


def integer_grid(lo: int, hi: int, resolution: int = 10) -> list[int]:
    """All integers in ``[lo, hi]`` when the range is narrow, else ``resolution`` points."""
    if hi < lo:
        raise InvalidConfigError(f"empty range [{lo}, {hi}]")
    if hi - lo <= 30:
        return list(range(lo, hi + 1))
    return sorted({int(round(v)) for v in np.linspace(lo, hi, resolution)})


@dataclass
class GridSpec:
    """Parameter points to evaluate for one method.

    Attributes:
        method: One of ``raw``, ``gp``, ``pca``, ``rp``, ``diff``.
        points: Parameter dicts, one per grid point.
        indices: Indices to optimise.
        max_clusters: Upper end of the Ward cluster-count sweep (``None``: n).
        rp_repeats: Random projections drawn per ``k``.
        rp_aggregate: ``"best"`` or ``"mean"`` over the repeats.
    """

    method: str
    points: list[dict]
    indices: tuple[str, ...] = INDICES
    max_clusters: int | None = 50
    rp_repeats: int = 500
    rp_aggregate: str = "best"

    def __post_init__(self):
        if self.method not in METHODS:
            raise InvalidConfigError(f"unknown method {self.method!r}")
        if not self.points:
            raise InvalidConfigError("grid has no points")
        bad = set(self.indices) - set(INDICES)
        if bad:
            raise InvalidConfigError(f"unknown indices {sorted(bad)}")
        if self.rp_aggregate not in ("best", "mean"):
            raise InvalidConfigError("rp_aggregate must be 'best' or 'mean'")


def default_grid(
    method: str,
    X,
    n_informative: int | None = None,
    resolution: int = 10,
    q_range: tuple[int, int] = (5, 30),
    knn_fractions: tuple[float, float] = (0.005, 0.035),
    **kwargs,
) -> GridSpec:
    """Grid over each method's parameter ranges for data ``X``.

    GP: ``q`` in ``q_range``. PCA: ``k`` in ``[1, rank]``. DIFF: ``knn`` as
    a fraction of ``n`` in ``knn_fractions`` crossed with ``k`` in
    ``[1, rank]``. RP: ``k`` in ``[1, k_max]`` with ``k_max`` the number of
    informative variables when known, else the PCA rank.
    """
    values = as_matrix(X)
    n = values.shape[0]
    if method == "raw":
        points = [{}]
    elif method == "gp":
        lo, hi = q_range[0], min(q_range[1], n - 1)
        points = [{"q": q} for q in integer_grid(max(lo, 2), hi, resolution)]
    elif method == "pca":
        points = [{"k": k} for k in integer_grid(1, centered_rank(values), resolution)]
    elif method == "rp":
        k_max = n_informative if n_informative else centered_rank(values)
        points = [{"k": k} for k in integer_grid(1, k_max, resolution)]
    elif method == "diff":
        rank = min(centered_rank(values), n - 1)
        fr = np.linspace(knn_fractions[0], knn_fractions[1], resolution)
        knns = sorted({min(n - 1, max(1, int(round(f * n)))) for f in fr})
        points = [{"knn": a, "k": k} for a in knns for k in integer_grid(1, rank, resolution)]
    else:
        raise InvalidConfigError(f"unknown method {method!r}")
    return GridSpec(method, points, **kwargs)


def apply_method(method: str, X, params: dict, rng_seed=None) -> np.ndarray:
    """Transform ``X`` with one method at one parameter point."""
    values = as_matrix(X)
    if method == "raw":
        return values
    if method == "gp":
        return build_sequence(values, SequencerConfig(q=params["q"], rng_seed=rng_seed or 0))[1].values
    if method == "pca":
        return pca_transform(values, params["k"]).scores
    if method == "rp":
        return random_projection(values, params["k"], rng_seed).scores
    if method == "diff":
        return diffusion_map(values, params["knn"], params["k"]).scores
    raise InvalidConfigError(f"unknown method {method!r}")


def score_indices(scores, labels, indices: Sequence[str] = INDICES, max_clusters=50) -> dict:
    """Index values of transformed data; undefined indices map to ``None``."""
    out: dict[str, float | None] = {}
    d = pdist(scores)
    funcs = {"gamma": gamma_index, "silhouette": silhouette_index, "c_index": c_index}
    for name in indices:
        try:
            if name == "f_measure":
                f, k = best_f_measure(scores, labels, max_clusters, WardTree(scores))
                out[name] = f
                out["f_measure_k"] = k
            else:
                out[name] = funcs[name](d, labels, precomputed=True)
        except GuidedProjectionError as exc:
            logger.info("index %s undefined: %s", name, exc)
            out[name] = None
    return out


def _better(index: str, a: float, b: float | None) -> bool:
    if b is None:
        return True
    return a < b if index in MINIMIZED else a > b


@dataclass
class GridResult:
    """Outcome of one grid optimisation.

    ``best[index]`` is ``{"value": ..., "params": ...}``; ``evaluations``
    lists every evaluated point with its index values.
    """

    method: str
    best: dict
    evaluations: list[dict] = field(default_factory=list)


def grid_optimize(X, labels, grid: GridSpec, rng_seed: int = 0) -> GridResult:
    """Evaluate every grid point and keep the best value per index.

    Grid points whose transform fails are skipped and logged. For RP the
    ``rp_repeats`` projections per ``k`` are aggregated by their best or
    mean index value before comparison across ``k``.
    """
    if labels is None:
        raise InvalidConfigError("grid optimisation needs reference labels")
    values = as_matrix(X)
    labels = np.asarray(labels)
    seeds = np.random.SeedSequence([rng_seed, METHODS.index(grid.method)])
    evaluations = []
    for point_id, params in enumerate(grid.points):
        try:
            if grid.method == "rp":
                result = _rp_point(values, labels, grid, params, seeds, point_id)
            else:
                gp_seed = int(seeds.generate_state(1)[0]) if grid.method == "gp" else None
                scores = apply_method(grid.method, values, params, gp_seed)
                result = score_indices(scores, labels, grid.indices, grid.max_clusters)
        except GuidedProjectionError as exc:
            logger.warning("%s %s skipped: %s", grid.method, params, exc)
            continue
        evaluations.append({"params": dict(params), "values": result})

    best = {}
    for index in grid.indices:
        top = None
        for ev in evaluations:
            v = ev["values"].get(index)
            if v is not None and _better(index, v, None if top is None else top["value"]):
                top = {"value": v, "params": dict(ev["params"])}
                if index == "f_measure":
                    top["params"]["clusters"] = ev["values"].get("f_measure_k")
        best[index] = top
    return GridResult(grid.method, best, evaluations)


def _rp_point(values, labels, grid, params, seeds, point_id):
    child = np.random.SeedSequence([int(seeds.generate_state(1)[0]), point_id])
    per_index: dict[str, list] = {name: [] for name in grid.indices}
    for rep_seed in child.spawn(grid.rp_repeats):
        rng = np.random.default_rng(rep_seed)
        scores = random_projection(values, params["k"], rng).scores
        res = score_indices(scores, labels, grid.indices, grid.max_clusters)
        for name in grid.indices:
            if res.get(name) is not None:
                per_index[name].append(res[name])
    out = {}
    for name, vals in per_index.items():
        if not vals:
            out[name] = None
        elif grid.rp_aggregate == "mean":
            out[name] = float(np.mean(vals))
        else:
            out[name] = float(min(vals) if name in MINIMIZED else max(vals))
    return out


@dataclass
class BenchmarkResult:
    """Per-replicate best index values for every method.

    ``rows`` holds one dict per (r, replicate, method, index) with keys
    ``setup, r, replicate, seed, method, index, value, params``.
    """

    setup: int
    rows: list[dict] = field(default_factory=list)
    config: dict = field(default_factory=dict)

    def values(self, r, method, index) -> np.ndarray:
        return np.array([row["value"] for row in self.rows
                         if row["r"] == r and row["method"] == method and row["index"] == index
                         and row["value"] is not None])

    def summary(self) -> list[dict]:
        """Mean and standard error per (r, method, index)."""
        keys = sorted({(row["r"], row["method"], row["index"]) for row in self.rows},
                      key=lambda t: (t[0], METHODS.index(t[1]), INDICES.index(t[2])))
        out = []
        for r, method, index in keys:
            v = self.values(r, method, index)
            se = standard_error(v) if v.size > 1 else None
            out.append({"r": r, "method": method, "index": index, "replicates": int(v.size),
                        "mean": float(v.mean()) if v.size else None, "se": se})
        return out

    def to_csv(self) -> str:
        lines = ["setup,r,replicate,seed,method,index,value,params"]
        for row in self.rows:
            value = "" if row["value"] is None else repr(float(row["value"]))
            params = json.dumps(row["params"], sort_keys=True).replace('"', '""')
            lines.append(f'{row["setup"]},{row["r"]},{row["replicate"]},{row["seed"]},'
                         f'{row["method"]},{row["index"]},{value},"{params}"')
        return "\n".join(lines) + "\n"

    def to_json(self, **extra) -> str:
        doc = {"setup": self.setup, "config": self.config, "summary": self.summary()}
        doc.update(extra)
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def replicate_seed(master: int, setup: int, r: int, replicate: int) -> int:
    return int(np.random.SeedSequence([master, setup, r, replicate]).generate_state(1)[0])


def _run_task(task):
    setup, r, rep, seed, n_per_group, methods, indices, covariance, options = task
    if setup == 1:
        data = gen_setup1(Setup1Spec(r, n_per_group, seed, covariance))
        n_inf = setup1_informative(r)
    else:
        data = gen_setup2(Setup2Spec(r, n_per_group, seed, covariance))
        n_inf = 75
    rows = []
    for method in methods:
        grid = default_grid(method, data.values, n_informative=n_inf, indices=tuple(indices),
                            **options)
        res = grid_optimize(data.values, data.labels, grid, rng_seed=seed)
        for index in indices:
            best = res.best.get(index)
            rows.append({"setup": setup, "r": r, "replicate": rep, "seed": seed,
                         "method": method, "index": index,
                         "value": None if best is None else best["value"],
                         "params": {} if best is None else best["params"]})
    return rows


def run_experiment(
    setup: int,
    r_values: Iterable[int],
    replicates: int = 10,
    seed: int = 42,
    methods: Sequence[str] = METHODS,
    indices: Sequence[str] = INDICES,
    n_per_group: int = 50,
    covariance: str = "eigen",
    n_jobs: int = 1,
    progress: bool = False,
    **grid_options,
) -> BenchmarkResult:
    """Simulate, transform and score replicated data sets.

    Args:
        setup: 1 (two shifted-subspace groups) or 2 (three groups plus noise).
        r_values: Setup parameter values to sweep.
        replicates: Data sets per ``r``.
        seed: Master seed; every replicate draws from a derived stream.
        methods: Subset of ``raw, gp, pca, rp, diff``.
        indices: Subset of ``gamma, silhouette, c_index, f_measure``.
        n_per_group: Observations per group.
        covariance: Random covariance construction for the generators.
        n_jobs: Worker processes; results do not depend on it.
        progress: Print one line per finished replicate to standard error.
        **grid_options: Passed to :func:`default_grid` (e.g. ``rp_repeats``,
            ``max_clusters``, ``resolution``).
    """
    if setup not in (1, 2):
        raise InvalidConfigError(f"setup must be 1 or 2, got {setup}")
    r_values = [int(r) for r in r_values]
    for r in r_values:
        (Setup1Spec if setup == 1 else Setup2Spec)(r, covariance=covariance)
    unknown = set(methods) - set(METHODS)
    if unknown:
        raise InvalidConfigError(f"unknown methods {sorted(unknown)}")
    tasks = [(setup, r, rep, replicate_seed(seed, setup, r, rep), n_per_group,
              tuple(methods), tuple(indices), covariance, dict(grid_options))
             for r in r_values for rep in range(replicates)]

    results = []
    if n_jobs > 1:
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            for task, rows in zip(tasks, pool.map(_run_task, tasks)):
                results.append(rows)
                _report(progress, task, len(results), len(tasks))
    else:
        for task in tasks:
            results.append(_run_task(task))
            _report(progress, task, len(results), len(tasks))

    rows = [row for chunk in results for row in chunk]
    rows.sort(key=lambda row: (row["r"], row["replicate"], METHODS.index(row["method"]),
                               INDICES.index(row["index"])))
    config = {"setup": setup, "r_values": r_values, "replicates": replicates, "seed": seed,
              "methods": list(methods), "indices": list(indices), "n_per_group": n_per_group,
              "covariance": covariance, "grid_options": grid_options}
    return BenchmarkResult(setup, rows, config)


def _report(progress, task, done, total):
    if progress:
        print(f"[{done}/{total}] setup={task[0]} r={task[1]} replicate={task[2]} done",
              file=sys.stderr, flush=True)


def standard_error(values: Sequence[float]) -> float:
    v = np.asarray(values, dtype=float)
    return float(np.std(v, ddof=1) / math.sqrt(v.size))
