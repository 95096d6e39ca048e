import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.cluster.hierarchy import fcluster, linkage
from scipy.spatial.distance import pdist, squareform

import oracles
from guidedproj.errors import InvalidConfigError, InvalidDataError, UndefinedIndexError
from guidedproj.validity import (
    WardTree,
    best_f_measure,
    c_index,
    evaluate,
    f_measure,
    gamma_index,
    silhouette_index,
    ward_cluster,
)

LINE = np.array([[0.0], [1.0], [10.0], [11.0]])


def same_partition(a, b):
    a, b = np.asarray(a), np.asarray(b)
    return np.array_equal(a[:, None] == a[None, :], b[:, None] == b[None, :])


def test_four_point_examples():
    good = [0, 0, 1, 1]
    assert gamma_index(LINE, good) == 1.0
    assert c_index(LINE, good) == 0.0
    pts = LINE.tolist()
    assert silhouette_index(LINE, good) == pytest.approx(oracles.silhouette(pts, good), abs=1e-12)
    # hand value: a = 1, b = 9.5 or 10.5 -> s = 1 - a/b
    hand = np.mean([1 - 1 / 10.5, 1 - 1 / 9.5, 1 - 1 / 9.5, 1 - 1 / 10.5])
    assert silhouette_index(LINE, good) == pytest.approx(hand, abs=1e-12)
    crossed = [0, 1, 0, 1]
    assert gamma_index(LINE, crossed) == pytest.approx(oracles.gamma(pts, crossed), abs=1e-12)
    worst = [0, 1, 1, 0]
    assert c_index(LINE, worst) == pytest.approx(oracles.c_index(pts, worst), abs=1e-12)


def test_random_eight_point_instances_match_enumeration():
    rng = np.random.default_rng(2024)
    for _ in range(100):
        X = rng.normal(size=(8, 3))
        y = rng.permutation([0] * 4 + [1] * 4) if rng.random() < 0.5 else rng.integers(0, 2, 8)
        if len(set(y)) < 2:
            y[0] = 1 - y[1]
        pts, lab = X.tolist(), y.tolist()
        assert abs(gamma_index(X, y) - oracles.gamma(pts, lab)) <= 1e-12
        assert abs(silhouette_index(X, y) - oracles.silhouette(pts, lab)) <= 1e-12
        assert abs(c_index(X, y) - oracles.c_index(pts, lab)) <= 1e-12


def test_gamma_ties_are_excluded():
    # within {1, 1}, between {1, 2, 2, 3}: the two within-between ties count for neither side
    X = np.array([[0.0], [1.0], [2.0], [3.0]])
    y = [0, 0, 1, 1]
    assert gamma_index(X, y) == pytest.approx(oracles.gamma(X.tolist(), y), abs=1e-12)


def test_degenerate_inputs():
    same = np.zeros((4, 2))
    with pytest.raises(UndefinedIndexError):
        gamma_index(same, [0, 0, 1, 1])
    with pytest.raises(UndefinedIndexError):
        c_index(same, [0, 0, 1, 1])
    with pytest.raises(InvalidConfigError):
        silhouette_index(LINE, [0, 0, 0, 0])
    with pytest.raises(InvalidDataError):
        gamma_index(LINE, [0, 1])


def test_silhouette_conventions():
    # singleton cluster scores 0
    y = [0, 0, 0, 1]
    s = silhouette_index(LINE, y)
    assert s == pytest.approx(oracles.silhouette(LINE.tolist(), y), abs=1e-12)
    # coincident clusters on one point: a = b = 0 for every observation
    assert silhouette_index(np.ones((6, 2)), [0, 0, 0, 1, 1, 1]) == 0.0


def test_f_measure_examples():
    truth = [0, 0, 1, 1]
    assert f_measure(truth, truth) == 1.0
    assert f_measure([5, 5, 5, 5], truth) == pytest.approx(2 / 3, abs=1e-12)
    assert f_measure([1, 1, 0, 0], truth) == 1.0
    with pytest.raises(InvalidDataError):
        f_measure([0, 1], truth)


@given(st.lists(st.integers(0, 3), min_size=6, max_size=20), st.randoms(use_true_random=False))
@settings(max_examples=50, deadline=None)
def test_indices_invariant_to_order_and_renaming(labels, rnd):
    if len(set(labels)) < 2:
        labels = labels[:-1] + [(labels[-1] + 1) % 4]
    n = len(labels)
    rng = np.random.default_rng(rnd.randint(0, 2**31))
    X = rng.normal(size=(n, 3))
    y = np.array(labels)
    perm = rng.permutation(n)
    renamed = (y + 7) * 3
    for fn in (gamma_index, c_index, silhouette_index):
        try:
            ref = fn(X, y)
        except (UndefinedIndexError, InvalidConfigError):
            continue
        assert fn(X[perm], y[perm]) == pytest.approx(ref, abs=1e-12)
        assert fn(X, renamed) == pytest.approx(ref, abs=1e-12)
    assert f_measure(y, renamed) == pytest.approx(1.0, abs=1e-12)


def test_precomputed_distances_agree():
    rng = np.random.default_rng(8)
    X = rng.normal(size=(30, 5))
    y = rng.integers(0, 3, 30)
    D = squareform(pdist(X))
    for fn in (gamma_index, c_index, silhouette_index):
        assert abs(fn(D, y, precomputed=True) - fn(X, y)) <= 1e-12
        assert abs(fn(pdist(X), y, precomputed=True) - fn(X, y)) <= 1e-12


def test_ward_recovers_three_line_groups_like_exhaustive_search():
    X = np.array([0, 0.1, 0.05, 10, 10.1, 10.05, 20, 20.1, 20.05])[:, None]
    pts = X.tolist()
    best = min(oracles.partitions(9, 3), key=lambda lab: oracles.ward_objective(pts, lab))
    labels = ward_cluster(X, 3)
    assert same_partition(labels, best)
    assert same_partition(labels, [0, 0, 0, 1, 1, 1, 2, 2, 2])


def test_ward_extreme_cuts():
    X = np.random.default_rng(0).normal(size=(7, 2))
    tree = WardTree(X)
    assert len(set(tree.labels(7))) == 7
    assert set(tree.labels(1)) == {0}
    with pytest.raises(InvalidConfigError):
        tree.labels(8)


def test_ward_matches_scipy_linkage():
    rng = np.random.default_rng(12)
    for _ in range(10):
        X = rng.normal(size=(40, 4))
        X[:20] += 2
        tree = WardTree(X)
        Z = linkage(X, "ward")
        np.testing.assert_allclose(np.sort(tree.heights), np.sort(Z[:, 2] ** 2), rtol=1e-9)
        for k in (2, 3, 5, 10):
            assert same_partition(tree.labels(k), fcluster(Z, k, "maxclust"))


def test_best_f_measure_sweep():
    X = np.array([0, 0.1, 0.05, 10, 10.1, 10.05, 20, 20.1, 20.05])[:, None]
    truth = np.repeat([0, 1, 2], 3)
    assert best_f_measure(X, truth) == (1.0, 3)


def test_noise_columns_do_not_raise_gamma():
    ok = 0
    for s in range(10):
        rng = np.random.default_rng(500 + s)
        base = np.vstack([rng.normal(size=(20, 3)), rng.normal(size=(20, 3)) + 6])
        y = np.repeat([0, 1], 20)
        values = []
        for extra in (0, 20, 60, 150):
            X = np.hstack([base, rng.normal(size=(40, extra))]) if extra else base
            values.append(gamma_index(X, y))
        ok += all(b <= a + 1e-12 for a, b in zip(values, values[1:]))
    assert ok >= 9


def test_evaluate_report_ranges():
    rng = np.random.default_rng(1)
    X = np.vstack([rng.normal(size=(15, 4)), rng.normal(size=(15, 4)) + 3])
    y = np.repeat(["a", "b"], 15)
    rep = evaluate(X, y, method="raw", parameters={"k": 1})
    d = rep.to_dict()
    assert -1 <= d["gamma"] <= 1 and -1 <= d["silhouette"] <= 1
    assert 0 <= d["c_index"] <= 1 and 0 <= d["f_measure"] <= 1
    assert d["method"] == "raw" and d["parameters"] == {"k": 1}
