import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from guidedproj.errors import DegenerateSelectionError, InvalidDataError, InvalidSelectionError
from guidedproj.projection import OSDKind, fit_projection, orthogonal_distance, osd, score_distance


def random_data(seed, n=20, p=15):
    return np.random.default_rng(seed).normal(size=(n, p))


def test_full_rank_selection_has_rank_q_minus_one():
    X = random_data(0, n=3, p=5)
    P = fit_projection(X, [0, 1, 2])
    assert P.effective_rank == 2
    assert np.all(np.diff(P.singular_values) <= 0)
    assert np.all(P.singular_values > 0)


def test_identical_rows_are_degenerate():
    X = np.tile(np.arange(6.0), (4, 1))
    with pytest.raises(DegenerateSelectionError):
        fit_projection(X, [0, 1, 2, 3])


def test_constant_column_gets_unit_scale():
    X = random_data(1, n=10, p=4)
    X[:, 2] = 3.5
    P = fit_projection(X, range(10))
    assert P.sigma_hat[2] == 1.0
    assert np.all(np.isfinite(P.basis))
    assert np.all(P.orthogonal_distance(X) <= 1e-8)


@pytest.mark.parametrize("sel", [[0], [1, 1], [0, 99]])
def test_bad_selections(sel):
    with pytest.raises(InvalidSelectionError):
        fit_projection(random_data(2), sel)


def test_non_finite_input_rejected():
    X = random_data(3)
    X[4, 4] = np.nan
    with pytest.raises(InvalidDataError):
        fit_projection(X, [0, 1, 2])


def test_length_mismatch_rejected():
    P = fit_projection(random_data(4), range(5))
    with pytest.raises(InvalidDataError):
        orthogonal_distance(P, np.zeros(3))


def test_selected_rows_have_zero_od_and_fixed_sd():
    X = random_data(5, n=30, p=40)
    P = fit_projection(X, range(10))
    assert np.max(P.orthogonal_distance(X[:10])) <= 1e-8
    np.testing.assert_allclose(P.score_distance(X[:10]), 9 / np.sqrt(10), atol=1e-8)
    assert 9 / np.sqrt(10) == pytest.approx(2.846050, abs=1e-6)


def test_location_has_zero_distances():
    P = fit_projection(random_data(6), range(6))
    assert orthogonal_distance(P, P.mu_hat) == 0
    assert score_distance(P, P.mu_hat) == 0


def test_orthogonal_complement_offset():
    P = fit_projection(random_data(7), range(6))
    rng = np.random.default_rng(0)
    w = rng.normal(size=P.p)
    w -= P.basis @ (P.basis.T @ w)
    w *= 3 / np.linalg.norm(w)
    x = P.mu_hat + P.sigma_hat * w
    assert orthogonal_distance(P, x) == pytest.approx(3.0, abs=1e-10)


def test_score_distance_matches_explicit_inverse():
    X = random_data(8, n=25, p=30)
    sel = list(range(3, 13))
    P = fit_projection(X, sel)
    Z = (X[sel] - P.mu_hat) / P.sigma_hat
    T = (P.basis.T @ Z.T).T
    cov = T.T @ T / (len(sel) - 1)
    inv = np.linalg.inv(cov)
    for x in np.random.default_rng(1).normal(size=(20, 30)):
        t = P.basis.T @ ((x - P.mu_hat) / P.sigma_hat)
        brute = np.sqrt(t @ inv @ t)
        assert score_distance(P, x) == pytest.approx(brute, rel=1e-8)


def test_projected_covariance_is_diagonal():
    X = random_data(9, n=25, p=30)
    P = fit_projection(X, range(8))
    cov = P.projected_covariance(X[:8])
    np.testing.assert_allclose(cov, np.diag(P.singular_values**2) / 7, atol=1e-10)


def test_osd_kinds():
    X = random_data(10)
    P = fit_projection(X, range(6))
    Y = np.random.default_rng(2).normal(size=(100, X.shape[1]))
    np.testing.assert_array_equal(osd(P, Y), P.orthogonal_distance(Y))
    assert osd(P, X[0], OSDKind.OD) <= 1e-8
    assert osd(P, P.mu_hat, "sd") == 0
    mixed = osd(P, Y, "normalized-sum", od_scale=2.0, sd_scale=4.0)
    np.testing.assert_allclose(mixed, P.orthogonal_distance(Y) / 2 + P.score_distance(Y) / 4)


def test_basis_orthonormal_and_signs_fixed():
    X = random_data(11, n=20, p=50)
    P = fit_projection(X, range(12))
    np.testing.assert_allclose(P.basis.T @ P.basis, np.eye(P.effective_rank), atol=1e-10)
    top = P.basis[np.argmax(np.abs(P.basis), axis=0), np.arange(P.effective_rank)]
    assert np.all(top > 0)
    again = fit_projection(X.copy(), range(12))
    np.testing.assert_array_equal(P.basis, again.basis)


def test_rank_truncation_for_collinear_selection():
    rng = np.random.default_rng(12)
    base = rng.normal(size=(2, 10))
    coef = rng.normal(size=(6, 2))
    X = coef @ base
    P = fit_projection(X, range(6))
    assert P.effective_rank < 5
    assert np.all(P.orthogonal_distance(X) <= 1e-8)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), q=st.integers(2, 12), p=st.integers(13, 40))
def test_pythagoras_and_identities(seed, q, p):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(q + 5, p)) * rng.uniform(0.1, 10, size=p)
    P = fit_projection(X, range(q))
    x = rng.normal(size=p) * 5
    z = P.standardize(x)
    od = P.orthogonal_distance(x)
    proj = np.linalg.norm(P.basis.T @ z)
    assert z @ z == pytest.approx(od**2 + proj**2, rel=1e-8)
    assert np.max(P.orthogonal_distance(X[:q])) <= 1e-8
    if P.effective_rank == q - 1:
        np.testing.assert_allclose(P.score_distance(X[:q]), (q - 1) / np.sqrt(q), atol=1e-8)
