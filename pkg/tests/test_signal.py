import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from heterogen import (
    Constant,
    FeatureMatrix,
    GraphSample,
    PolyFilter,
    apply_filter,
    default_dimension,
    rescaled_laplacian_matvec,
    sample_graph,
    sample_white_features,
    validate_dimension,
)
from heterogen.signal import PolynomialRegimeWarning, in_polynomial_regime
from oracles import dense_filter, dense_laplacian
from strategies import graph_and_features

coeff = st.floats(-2, 2, allow_nan=False)


# -- PolyFilter -------------------------------------------------------------------

def test_filter_evaluation():
    f = PolyFilter((1.0, -2.0, 0.5), gain=3.0)
    assert f(2.0) == pytest.approx(3.0 * (1 - 4 + 2))
    assert np.allclose(f(np.array([0.0, 1.0])), [3.0, -1.5])
    assert f.order == 3


def test_filter_validation():
    with pytest.raises(ValueError):
        PolyFilter(())
    with pytest.raises(ValueError):
        PolyFilter((1.0, float("inf")))
    with pytest.raises(ValueError):
        PolyFilter((1.0,), gain=float("nan"))


def test_filter_json_round_trip():
    f = PolyFilter((0.5, -1.0), gain=2.0)
    assert PolyFilter.from_dict(f.to_dict()) == f
    assert PolyFilter.from_dict({"coeffs": [1.0]}).gain == 1.0


@given(st.lists(coeff, min_size=1, max_size=5), st.floats(-3, 3), st.floats(0, 2))
def test_heterophily_polynomial(coeffs, gain, lam):
    f = PolyFilter(tuple(coeffs), gain)
    P = np.polynomial.polynomial.polyval(lam, f.heterophily_polynomial())
    assert P == pytest.approx(lam * f(lam) ** 2, rel=1e-9, abs=1e-9)


# -- white features ------------------------------------------------------------------

def test_white_features_row_norms():
    X = sample_white_features(1000, 1000, 3)
    assert abs(np.mean(np.sum(X.values**2, axis=1)) - 1.0) <= 0.05


def test_white_features_shape_and_determinism():
    X = sample_white_features(2, 1, 9)
    assert X.shape == (2, 1)
    assert sample_white_features(50, 7, 4) == sample_white_features(50, 7, 4)
    assert sample_white_features(50, 7, 4) != sample_white_features(50, 7, 5)


def test_white_features_variance():
    d = 64
    X = sample_white_features(4000, d, 1).values
    assert np.var(X) * d == pytest.approx(1.0, abs=0.02)
    assert abs(np.mean(X)) < 0.005


@pytest.mark.parametrize("n,d", [(0, 3), (3, 0)])
def test_white_features_rejects_empty(n, d):
    with pytest.raises(ValueError):
        sample_white_features(n, d, 0)


# -- dimension policy ----------------------------------------------------------------

def test_default_dimension():
    assert default_dimension(500) == 500
    with pytest.raises(ValueError):
        default_dimension(10, alpha=1.0)


def test_validate_dimension():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert validate_dimension(100, 10, 2.0) == 10
    with pytest.warns(PolynomialRegimeWarning):
        assert validate_dimension(1000, 2, 2.0) == 2


@given(st.integers(1, 10**6), st.floats(1.01, 5))
def test_default_dimension_in_regime(n, alpha):
    assert in_polynomial_regime(n, default_dimension(n, alpha), alpha)


# -- Laplacian matvec ----------------------------------------------------------------

def test_matvec_examples(k3, empty10):
    assert np.array_equal(rescaled_laplacian_matvec(k3, np.ones(3)), np.zeros(3))
    path = GraphSample.from_edges(2, [[0, 1]])
    assert rescaled_laplacian_matvec(path, np.array([1.0, 0.0])).tolist() == [0.5, -0.5]
    v = np.random.default_rng(0).standard_normal(10)
    assert np.array_equal(rescaled_laplacian_matvec(empty10, v), np.zeros(10))


def test_matvec_length_mismatch(k3):
    with pytest.raises(ValueError):
        rescaled_laplacian_matvec(k3, np.ones(4))


@given(graph_and_features())
def test_matvec_matches_dense(gx):
    s, X = gx
    L = dense_laplacian(s.n, s.edges()) / s.n
    assert np.allclose(rescaled_laplacian_matvec(s, X), L @ X, rtol=0, atol=1e-12)


# -- apply_filter --------------------------------------------------------------------

def test_identity_filter_is_exact():
    s = sample_graph(Constant(0.4), 30, 1)
    X0 = sample_white_features(30, 5, 2)
    assert np.array_equal(apply_filter(PolyFilter((1.0,)), s, X0).values, X0.values)


def test_lambda_filter_kills_constants(k3):
    X0 = np.tile([[1.5, -2.0]], (3, 1))
    assert np.allclose(apply_filter(PolyFilter((0.0, 1.0)), k3, X0).values, 0.0, atol=1e-15)


def test_one_plus_lambda_matches_dense():
    s = GraphSample.from_edges(4, [[0, 1], [1, 2], [1, 3]])
    X0 = np.random.default_rng(5).standard_normal((4, 3))
    L = dense_laplacian(4, s.edges()) / 4
    expected = (np.eye(4) + L) @ X0
    got = apply_filter(PolyFilter((1.0, 1.0)), s, X0).values
    assert np.max(np.abs(got - expected)) <= 1e-12


@given(graph_and_features(), st.lists(coeff, min_size=1, max_size=5), st.floats(-2, 2))
def test_filter_matches_dense_oracle(gx, coeffs, gain):
    s, X = gx
    L = dense_laplacian(s.n, s.edges()) / s.n
    expected = dense_filter(coeffs, L, gain) @ X
    got = apply_filter(PolyFilter(tuple(coeffs), gain), s, X).values
    assert np.allclose(got, expected, rtol=1e-10, atol=1e-10)


def test_shape_mismatch(k3):
    with pytest.raises(ValueError):
        apply_filter(PolyFilter((1.0,)), k3, np.ones((4, 2)))


@given(graph_and_features(), st.lists(coeff, min_size=1, max_size=4), st.floats(-3, 3), st.floats(-3, 3))
def test_linearity(gx, coeffs, a, b):
    s, X = gx
    Y = np.roll(X, 1, axis=0) - 0.5
    f = PolyFilter(tuple(coeffs))
    lhs = apply_filter(f, s, a * X + b * Y).values
    rhs = a * apply_filter(f, s, X).values + b * apply_filter(f, s, Y).values
    assert np.allclose(lhs, rhs, rtol=1e-10, atol=1e-10)


@given(graph_and_features(), st.lists(coeff, min_size=1, max_size=4), st.floats(-3, 3))
def test_gain_homogeneity(gx, coeffs, g):
    s, X = gx
    base = apply_filter(PolyFilter(tuple(coeffs)), s, X).values
    scaled = apply_filter(PolyFilter(tuple(coeffs), g), s, X).values
    assert np.allclose(scaled, g * base, rtol=1e-12, atol=1e-12)


@given(graph_and_features())
def test_composition(gx):
    s, X = gx
    shift = PolyFilter((0.0, 1.0))
    twice = apply_filter(shift, s, apply_filter(shift, s, X))
    once = apply_filter(PolyFilter((0.0, 0.0, 1.0)), s, X)
    assert np.allclose(twice.values, once.values, rtol=1e-10, atol=1e-10)


@given(graph_and_features(max_d=6), st.lists(coeff, min_size=1, max_size=4), st.randoms())
def test_column_permutation_commutes(gx, coeffs, rnd):
    s, X = gx
    perm = list(range(X.shape[1]))
    rnd.shuffle(perm)
    f = PolyFilter(tuple(coeffs))
    assert np.array_equal(apply_filter(f, s, X[:, perm]).values, apply_filter(f, s, X).values[:, perm])


def test_feature_matrix_validation():
    with pytest.raises(ValueError):
        FeatureMatrix(np.ones(3))
    with pytest.raises(ValueError):
        FeatureMatrix(np.array([[1.0, np.nan]]))
