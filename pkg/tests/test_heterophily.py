import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from heterogen import (
    Constant,
    GraphSample,
    Parametric,
    PolyFilter,
    StepFunction,
    apply_filter,
    degree_moment,
    empirical_heterophily,
    empirical_heterophily_edge_sum,
    expected_heterophily_eigen,
    expected_heterophily_trace,
    sample_graph,
    sample_white_features,
    spectral_moment,
)
from heterogen.errors import ConsistencyError, EigensolverCapError
from heterogen.heterophily import (
    HeterophilyReport,
    expected_heterophily,
    heterophily_report,
    laplacian_spectrum,
    polynomial_trace,
)
from oracles import complete, dense_laplacian, heterophily_pairs, mu_dense, random_edges
from strategies import graph_and_features

ONE = PolyFilter((1.0,))
LAM = PolyFilter((0.0, 1.0))


# -- empirical heterophily ----------------------------------------------------

def test_trace_form_examples(k2, empty10):
    X = np.tile([[0.3, -1.0, 2.0]], (10, 1))
    assert empirical_heterophily(sample_graph(Constant(0.6), 10, 1), X) == 0.0
    assert empirical_heterophily(empty10, np.random.default_rng(1).standard_normal((10, 3))) == 0.0
    assert empirical_heterophily(k2, np.array([[1.0], [-1.0]])) == 1.0


def test_edge_sum_examples(k2, k3, star3):
    assert empirical_heterophily_edge_sum(k2, np.array([[1.0], [-1.0]])) == 1.0
    assert empirical_heterophily_edge_sum(k3, np.tile([[1.0, 0.0]], (3, 1))) == 0.0
    assert empirical_heterophily_edge_sum(star3, np.array([[0.0], [1.0], [1.0], [1.0]])) == 0.1875


def test_star_trace_form(star3):
    assert empirical_heterophily(star3, np.array([[0.0], [1.0], [1.0], [1.0]])) == pytest.approx(0.1875, rel=1e-15)


@given(graph_and_features())
def test_both_forms_match_pair_enumeration(gx):
    s, X = gx
    ref = heterophily_pairs(s.n, s.edges(), X)
    assert empirical_heterophily(s, X) == pytest.approx(ref, rel=1e-10, abs=1e-12)
    assert empirical_heterophily_edge_sum(s, X) == pytest.approx(ref, rel=1e-10, abs=1e-12)


def test_formula_equivalence_random_pairs():
    rng = np.random.default_rng(2024)
    for _ in range(100):
        n = int(rng.integers(2, 120))
        s = GraphSample.from_edges(n, random_edges(n, rng.random(), rng))
        X = rng.standard_normal((n, int(rng.integers(1, 40))))
        a, b = empirical_heterophily(s, X), empirical_heterophily_edge_sum(s, X)
        assert abs(a - b) / max(a, 1e-15) <= 1e-10


def test_edge_sum_chunking_is_invisible():
    s = sample_graph(Constant(0.5), 80, 3)
    X = sample_white_features(80, 9, 4).values
    assert empirical_heterophily_edge_sum(s, X, chunk=7) == pytest.approx(
        empirical_heterophily_edge_sum(s, X), rel=1e-13)


def test_shape_mismatch(k3):
    with pytest.raises(ValueError):
        empirical_heterophily(k3, np.ones((2, 1)))
    with pytest.raises(ValueError):
        empirical_heterophily_edge_sum(k3, np.ones((4, 1)))


# -- expected heterophily ---------------------------------------------------------

def test_expected_trace_examples(k2, empty10):
    assert expected_heterophily_trace(empty10, PolyFilter((1.0, 2.0))) == 0.0
    assert expected_heterophily_trace(k2, ONE) == 0.5
    assert expected_heterophily_trace(sample_graph(Constant(0.5), 20, 0), PolyFilter((0.0,))) == 0.0


def test_expected_eigen_examples(k2, k4, empty10):
    assert expected_heterophily_eigen(k2, ONE) == pytest.approx(0.5, rel=1e-14)
    assert expected_heterophily_eigen(empty10, PolyFilter((3.0, 1.0))) == 0.0
    assert expected_heterophily_eigen(k4, LAM) == pytest.approx(0.75, rel=1e-14)
    assert expected_heterophily_trace(k4, LAM) == pytest.approx(0.75, rel=1e-14)


@given(graph_and_features(max_n=10), st.lists(st.floats(-2, 2), min_size=1, max_size=4), st.floats(-2, 2))
def test_expected_routes_match_dense_oracle(gx, coeffs, gain):
    s, _ = gx
    f = PolyFilter(tuple(coeffs), gain)
    ref = mu_dense(s.n, s.edges(), coeffs, gain)
    assert expected_heterophily_trace(s, f) == pytest.approx(ref, rel=1e-9, abs=1e-12)
    assert expected_heterophily_eigen(s, f) == pytest.approx(ref, rel=1e-9, abs=1e-12)


def test_trace_block_size_is_invisible():
    s = sample_graph(StepFunction([0.3, 0.7], [[0.9, 0.1], [0.1, 0.4]]), 90, 8)
    f = PolyFilter((1.0, -0.5, 0.25))
    assert expected_heterophily_trace(s, f, block=7) == pytest.approx(
        expected_heterophily_trace(s, f), rel=1e-13)


def test_oracle_equivalence_random_graphs():
    rng = np.random.default_rng(77)
    for t in range(20):
        n = int(rng.integers(20, 200))
        s = sample_graph(Constant(float(rng.random())), n, t)
        f = PolyFilter(tuple(rng.uniform(-1, 1, size=int(rng.integers(1, 6)))))
        a, b = expected_heterophily_trace(s, f), expected_heterophily_eigen(s, f)
        assert abs(a - b) <= 1e-8 * max(abs(b), 1e-15)


def test_hutchinson_is_close():
    s = sample_graph(Constant(0.4), 300, 1)
    f = PolyFilter((1.0, 1.0))
    exact = expected_heterophily_trace(s, f)
    approx = expected_heterophily_trace(s, f, method="hutchinson", probes=200, seed=3)
    assert approx == pytest.approx(exact, rel=0.05)
    with pytest.raises(ValueError):
        expected_heterophily_trace(s, f, method="magic")


def test_gain_quadratic_law():
    s = sample_graph(Parametric("logistic", {"c": 2.0}), 120, 4)
    f = PolyFilter((0.5, -1.0, 2.0))
    for g in (0.1, 1.7, -3.0):
        assert expected_heterophily_trace(s, f.with_gain(g)) == pytest.approx(
            g**2 * expected_heterophily_trace(s, f), rel=1e-12)


def test_eigen_cap(k3):
    big = sample_graph(Constant(0.0), 60, 0)
    with pytest.raises(EigensolverCapError, match="expected_heterophily_trace"):
        expected_heterophily_eigen(big, ONE, cap=50)


def test_dispatcher_uses_trace_route_above_threshold(monkeypatch):
    import heterogen.heterophily as mod

    s = sample_graph(Constant(0.5), 40, 1)
    monkeypatch.setattr(mod, "EIGEN_ROUTE_MAX_N", 10)
    monkeypatch.setattr(mod, "expected_heterophily_eigen", lambda *a, **k: pytest.fail("eigen route used"))
    assert expected_heterophily(s, ONE) == pytest.approx(expected_heterophily_trace(s, ONE))


# -- spectrum and moments ---------------------------------------------------------

@pytest.mark.parametrize("g", [Constant(0.9), Constant(1.0), StepFunction([0.5, 0.5], [[0.0, 1.0], [1.0, 0.0]]),
                               Parametric("gaussian", {"width": 0.1})])
def test_spectrum_in_range(g):
    lam = laplacian_spectrum(sample_graph(g, 150, 5))
    assert lam[0] >= -1e-9 and lam[-1] <= 2 + 1e-9


def test_complete_graph_spectrum():
    lam = laplacian_spectrum(complete(6))
    assert np.allclose(lam, [0, 1, 1, 1, 1, 1], atol=1e-12)


def test_spectral_moment_examples(k2, empty10):
    s = sample_graph(Constant(0.3), 40, 2)
    assert spectral_moment(s, 1) == pytest.approx(2 * s.num_edges / 40**2, rel=1e-14)
    assert spectral_moment(k2, 2) == pytest.approx(0.5, rel=1e-14)
    for m in (1, 2, 3):
        assert spectral_moment(empty10, m) == 0.0


def test_spectral_moment_matches_eigenvalues():
    s = sample_graph(StepFunction([0.5, 0.5], [[0.8, 0.2], [0.2, 0.8]]), 100, 3)
    lam = laplacian_spectrum(s)
    for m in (1, 2, 3, 4):
        assert spectral_moment(s, m) == pytest.approx(np.mean(lam**m), rel=1e-10)


def test_degree_moment_examples(k2, k4, empty10):
    assert degree_moment(k4, 1) == 0.75
    assert degree_moment(empty10, 2) == 0.0
    assert degree_moment(k2, 3) == 0.125


def test_moment_order_validation(k2):
    with pytest.raises(ValueError):
        spectral_moment(k2, 0)
    with pytest.raises(ValueError):
        degree_moment(k2, 0)


@given(graph_and_features(max_n=25), st.integers(1, 3))
def test_moment_gap_hard_bound(gx, m):
    s, _ = gx
    gap = spectral_moment(s, m) - degree_moment(s, m)
    assert abs(gap) <= (2**m - 1) / s.n + 1e-15


def test_polynomial_trace_dense():
    s = sample_graph(Constant(0.5), 30, 9)
    L = dense_laplacian(30, s.edges()) / 30
    c = [0.3, -1.0, 0.0, 2.0]
    ref = np.trace(c[0] * np.eye(30) - L + 2 * L @ L @ L) / 30
    assert polynomial_trace(s, c) == pytest.approx(ref, rel=1e-12)


# -- nonnegativity / report ----------------------------------------------------------

@given(graph_and_features(), st.lists(st.floats(-2, 2), min_size=1, max_size=4))
def test_nonnegativity(gx, coeffs):
    s, X = gx
    f = PolyFilter(tuple(coeffs))
    Y = apply_filter(f, s, X)
    assert empirical_heterophily(s, Y) >= 0
    assert empirical_heterophily_edge_sum(s, Y) >= 0
    assert expected_heterophily_trace(s, f) >= 0
    assert expected_heterophily_eigen(s, f) >= 0


def test_large_negative_rounding_raises(monkeypatch):
    import heterogen.heterophily as mod

    s = sample_graph(Constant(0.5), 10, 0)
    monkeypatch.setattr(mod, "rescaled_laplacian_matvec", lambda s, X: -np.asarray(X))
    with pytest.raises(ConsistencyError):
        mod.empirical_heterophily(s, np.ones((10, 1)))


def test_report_json():
    g = Constant(0.5)
    s = sample_graph(g, 50, 1)
    X = apply_filter(ONE, s, sample_white_features(50, 50, 2))
    rep = heterophily_report(g, s, X, ONE, seed_features=2)
    doc = rep.to_dict()
    for key in ("h_empirical", "mu_n", "h_limit", "n", "d", "seed_graph", "seed_features", "version", "timestamp"):
        assert key in doc
    assert doc["h_limit"] == 0.5 and doc["n"] == 50 and doc["seed_graph"] == 1
    with pytest.raises(ConsistencyError):
        HeterophilyReport(-1.0, 0.0, 0.0, 1, 1)
