"""Feature heterophily, its spectral expectation, and moment diagnostics.

Two independent routes are provided for each quantity so that one can serve
as an oracle for the other:

* empirical heterophily: trace form ``Tr(L_n X X^T) / n`` and the edge sum
  ``sum_{u<v in E} ||X_u - X_v||^2 / n^2``;
* spectral expectation ``mu_n = Tr(f(L_n) L_n f(L_n)) / n``: matvec chains
  on basis vectors and a dense eigendecomposition.
"""

from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass
from datetime import datetime, timezone

import numpy as np
from numpy.polynomial import polynomial as npoly

from . import __version__
from ._rng import make_rng
from .errors import ConsistencyError, EigensolverCapError
from .graphon import GraphSample
from .signal import FeatureMatrix, PolyFilter, _as_array, apply_filter, rescaled_laplacian_matvec

log = logging.getLogger(__name__)

EIGEN_CAP = 4000
EIGEN_ROUTE_MAX_N = 2000
NEG_CLAMP = 1e-9
SPECTRUM_TOL = 1e-9
_BLOCK = 256


def _nonneg(value: float, what: str) -> float:
    if value < -NEG_CLAMP:
        raise ConsistencyError(f"{what} = {value!r} is negative beyond rounding")
    return max(float(value), 0.0)


def _check_features(s: GraphSample, X) -> np.ndarray:
    X = _as_array(X)
    if X.ndim != 2 or X.shape[0] != s.n:
        raise ValueError(f"shape mismatch: graph has {s.n} nodes, features have shape {X.shape}")
    return X


def empirical_heterophily(s: GraphSample, X) -> float:
    """``h = Tr(L_n X X^T) / n`` as a sum of column quadratic forms."""
    X = _check_features(s, X)
    value = np.sum(X * rescaled_laplacian_matvec(s, X)) / s.n
    return _nonneg(value, "heterophily")


def empirical_heterophily_edge_sum(s: GraphSample, X, *, chunk: int = 1 << 22) -> float:
    """``h = sum over unordered edges ||X_u - X_v||^2 / n^2``."""
    X = _check_features(s, X)
    e = s.edges()
    rows = max(1, chunk // max(X.shape[1], 1))
    total = 0.0
    for start in range(0, e.shape[0], rows):
        u, v = e[start:start + rows].T
        diff = X[u] - X[v]
        total += float(np.sum(diff * diff))
    return total / s.n**2


def polynomial_trace(s: GraphSample, coeffs, *, block: int = _BLOCK) -> float:
    """``Tr(P(L_n)) / n`` for ``P(t) = sum_k coeffs[k] t**k``, exactly.

    Columns of the identity are pushed through ``L_n`` in blocks and only
    the diagonal entries of each power are kept.
    """
    coeffs = np.atleast_1d(np.asarray(coeffs, dtype=float))
    n = s.n
    total = 0.0
    for start in range(0, n, block):
        idx = np.arange(start, min(start + block, n))
        V = np.zeros((n, idx.size))
        V[idx, np.arange(idx.size)] = 1.0
        for k, c in enumerate(coeffs):
            if k:
                V = rescaled_laplacian_matvec(s, V)
            if c:
                total += c * float(np.sum(V[idx, np.arange(idx.size)]))
    return total / n


def expected_heterophily_trace(
    s: GraphSample,
    f: PolyFilter,
    *,
    method: str = "exact",
    probes: int = 64,
    seed: int = 0,
    block: int = _BLOCK,
) -> float:
    """``mu_n = Tr(f(L_n) L_n f(L_n)) / n`` without eigenvalues.

    ``method="exact"`` sums ``y_i^T L_n y_i`` with ``y_i = f(L_n) e_i`` over
    all basis vectors, which costs ``O(K n |E|)``. ``method="hutchinson"``
    replaces the basis with Rademacher probes; the result is then only an
    unbiased estimate and is logged as approximate.
    """
    n = s.n
    if method == "exact":
        total = 0.0
        for start in range(0, n, block):
            idx = np.arange(start, min(start + block, n))
            E = np.zeros((n, idx.size))
            E[idx, np.arange(idx.size)] = 1.0
            Y = apply_filter(f, s, E).values
            total += float(np.sum(Y * rescaled_laplacian_matvec(s, Y)))
        return _nonneg(total / n, "mu_n")
    if method == "hutchinson":
        log.info("hutchinson estimate of mu_n with %d probes is approximate", probes)
        Z = make_rng(seed).choice([-1.0, 1.0], size=(n, probes))
        Y = apply_filter(f, s, Z).values
        return max(float(np.sum(Y * rescaled_laplacian_matvec(s, Y))) / (probes * n), 0.0)
    raise ValueError(f"unknown method {method!r}")


def laplacian_spectrum(s: GraphSample, *, cap: int = EIGEN_CAP) -> np.ndarray:
    """Eigenvalues of ``L_n`` in ascending order (dense solver)."""
    if s.n > cap:
        raise EigensolverCapError(
            f"n={s.n} exceeds the dense eigensolver cap {cap}; use expected_heterophily_trace")
    lam = np.linalg.eigvalsh(s.laplacian.toarray() / s.n)
    if lam.size and (lam[0] < -SPECTRUM_TOL or lam[-1] > 2.0 + SPECTRUM_TOL):
        raise ConsistencyError(f"rescaled Laplacian spectrum [{lam[0]}, {lam[-1]}] leaves [0, 2]")
    return lam


def expected_heterophily_eigen(s: GraphSample, f: PolyFilter, *, cap: int = EIGEN_CAP) -> float:
    """``mu_n = mean_i lam_i f(lam_i)^2`` from a dense eigendecomposition."""
    lam = laplacian_spectrum(s, cap=cap)
    return _nonneg(float(np.mean(lam * f(lam) ** 2)), "mu_n")


def expected_heterophily(s: GraphSample, f: PolyFilter) -> float:
    """Eigen route up to ``EIGEN_ROUTE_MAX_N`` nodes, exact trace route above."""
    if s.n <= EIGEN_ROUTE_MAX_N:
        return expected_heterophily_eigen(s, f)
    return expected_heterophily_trace(s, f)


def spectral_moment(s: GraphSample, m: int) -> float:
    """``mean_i lam_i**m = Tr((D - A)**m) / n**(m+1)``."""
    if m < 1:
        raise ValueError("moment order must be >= 1")
    return polynomial_trace(s, npoly.polypow([0.0, 1.0], m))


def degree_moment(s: GraphSample, m: int) -> float:
    """``mean_i (d_i / n)**m``."""
    if m < 1:
        raise ValueError("moment order must be >= 1")
    return float(np.mean((s.degrees / s.n) ** m))


@dataclass
class HeterophilyReport:
    h_empirical: float
    mu_n: float
    h_limit: float
    n: int
    d: int
    seed_graph: int | None = None
    seed_features: int | None = None

    def __post_init__(self):
        for name in ("h_empirical", "mu_n", "h_limit"):
            v = getattr(self, name)
            if v is not None and v == v and v < -1e-12:
                raise ConsistencyError(f"{name} must be nonnegative, got {v}")

    def to_dict(self) -> dict:
        doc = asdict(self)
        doc["version"] = __version__
        doc["timestamp"] = datetime.now(timezone.utc).isoformat()
        return doc

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def heterophily_report(graphon, s: GraphSample, X: FeatureMatrix, f: PolyFilter,
                       seed_features: int | None = None) -> HeterophilyReport:
    from .graphon import limit_heterophily

    return HeterophilyReport(
        h_empirical=empirical_heterophily(s, X),
        mu_n=expected_heterophily(s, f),
        h_limit=limit_heterophily(graphon, f),
        n=s.n,
        d=_as_array(X).shape[1],
        seed_graph=s.seed,
        seed_features=seed_features,
    )
