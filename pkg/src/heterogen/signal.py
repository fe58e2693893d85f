"""Stationary graph signals: white Gaussian features pushed through a
polynomial of the rescaled Laplacian ``L_n = (D - A) / n``."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Mapping

import numpy as np
from numpy.polynomial import polynomial as npoly

from ._rng import make_rng
from .graphon import GraphSample


class PolynomialRegimeWarning(UserWarning):
    pass


@dataclass(frozen=True)
class PolyFilter:
    """``gain * sum_k coeffs[k] * lam**k``."""

    coeffs: tuple[float, ...]
    gain: float = 1.0

    def __post_init__(self):
        coeffs = tuple(float(c) for c in np.atleast_1d(np.asarray(self.coeffs, dtype=float)))
        if len(coeffs) < 1:
            raise ValueError("a filter needs at least one coefficient")
        if not all(math.isfinite(c) for c in coeffs) or not math.isfinite(self.gain):
            raise ValueError("filter coefficients and gain must be finite")
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "gain", float(self.gain))

    @property
    def order(self) -> int:
        """Number of taps K."""
        return len(self.coeffs)

    def __call__(self, lam):
        out = self.gain * npoly.polyval(np.asarray(lam, dtype=float), self.coeffs)
        return float(out) if np.ndim(out) == 0 else out

    def with_gain(self, gain: float) -> "PolyFilter":
        return PolyFilter(self.coeffs, gain)

    def heterophily_polynomial(self) -> np.ndarray:
        """Coefficients of ``lam * f(lam)**2`` (gain folded in)."""
        sq = npoly.polymul(self.coeffs, self.coeffs) * self.gain**2
        return np.concatenate([[0.0], sq])

    def to_dict(self) -> dict:
        return {"coeffs": list(self.coeffs), "gain": self.gain}

    @classmethod
    def from_dict(cls, doc: Mapping) -> "PolyFilter":
        return cls(tuple(doc["coeffs"]), doc.get("gain", 1.0))


@dataclass(frozen=True, eq=False)
class FeatureMatrix:
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2:
            raise ValueError(f"features must be a 2-d array, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("features must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def __eq__(self, other):
        if not isinstance(other, FeatureMatrix):
            return NotImplemented
        return np.array_equal(self.values, other.values)

    __hash__ = None


def _as_array(X) -> np.ndarray:
    return X.values if isinstance(X, FeatureMatrix) else np.asarray(X, dtype=float)


def sample_white_features(n: int, d: int, seed: int) -> FeatureMatrix:
    """Rows ``e_i / sqrt(d)`` with ``e_i ~ N(0, I_d)`` i.i.d., drawn row by row."""
    if n < 1 or d < 1:
        raise ValueError(f"feature matrix dimensions must be positive, got ({n}, {d})")
    rng = make_rng(seed)
    return FeatureMatrix(rng.standard_normal((n, d)) / math.sqrt(d))


def default_dimension(n: int, alpha: float = 2.0) -> int:
    """Feature dimension used when the caller does not pick one (``d = n``)."""
    if alpha <= 1:
        raise ValueError("alpha must exceed 1")
    if n < 1:
        raise ValueError("n must be positive")
    return n


def in_polynomial_regime(n: int, d: int, alpha: float) -> bool:
    """``d**(1/alpha) <= n <= d**alpha``."""
    if alpha <= 1:
        raise ValueError("alpha must exceed 1")
    return d ** (1.0 / alpha) <= n <= d**alpha


def validate_dimension(n: int, d: int, alpha: float = 2.0) -> int:
    """Return ``d``, warning if ``(n, d)`` leaves the polynomial regime."""
    if d < 1:
        raise ValueError("d must be positive")
    if not in_polynomial_regime(n, d, alpha):
        warnings.warn(
            f"n={n}, d={d} violates d^(1/{alpha}) <= n <= d^{alpha}; concentration may fail",
            PolynomialRegimeWarning,
            stacklevel=2,
        )
    return d


def resolve_dimension(n: int, d: int | None = None, alpha: float = 2.0) -> int:
    return default_dimension(n, alpha) if d is None else validate_dimension(n, d, alpha)


def rescaled_laplacian_matvec(s: GraphSample, v) -> np.ndarray:
    """``(D - A) v / n``; ``v`` may be a vector or an ``(n, k)`` block."""
    v = _as_array(v)
    if v.shape[0] != s.n:
        raise ValueError(f"length mismatch: graph has {s.n} nodes, vector has {v.shape[0]} rows")
    return (s.laplacian @ v) / s.n


def filter_powers(f: PolyFilter, s: GraphSample, X0):
    """Yield ``(a_k, L_n**k X0)`` for each tap, via repeated matvecs."""
    P = _as_array(X0)
    for k, a in enumerate(f.coeffs):
        if k:
            P = rescaled_laplacian_matvec(s, P)
        yield a, P


def apply_filter(f: PolyFilter, s: GraphSample, X0) -> FeatureMatrix:
    """``X = gain * sum_k a_k L_n**k X0``. Never forms ``L_n**k``."""
    X0 = _as_array(X0)
    if X0.ndim != 2 or X0.shape[0] != s.n:
        raise ValueError(f"shape mismatch: graph has {s.n} nodes, features have shape {X0.shape}")
    acc = None
    for a, P in filter_powers(f, s, X0):
        acc = a * P if acc is None else acc + a * P
    if f.gain != 1.0:
        acc = f.gain * acc
    return FeatureMatrix(acc)
