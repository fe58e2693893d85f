"""Graphon models, graph sampling and degree-profile limits.

Three families are supported:

* :class:`Constant` -- the Erdos-Renyi graphon ``W(x, y) = p``.
* :class:`StepFunction` -- a dense stochastic block model given by block
  fractions ``alpha`` and a symmetric probability matrix ``P``.
* :class:`Parametric` -- a smooth kernel, either one of the registered ids in
  :data:`KERNELS` or an arbitrary Python callable.

Graphs are stored as sorted neighbour lists (CSR ``indptr``/``indices``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Callable, Mapping

import numpy as np
import scipy.sparse as sp
from scipy.special import erf

from ._rng import check_seed, make_rng
from .errors import DomainError

DEGREE_NODES = 256
LIMIT_NODES = 1024
# pairs drawn per block while sampling; keeps peak memory bounded for large n
_PAIR_BLOCK = 1 << 21


@lru_cache(maxsize=None)
def gauss_legendre(nodes: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights mapped to [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(nodes)
    x = 0.5 * (x + 1.0)
    w = 0.5 * w
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def _check_unit(*values) -> None:
    for v in values:
        a = np.asarray(v, dtype=float)
        if a.size and (np.any(~np.isfinite(a)) or a.min() < 0.0 or a.max() > 1.0):
            raise DomainError("graphon arguments must lie in [0, 1]")


class Graphon:
    """Base class. Subclasses implement ``_kernel`` and ``_degree``."""

    family: str
    lipschitz_bound: float

    def __call__(self, x, y):
        return evaluate(self, x, y)

    def _kernel(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _degree(self, x: np.ndarray, nodes: int) -> np.ndarray:
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Constant(Graphon):
    p: float
    family: str = field(default="constant", init=False, repr=False)

    def __post_init__(self):
        p = float(self.p)
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"edge probability must be in [0, 1], got {p}")
        object.__setattr__(self, "p", p)

    @property
    def lipschitz_bound(self) -> float:
        return 0.0

    def _kernel(self, x, y):
        return np.full(np.broadcast(x, y).shape, self.p)

    def _degree(self, x, nodes):
        return np.full(np.shape(x), self.p)

    def to_dict(self):
        return {"family": "constant", "p": self.p}


@dataclass(frozen=True, eq=False)
class StepFunction(Graphon):
    """Step-function (SBM) graphon.

    Block ``i`` covers ``[c_{i-1}, c_i)`` where ``c`` is the cumulative sum of
    ``alpha``; the last block also contains 1.
    """

    alpha: np.ndarray
    P: np.ndarray
    family: str = field(default="sbm", init=False, repr=False)

    def __post_init__(self):
        alpha = np.array(self.alpha, dtype=float).ravel()
        P = np.array(self.P, dtype=float)
        r = alpha.size
        if r == 0:
            raise ValueError("need at least one block")
        if np.any(~np.isfinite(alpha)) or np.any(alpha < 0):
            raise ValueError("block fractions must be nonnegative")
        if abs(alpha.sum() - 1.0) > 1e-12:
            raise ValueError(f"block fractions must sum to 1, got {alpha.sum()!r}")
        if P.shape != (r, r):
            raise ValueError(f"P must be {r}x{r}, got shape {P.shape}")
        if np.any(~np.isfinite(P)) or P.min() < 0 or P.max() > 1:
            raise ValueError("P entries must lie in [0, 1]")
        if not np.array_equal(P, P.T):
            raise ValueError("P must be symmetric")
        alpha.setflags(write=False)
        P.setflags(write=False)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "P", P)

    @property
    def lipschitz_bound(self) -> float:
        # step functions are not Lipschitz; inf marks "not applicable"
        return math.inf

    @cached_property
    def _edges(self) -> np.ndarray:
        return np.cumsum(self.alpha)[:-1]

    @cached_property
    def block_degrees(self) -> np.ndarray:
        """``delta_i = sum_j alpha_j P_ij`` for each block."""
        return self.P @ self.alpha

    def block_of(self, x) -> np.ndarray:
        return np.searchsorted(self._edges, x, side="right")

    def _kernel(self, x, y):
        return self.P[self.block_of(x), self.block_of(y)]

    def _degree(self, x, nodes):
        return self.block_degrees[self.block_of(x)]

    def __eq__(self, other):
        return (isinstance(other, StepFunction) and np.array_equal(self.alpha, other.alpha)
                and np.array_equal(self.P, other.P))

    def __hash__(self):
        return hash((self.alpha.tobytes(), self.P.tobytes()))

    def to_dict(self):
        return {"family": "sbm", "alpha": self.alpha.tolist(), "P": self.P.tolist()}


# -- parametric kernels -----------------------------------------------------

@dataclass(frozen=True)
class KernelDef:
    kernel: Callable[..., np.ndarray]
    degree: Callable[..., np.ndarray] | None
    lipschitz: Callable[..., float]
    defaults: Mapping[str, float]


def _softplus(z):
    return np.logaddexp(0.0, z)


def _logistic_degree(x, c, b):
    if c == 0:
        return np.full(np.shape(x), 1.0 / (1.0 + math.exp(-b)))
    return (_softplus(c * (x + 1.0) + b) - _softplus(c * x + b)) / c


def _gaussian_degree(x, amplitude, width):
    s = width * math.sqrt(2.0)
    return amplitude * width * math.sqrt(math.pi / 2.0) * (erf((1.0 - x) / s) + erf(x / s))


KERNELS: dict[str, KernelDef] = {
    # W = scale * x * y
    "product": KernelDef(
        kernel=lambda x, y, scale: scale * (x * y),
        degree=lambda x, scale: 0.5 * scale * x,
        lipschitz=lambda scale: abs(scale),
        defaults={"scale": 1.0},
    ),
    # W = sigmoid(c (x + y) + b)
    "logistic": KernelDef(
        kernel=lambda x, y, c, b: 1.0 / (1.0 + np.exp(-(c * (x + y) + b))),
        degree=_logistic_degree,
        lipschitz=lambda c, b: abs(c) / 4.0,
        defaults={"c": 1.0, "b": 0.0},
    ),
    # W = amplitude * exp(-(x - y)^2 / (2 width^2))
    "gaussian": KernelDef(
        kernel=lambda x, y, amplitude, width: amplitude * np.exp(-((x - y) ** 2) / (2.0 * width**2)),
        degree=_gaussian_degree,
        lipschitz=lambda amplitude, width: abs(amplitude) / (width * math.sqrt(math.e)),
        defaults={"amplitude": 1.0, "width": 0.25},
    ),
}

_GRID = np.linspace(0.0, 1.0, 65)


@dataclass(frozen=True, eq=False)
class Parametric(Graphon):
    """Smooth graphon given by a named kernel or a callable.

    For callables, ``lipschitz`` must be supplied by the caller and the degree
    function always falls back to quadrature unless ``degree`` is given.
    """

    kernel: str | Callable
    params: Mapping[str, float] = field(default_factory=dict)
    lipschitz: float | None = None
    degree: Callable | None = None
    family: str = field(default="parametric", init=False, repr=False)

    def __post_init__(self):
        if isinstance(self.kernel, str):
            if self.kernel not in KERNELS:
                raise ValueError(f"unknown kernel {self.kernel!r}; known: {sorted(KERNELS)}")
            kdef = KERNELS[self.kernel]
            unknown = set(self.params) - set(kdef.defaults)
            if unknown:
                raise ValueError(f"unknown parameters for {self.kernel!r}: {sorted(unknown)}")
            params = {**kdef.defaults, **{k: float(v) for k, v in self.params.items()}}
            object.__setattr__(self, "params", params)
        elif not callable(self.kernel):
            raise TypeError("kernel must be a registered id or a callable")
        elif self.lipschitz is None:
            raise ValueError("a Lipschitz bound is required for callable kernels")

        X, Y = np.meshgrid(_GRID, _GRID, indexing="ij")
        with np.errstate(all="ignore"):
            V = self._kernel(X, Y)
        if np.any(~np.isfinite(V)) or V.min() < 0.0 or V.max() > 1.0:
            raise ValueError("kernel values must lie in [0, 1]")
        if np.max(np.abs(V - V.T)) > 1e-12:
            raise ValueError("kernel is not symmetric")

    @property
    def _kdef(self) -> KernelDef | None:
        return KERNELS.get(self.kernel) if isinstance(self.kernel, str) else None

    @property
    def lipschitz_bound(self) -> float:
        if self.lipschitz is not None:
            return float(self.lipschitz)
        return float(self._kdef.lipschitz(**self.params))

    @property
    def has_closed_form_degree(self) -> bool:
        return self.degree is not None or (self._kdef is not None and self._kdef.degree is not None)

    def _kernel(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if self._kdef is not None:
            return self._kdef.kernel(x, y, **self.params)
        return np.asarray(self.kernel(x, y, **self.params), dtype=float)

    def _degree_quadrature(self, x, nodes):
        y, w = gauss_legendre(nodes)
        x = np.asarray(x, dtype=float)
        return self._kernel(x[..., None], y) @ w

    def _degree(self, x, nodes):
        if self.degree is not None:
            return np.asarray(self.degree(x, **self.params), dtype=float)
        if self._kdef is not None and self._kdef.degree is not None:
            return self._kdef.degree(np.asarray(x, dtype=float), **self.params)
        return self._degree_quadrature(x, nodes)

    def __eq__(self, other):
        if not isinstance(other, Parametric):
            return NotImplemented
        return (self.kernel == other.kernel and dict(self.params) == dict(other.params)
                and self.lipschitz == other.lipschitz and self.degree == other.degree)

    __hash__ = None

    def to_dict(self):
        if self._kdef is None:
            raise TypeError("graphons built from callables cannot be serialised")
        return {"family": "parametric", "kernel": self.kernel, "params": dict(self.params)}


def graphon_from_dict(doc: Mapping) -> Graphon:
    family = doc.get("family")
    if family == "constant":
        return Constant(doc["p"])
    if family == "sbm":
        return StepFunction(doc["alpha"], doc["P"])
    if family == "parametric":
        return Parametric(doc["kernel"], dict(doc.get("params", {})))
    raise ValueError(f"unknown graphon family {family!r}")


# -- operations --------------------------------------------------------------

def evaluate(g: Graphon, x, y):
    """``W(x, y)``; scalars in, scalar out."""
    _check_unit(x, y)
    out = g._kernel(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    return float(out) if np.ndim(out) == 0 else out


def degree_function(g: Graphon, x, *, nodes: int = DEGREE_NODES, quadrature: bool = False):
    """Degree function ``delta(x) = int_0^1 W(x, y) dy``.

    Closed forms are used for constant and step graphons and for parametric
    kernels that declare one. ``quadrature=True`` forces Gauss-Legendre
    integration for parametric graphons (used to cross-check closed forms).
    """
    _check_unit(x)
    x = np.asarray(x, dtype=float)
    if quadrature and isinstance(g, Parametric):
        out = g._degree_quadrature(x, nodes)
    else:
        out = g._degree(x, nodes)
    return float(out) if np.ndim(out) == 0 else out


def limit_heterophily(g: Graphon, f, *, nodes: int = LIMIT_NODES) -> float:
    """Limiting heterophily ``int_0^1 delta(x) f(delta(x))^2 dx``.

    ``f`` is a :class:`~heterogen.signal.PolyFilter` (gain included).
    """
    if isinstance(g, Constant):
        return g.p * f(g.p) ** 2
    if isinstance(g, StepFunction):
        d = g.block_degrees
        return float(np.sum(g.alpha * d * f(d) ** 2))
    x, w = gauss_legendre(nodes)
    d = g._degree(x, DEGREE_NODES)
    return float(w @ (d * f(d) ** 2))


@dataclass(frozen=True, eq=False)
class GraphSample:
    """A simple undirected graph with optional latent positions.

    ``indices[indptr[i]:indptr[i+1]]`` is the sorted neighbour list of node i.
    """

    n: int
    indptr: np.ndarray
    indices: np.ndarray
    latents: np.ndarray | None = None
    seed: int | None = None

    def __post_init__(self):
        for name in ("indptr", "indices", "latents"):
            a = getattr(self, name)
            if a is not None:
                a = np.asarray(a)
                a.setflags(write=False)
                object.__setattr__(self, name, a)

    @classmethod
    def from_edges(cls, n: int, edges, latents=None, seed=None) -> "GraphSample":
        """Build from an ``(m, 2)`` array of unordered edges (any orientation)."""
        if n < 1:
            raise ValueError("n must be positive")
        e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if e.size and (e.min() < 0 or e.max() >= n):
            raise ValueError(f"edge endpoint out of range for n={n}")
        if np.any(e[:, 0] == e[:, 1]):
            raise ValueError("self-loops are not allowed")
        u = np.minimum(e[:, 0], e[:, 1])
        v = np.maximum(e[:, 0], e[:, 1])
        key = np.unique(u * n + v)
        if key.size != e.shape[0]:
            raise ValueError("duplicate edges")
        u, v = key // n, key % n
        rows = np.concatenate([u, v])
        indices = np.sort(np.concatenate([u * n + v, v * n + u])) % n
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(rows, minlength=n), out=indptr[1:])
        if latents is not None:
            latents = np.asarray(latents, dtype=float)
            if latents.shape != (n,):
                raise ValueError("latents must have length n")
        return cls(n, indptr, indices, latents, seed)

    @cached_property
    def degrees(self) -> np.ndarray:
        d = np.diff(self.indptr)
        d.setflags(write=False)
        return d

    @property
    def num_edges(self) -> int:
        return int(self.indices.size // 2)

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    def edges(self) -> np.ndarray:
        """Unordered edges ``(u, v)`` with ``u < v`` in lexicographic order."""
        rows = np.repeat(np.arange(self.n), self.degrees)
        keep = self.indices > rows
        return np.column_stack([rows[keep], self.indices[keep]])

    @cached_property
    def adjacency(self) -> sp.csr_matrix:
        data = np.ones(self.indices.size)
        return sp.csr_matrix((data, self.indices, self.indptr), shape=(self.n, self.n))

    @cached_property
    def laplacian(self) -> sp.csr_matrix:
        """Unnormalised Laplacian ``D - A`` (not divided by n)."""
        L = (sp.diags(self.degrees.astype(float)) - self.adjacency).tocsr()
        L.sort_indices()
        return L

    def __eq__(self, other):
        if not isinstance(other, GraphSample):
            return NotImplemented
        same_latents = (self.latents is None and other.latents is None) or (
            self.latents is not None and other.latents is not None
            and np.array_equal(self.latents, other.latents))
        return (self.n == other.n and self.seed == other.seed and same_latents
                and np.array_equal(self.indptr, other.indptr)
                and np.array_equal(self.indices, other.indices))

    __hash__ = None


def sample_graph(g: Graphon, n: int, seed: int) -> GraphSample:
    """Sample ``G_n ~ G_W(n)``.

    Draw order from a Philox stream seeded with ``seed``: ``n`` uniforms for
    the latent positions, then one uniform per unordered pair ``(i, j)``,
    ``i < j``, in lexicographic order. The pair is an edge iff its uniform is
    below ``W(u_i, u_j)``.
    """
    if n < 1:
        raise ValueError("n must be a positive integer")
    seed = check_seed(seed)
    rng = make_rng(seed)
    latents = rng.random(n)

    # row i owns n - 1 - i consecutive pair draws
    counts = np.arange(n - 1, -1, -1, dtype=np.int64)
    starts = np.concatenate([[0], np.cumsum(counts)])
    us, vs = [], []
    i0 = 0
    while i0 < n - 1:
        i1 = int(np.searchsorted(starts, starts[i0] + _PAIR_BLOCK, side="right")) - 1
        i1 = min(max(i1, i0 + 1), n - 1)
        total = int(starts[i1] - starts[i0])
        draws = rng.random(total)
        rows = np.repeat(np.arange(i0, i1), counts[i0:i1])
        offsets = np.arange(total) - np.repeat(starts[i0:i1] - starts[i0], counts[i0:i1])
        cols = rows + 1 + offsets
        prob = g._kernel(latents[rows], latents[cols])
        hit = draws < prob
        us.append(rows[hit])
        vs.append(cols[hit])
        i0 = i1
    if us:
        edges = np.column_stack([np.concatenate(us), np.concatenate(vs)])
    else:
        edges = np.empty((0, 2), dtype=np.int64)
    return GraphSample.from_edges(n, edges, latents=latents, seed=seed)


def max_degree_deviation(g: Graphon, s: GraphSample) -> float:
    """``max_i |d_i / n - delta(u_i)|`` over the nodes of ``s``."""
    if s.latents is None:
        raise ValueError("sample carries no latent positions")
    delta = g._degree(s.latents, DEGREE_NODES)
    return float(np.max(np.abs(s.degrees / s.n - delta)))
