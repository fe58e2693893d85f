"""On-disk formats.

* ``edges.csv``: header ``u,v``; one row per unordered edge, 0-based, ``u < v``.
* ``features.csv``: header ``node,f0,...,f{d-1}``; floats written with 17
  significant digits so they read back bit-exactly.
* ``features.bin``: little-endian ``uint64`` n and d, then ``n*d`` little-endian
  float64 values in row-major order.
* ``latents.csv``: header ``node,u``.
"""

from __future__ import annotations

import io
import os
import struct
import tempfile
from pathlib import Path

import numpy as np

from .graphon import GraphSample
from .signal import FeatureMatrix, _as_array

_BIN_HEADER = struct.Struct("<QQ")


def atomic_write(path, data: bytes | str) -> Path:
    """Write via a temporary file in the same directory, then rename."""
    path = Path(path)
    if isinstance(data, str):
        data = data.encode()
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def edges_csv(s: GraphSample) -> str:
    buf = io.StringIO()
    buf.write("u,v\n")
    np.savetxt(buf, s.edges(), fmt="%d", delimiter=",")
    return buf.getvalue()


def write_edges_csv(path, s: GraphSample) -> Path:
    return atomic_write(path, edges_csv(s))


def read_edges_csv(path) -> np.ndarray:
    with open(path) as fh:
        header = fh.readline().strip()
        if header.replace(" ", "") != "u,v":
            raise ValueError(f"{path}: expected header 'u,v', got {header!r}")
        body = fh.read()
    if not body.strip():
        return np.empty((0, 2), dtype=np.int64)
    e = np.loadtxt(io.StringIO(body), delimiter=",", dtype=np.int64, ndmin=2)
    if e.shape[1] != 2:
        raise ValueError(f"{path}: edge rows must have two columns")
    return e


def features_csv(X) -> str:
    X = _as_array(X)
    n, d = X.shape
    buf = io.StringIO()
    buf.write(",".join(["node"] + [f"f{j}" for j in range(d)]) + "\n")
    table = np.column_stack([np.arange(n), X])
    np.savetxt(buf, table, fmt=["%d"] + ["%.17g"] * d, delimiter=",")
    return buf.getvalue()


def write_features_csv(path, X) -> Path:
    return atomic_write(path, features_csv(X))


def read_features_csv(path) -> FeatureMatrix:
    with open(path) as fh:
        header = fh.readline().strip().split(",")
    if not header or header[0] != "node":
        raise ValueError(f"{path}: first column must be 'node'")
    d = len(header) - 1
    if d < 1:
        raise ValueError(f"{path}: no feature columns")
    table = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if table.shape[1] != d + 1:
        raise ValueError(f"{path}: rows have {table.shape[1]} columns, header has {d + 1}")
    if not np.array_equal(table[:, 0], np.arange(table.shape[0])):
        raise ValueError(f"{path}: node column must list 0..n-1 in order")
    return FeatureMatrix(table[:, 1:])


def features_bin(X) -> bytes:
    X = _as_array(X)
    n, d = X.shape
    return _BIN_HEADER.pack(n, d) + np.ascontiguousarray(X, dtype="<f8").tobytes()


def write_features_bin(path, X) -> Path:
    return atomic_write(path, features_bin(X))


def read_features_bin(path) -> FeatureMatrix:
    raw = Path(path).read_bytes()
    if len(raw) < _BIN_HEADER.size:
        raise ValueError(f"{path}: truncated header")
    n, d = _BIN_HEADER.unpack_from(raw)
    body = raw[_BIN_HEADER.size:]
    if len(body) != 8 * n * d:
        raise ValueError(f"{path}: expected {n}x{d} float64 payload, got {len(body)} bytes")
    return FeatureMatrix(np.frombuffer(body, dtype="<f8").reshape(n, d).astype(np.float64))


def read_features(path) -> FeatureMatrix:
    return read_features_bin(path) if str(path).endswith(".bin") else read_features_csv(path)


def latents_csv(s: GraphSample) -> str:
    if s.latents is None:
        raise ValueError("sample carries no latent positions")
    buf = io.StringIO()
    buf.write("node,u\n")
    np.savetxt(buf, np.column_stack([np.arange(s.n), s.latents]), fmt=["%d", "%.17g"], delimiter=",")
    return buf.getvalue()
