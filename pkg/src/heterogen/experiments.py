"""Monte Carlo studies of heterophily concentration and convergence.

Each trial ``t`` at size ``n`` gets its own seed ``derive_seed(base_seed, n, t)``
so any single trial can be re-run in isolation, and results are aggregated
by trial index so the output does not depend on worker scheduling.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from ._rng import check_seed, derive_seed, pipeline_seeds
from .graphon import Graphon, graphon_from_dict, limit_heterophily, sample_graph
from .heterophily import empirical_heterophily, expected_heterophily
from .signal import PolyFilter, apply_filter, resolve_dimension, sample_white_features

KINDS = ("concentration", "convergence")
CSV_COLUMNS = ("n", "d", "trials", "mean_h", "reference", "mean_abs_dev", "std_dev")


@dataclass
class ExperimentConfig:
    graphon: Graphon
    filter: PolyFilter
    sizes: Sequence[int]
    trials: int = 20
    base_seed: int = 0
    d: int | None = None  # None means d = n
    alpha: float = 2.0
    workers: int = 1

    def __post_init__(self):
        self.sizes = tuple(int(n) for n in self.sizes)
        if not self.sizes:
            raise ValueError("at least one graph size is required")
        if any(n < 1 for n in self.sizes):
            raise ValueError("graph sizes must be positive")
        if any(b <= a for a, b in zip(self.sizes, self.sizes[1:])):
            raise ValueError("sizes must be strictly increasing")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        self.base_seed = check_seed(self.base_seed)

    @classmethod
    def from_dict(cls, doc: Mapping) -> "ExperimentConfig":
        return cls(
            graphon=graphon_from_dict(doc["graphon"]),
            filter=PolyFilter.from_dict(doc["filter"]),
            sizes=doc["sizes"],
            trials=int(doc.get("trials", 20)),
            base_seed=int(doc.get("base_seed", doc.get("seed", 0))),
            d=doc.get("d"),
            alpha=float(doc.get("alpha", 2.0)),
            workers=int(doc.get("workers", 1)),
        )

    def to_dict(self) -> dict:
        return {
            "graphon": self.graphon.to_dict(),
            "filter": self.filter.to_dict(),
            "sizes": list(self.sizes),
            "trials": self.trials,
            "base_seed": self.base_seed,
            "d": self.d,
            "alpha": self.alpha,
        }


@dataclass
class ExperimentRow:
    n: int
    d: int
    trials: int
    mean_h: float
    reference: float
    mean_abs_dev: float
    std_dev: float
    h: list = field(default_factory=list, repr=False)
    refs: list = field(default_factory=list, repr=False)


def trial_seed(base_seed: int, n: int, trial: int) -> int:
    return derive_seed(base_seed, n, trial)


def run_trial(graphon: Graphon, f: PolyFilter, n: int, d: int, seed: int,
              with_mu: bool = True) -> tuple[float, float]:
    """One (graph, features) draw; returns ``(h, mu_n)`` (``mu_n`` NaN if skipped)."""
    graph_seed, feature_seed = pipeline_seeds(seed)
    s = sample_graph(graphon, n, graph_seed)
    X = apply_filter(f, s, sample_white_features(n, d, feature_seed))
    h = empirical_heterophily(s, X)
    mu = expected_heterophily(s, f) if with_mu else math.nan
    return h, mu


def _run_trial_args(args):
    return run_trial(*args)


def _collect(cfg: ExperimentConfig, with_mu: bool):
    jobs = []
    for n in cfg.sizes:
        d = resolve_dimension(n, cfg.d, cfg.alpha)
        for t in range(cfg.trials):
            jobs.append((cfg.graphon, cfg.filter, n, d, trial_seed(cfg.base_seed, n, t), with_mu))
    if cfg.workers > 1:
        with ProcessPoolExecutor(cfg.workers) as pool:
            out = list(pool.map(_run_trial_args, jobs))
    else:
        out = [run_trial(*job) for job in jobs]
    for k, n in enumerate(cfg.sizes):
        chunk = out[k * cfg.trials:(k + 1) * cfg.trials]
        d = jobs[k * cfg.trials][3]
        yield n, d, [h for h, _ in chunk], [mu for _, mu in chunk]


def _row(n, d, h, refs, reference=None) -> ExperimentRow:
    h = np.asarray(h)
    refs = np.asarray(refs)
    dev = np.abs(h - refs)
    std = float(np.std(dev, ddof=1)) if dev.size > 1 else 0.0
    if reference is None:
        reference = float(np.mean(refs))
    return ExperimentRow(n, d, int(h.size), float(np.mean(h)), reference,
                         float(np.mean(dev)), std, h.tolist(), refs.tolist())


def run_concentration(cfg: ExperimentConfig) -> list[ExperimentRow]:
    """Deviation of ``h`` from its graph-specific expectation ``mu_n``."""
    return [_row(n, d, h, mu) for n, d, h, mu in _collect(cfg, with_mu=True)]


def run_convergence(cfg: ExperimentConfig) -> list[ExperimentRow]:
    """Deviation of ``h`` from the graphon limit."""
    ref = limit_heterophily(cfg.graphon, cfg.filter)
    return [_row(n, d, h, [ref] * len(h), ref) for n, d, h, _ in _collect(cfg, with_mu=False)]


def run(kind: str, cfg: ExperimentConfig) -> list[ExperimentRow]:
    if kind == "concentration":
        return run_concentration(cfg)
    if kind == "convergence":
        return run_convergence(cfg)
    raise ValueError(f"experiment kind must be one of {KINDS}, got {kind!r}")


def rows_to_csv(rows: Sequence[ExperimentRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow([r.n, r.d, r.trials] + [repr(float(getattr(r, c))) for c in CSV_COLUMNS[3:]])
    return buf.getvalue()


def rows_from_csv(text: str) -> list[ExperimentRow]:
    rows = []
    for rec in csv.DictReader(io.StringIO(text)):
        rows.append(ExperimentRow(int(rec["n"]), int(rec["d"]), int(rec["trials"]),
                                  *(float(rec[c]) for c in CSV_COLUMNS[3:])))
    return rows


def plot_svg(rows: Sequence[ExperimentRow], path, title: str = "") -> Path:
    """Log-log plot of mean absolute deviation against n with a slope -1/2 guide."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    n = np.array([r.n for r in rows], dtype=float)
    dev = np.array([r.mean_abs_dev for r in rows])
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.loglog(n, dev, "o-", label="mean |deviation|")
    if dev.size and dev[0] > 0:
        ax.loglog(n, dev[0] * np.sqrt(n[0] / n), "k--", lw=1, label="slope -1/2")
    ax.set_xlabel("n")
    ax.set_ylabel("mean |deviation|")
    if title:
        ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path


def summary(rows: Sequence[ExperimentRow]) -> list[dict]:
    keep = {f.name for f in fields(ExperimentRow)} - {"h", "refs"}
    return [{k: v for k, v in asdict(r).items() if k in keep} for r in rows]
