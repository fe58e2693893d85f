"""``heterogen`` command line interface.

Exit codes: 0 success, 1 bad configuration or input shapes, 2 file-system
errors, 3 numerical failures (e.g. an unreachable heterophily target).
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from . import formats
from ._rng import check_seed, pipeline_seeds
from .calibrate import calibrate_gain, generate_with_target
from .errors import NumericError
from .experiments import KINDS, ExperimentConfig, plot_svg, rows_to_csv, run, summary
from .graphon import GraphSample, graphon_from_dict, limit_heterophily, sample_graph
from .heterophily import (
    empirical_heterophily,
    empirical_heterophily_edge_sum,
    expected_heterophily,
    heterophily_report,
)
from .signal import PolyFilter, apply_filter, resolve_dimension, sample_white_features

SCHEMA = "heterogen/1"
EXIT_CONFIG, EXIT_IO, EXIT_NUMERIC = 1, 2, 3


class ConfigError(ValueError):
    pass


def _load_json(text_or_path: str) -> dict:
    """Parse inline JSON, or the contents of a file if the argument names one."""
    p = Path(text_or_path)
    text = p.read_text() if not text_or_path.lstrip().startswith("{") and p.exists() else text_or_path
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"cannot parse JSON from {text_or_path!r}: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError("expected a JSON object")
    return doc


def _load_config(path: str) -> dict:
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: expected a JSON object")
    return doc


def _require(doc: dict, *keys: str) -> None:
    missing = [k for k in keys if k not in doc]
    if missing:
        raise ConfigError(f"config is missing {', '.join(missing)}")


def _out_dir(path: str) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_manifest(out: Path, command: str, config: dict, seeds: dict, outputs: list[str],
                    started: float, **extra) -> Path:
    for name in outputs:
        f = out / name
        if not f.is_file() or f.stat().st_size == 0:
            raise OSError(f"output {f} is missing or empty")
    manifest = {
        "schema": SCHEMA,
        "version": __version__,
        "command": command,
        "config": config,
        "seeds": seeds,
        "outputs": outputs,
        "created": datetime.now(timezone.utc).isoformat(),
        "duration_s": time.perf_counter() - started,
        **extra,
    }
    return formats.atomic_write(out / "manifest.json", json.dumps(manifest, indent=2) + "\n")


def _emit(args, payload) -> None:
    if not args.quiet:
        print(payload if isinstance(payload, str) else json.dumps(payload, indent=2))


# -- commands -------------------------------------------------------------------

def cmd_generate(args) -> int:
    started = time.perf_counter()
    cfg = _load_config(args.config)
    if args.seed is not None:
        cfg["seed"] = args.seed
    _require(cfg, "graphon", "filter", "n")
    g = graphon_from_dict(cfg["graphon"])
    f = PolyFilter.from_dict(cfg["filter"])
    n = int(cfg["n"])
    seed = check_seed(cfg.get("seed", 0))
    alpha = float(cfg.get("alpha", 2.0))
    d = resolve_dimension(n, cfg.get("d"), alpha)
    graph_seed, feature_seed = pipeline_seeds(seed)

    extra = {}
    if cfg.get("target_h") is not None:
        s, X, cal = generate_with_target(g, f, float(cfg["target_h"]), n, d, seed,
                                         reference=cfg.get("reference", "limit"), alpha=alpha)
        f = f.with_gain(cal.gain)
        extra["calibration"] = cal.to_dict()
    else:
        s = sample_graph(g, n, graph_seed)
        X = apply_filter(f, s, sample_white_features(n, d, feature_seed))
    report = heterophily_report(g, s, X, f, seed_features=feature_seed)

    out = _out_dir(args.out)
    formats.write_edges_csv(out / "edges.csv", s)
    if args.format == "bin":
        feat_name = "features.bin"
        formats.write_features_bin(out / feat_name, X)
    else:
        feat_name = "features.csv"
        formats.write_features_csv(out / feat_name, X)
    formats.atomic_write(out / "latents.csv", formats.latents_csv(s))
    outputs = ["edges.csv", feat_name, "latents.csv"]
    _write_manifest(out, "generate", cfg, {"seed": seed, "graph": graph_seed, "features": feature_seed},
                    outputs, started, filter=f.to_dict(), report=report.to_dict(), **extra)
    _emit(args, report.to_dict())
    return 0


def cmd_measure(args) -> int:
    X = formats.read_features(args.features)
    edges = formats.read_edges_csv(args.edges)
    n = X.n
    if args.n is not None and args.n != n:
        raise ConfigError(f"--n {args.n} does not match the {n} feature rows")
    if edges.size and edges.max() >= n:
        raise ConfigError(f"edge list references node {int(edges.max())} but features have {n} rows")
    s = GraphSample.from_edges(n, edges)
    h_trace = empirical_heterophily(s, X)
    h_edges = empirical_heterophily_edge_sum(s, X)
    out = {"n": n, "d": X.d, "h": h_trace, "h_trace": h_trace, "h_edge_sum": h_edges,
           "gap": abs(h_trace - h_edges)}
    if args.filter:
        fdoc = _load_json(args.filter)
        manifest = fdoc if "coeffs" not in fdoc else None
        f = PolyFilter.from_dict(fdoc["filter"] if manifest else fdoc)
        out["mu_n"] = expected_heterophily(s, f)
        gdoc = _load_json(args.graphon) if args.graphon else None
        if gdoc is None and manifest and "graphon" in manifest.get("config", {}):
            gdoc = manifest["config"]["graphon"]
        if gdoc is not None:
            out["h_limit"] = limit_heterophily(graphon_from_dict(gdoc), f)
    _emit(args, out)
    return 0


def cmd_limit(args) -> int:
    if args.config:
        cfg = _load_config(args.config)
        _require(cfg, "graphon", "filter")
        gdoc, fdoc = cfg["graphon"], cfg["filter"]
    else:
        if not (args.graphon and args.filter):
            raise ConfigError("limit needs --graphon and --filter (or --config)")
        gdoc, fdoc = _load_json(args.graphon), _load_json(args.filter)
    value = limit_heterophily(graphon_from_dict(gdoc), PolyFilter.from_dict(fdoc))
    _emit(args, repr(value))
    return 0


def cmd_calibrate(args) -> int:
    started = time.perf_counter()
    cfg = _load_config(args.config)
    if args.seed is not None:
        cfg["seed"] = args.seed
    _require(cfg, "graphon", "filter", "target_h")
    seed = check_seed(cfg.get("seed", 0))
    result = calibrate_gain(
        graphon_from_dict(cfg["graphon"]),
        PolyFilter.from_dict(cfg["filter"]),
        float(cfg["target_h"]),
        verification_n=cfg.get("n", 1000),
        verification_d=cfg.get("d"),
        seed=seed,
        reference=cfg.get("reference", "limit"),
    )
    doc = result.to_dict()
    if args.out:
        out = _out_dir(args.out)
        formats.atomic_write(out / "calibration.json", json.dumps(doc, indent=2) + "\n")
        _write_manifest(out, "calibrate", cfg, {"seed": seed}, ["calibration.json"], started)
    _emit(args, doc)
    return 0


def cmd_experiment(args) -> int:
    started = time.perf_counter()
    cfg_doc = _load_config(args.config)
    if args.seed is not None:
        cfg_doc["base_seed"] = args.seed
    _require(cfg_doc, "graphon", "filter", "sizes")
    cfg = ExperimentConfig.from_dict(cfg_doc)
    if args.workers:
        cfg.workers = args.workers
    rows = run(args.kind, cfg)
    out = _out_dir(args.out)
    formats.atomic_write(out / "results.csv", rows_to_csv(rows))
    outputs = ["results.csv"]
    if args.plot:
        plot_svg(rows, out / "plot.svg", title=args.kind)
        outputs.append("plot.svg")
    _write_manifest(out, f"experiment {args.kind}", cfg.to_dict(), {"base_seed": cfg.base_seed},
                    outputs, started)
    _emit(args, summary(rows))
    return 0


# -- entry point -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--quiet", action="store_true", help="suppress stdout")

    p = argparse.ArgumentParser(prog="heterogen", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", parents=[common], help="sample a graph and features")
    g.add_argument("--config", required=True)
    g.add_argument("--out", required=True)
    g.add_argument("--seed", type=int)
    g.add_argument("--format", choices=("csv", "bin"), default="csv")
    g.set_defaults(func=cmd_generate)

    m = sub.add_parser("measure", parents=[common], help="heterophily of an edge list and features")
    m.add_argument("--edges", required=True)
    m.add_argument("--features", required=True, help="features.csv or features.bin")
    m.add_argument("--n", type=int, help="expected node count")
    m.add_argument("--filter", help="filter JSON (inline or path) or a generate manifest, to also report mu_n")
    m.add_argument("--graphon", help="graphon JSON (inline or path) to also report the limit")
    m.set_defaults(func=cmd_measure)

    lim = sub.add_parser("limit", parents=[common], help="graphon heterophily limit")
    lim.add_argument("--graphon")
    lim.add_argument("--filter")
    lim.add_argument("--config")
    lim.set_defaults(func=cmd_limit)

    c = sub.add_parser("calibrate", parents=[common], help="fit the filter gain to a target")
    c.add_argument("--config", required=True)
    c.add_argument("--out")
    c.add_argument("--seed", type=int)
    c.set_defaults(func=cmd_calibrate)

    e = sub.add_parser("experiment", parents=[common], help="concentration / convergence study")
    e.add_argument("kind", choices=KINDS)
    e.add_argument("--config", required=True)
    e.add_argument("--out", required=True)
    e.add_argument("--seed", type=int, help="overrides base_seed")
    e.add_argument("--workers", type=int)
    e.add_argument("--plot", action="store_true", help="also write plot.svg")
    e.set_defaults(func=cmd_experiment)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NumericError as exc:
        print(f"heterogen: numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"heterogen: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, KeyError, TypeError) as exc:
        print(f"heterogen: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
