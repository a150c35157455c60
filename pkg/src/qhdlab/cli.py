"""Command-line experiment runner.

    qhdlab run config.json [--seed S] [--out-dir DIR] [--workers W] [--quiet]

Exit status: 0 all checks pass, 1 some check fails, 2 invalid config,
3 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from importlib import resources
from pathlib import Path

import jsonschema

from .errors import ConfigurationError, DomainError, QHDError
from .experiments import check_lines, run_experiment

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3


def load_schema() -> dict:
    text = resources.files("qhdlab").joinpath("schemas/experiment.schema.json").read_text("utf-8")
    return json.loads(text)


def validate_config(cfg) -> list[str]:
    """Schema diagnostics, each naming the offending field; empty when valid."""
    validator = jsonschema.Draft202012Validator(load_schema())
    msgs = []
    for err in sorted(validator.iter_errors(cfg), key=lambda e: list(e.absolute_path)):
        where = "/".join(str(p) for p in err.absolute_path) or "<root>"
        msgs.append(f"{where}: {err.message}")
    return msgs


def result_filename(kind: str, seed: int) -> str:
    return f"{kind}_seed{seed}.json"


def emit_plot_data(record: dict, out_dir) -> list[Path]:
    """One CSV (x, y, yerr) per series, named {kind}_seed{seed}_{series}.csv."""
    out_dir = Path(out_dir)
    paths = []
    for name, rows in sorted(record.get("series", {}).items()):
        path = out_dir / f"{record['kind']}_seed{record['seed']}_{name}.csv"
        with open(path, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["x", "y", "yerr"])
            for row in rows:
                w.writerow([_cell(v) for v in row])
        paths.append(path)
    return paths


def _cell(v):
    if isinstance(v, dict):  # complex values are stored as re/im
        return v["re"]
    return v


def write_record(record: dict, out_dir) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / result_filename(record["kind"], record["seed"])
    stamped = {**record, "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())}
    path.write_text(json.dumps(stamped, sort_keys=True, indent=1) + "\n", encoding="utf-8")
    return path


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qhdlab", description="Run holonomy-algebra experiments.")
    sub = ap.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run one experiment config")
    run.add_argument("config", help="path to a JSON experiment config")
    run.add_argument("--seed", type=int, help="override the config seed")
    run.add_argument("--out-dir", help="directory for the JSON record and CSV series")
    run.add_argument("--workers", type=int, help="worker threads (default: QHDLAB_WORKERS or 1)")
    run.add_argument("--quiet", action="store_true", help="suppress the per-check lines")
    return ap


def run(args) -> int:
    try:
        cfg = json.loads(Path(args.config).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.seed is not None:
        cfg["seed"] = args.seed
    problems = validate_config(cfg)
    if problems:
        for msg in problems:
            print(f"config error: {msg}", file=sys.stderr)
        return EXIT_CONFIG
    if args.workers is not None and args.workers < 1:
        print("config error: --workers must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    out_dir = args.out_dir or cfg.get("output", {}).get("dir", ".")
    try:
        record = run_experiment(cfg, workers=args.workers)
    except (ConfigurationError, DomainError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (QHDError, ArithmeticError, RuntimeError) as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    write_record(record, out_dir)
    emit_plot_data(record, out_dir)
    if not args.quiet:
        for line in check_lines(record):
            print(line)
    return EXIT_OK if record["passed"] else EXIT_FAIL


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        return run(args)
    return EXIT_CONFIG
