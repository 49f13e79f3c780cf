"""Command-line entry point.

Subcommands: run-histograms, run-grid, summarize, predict.  Exit code 0
on success, 1 when any grid cell failed, 2 for an invalid config or
unusable input.  Environment overrides: NOISYQ_OUT (run directory),
NOISYQ_SEED (replaces the seed list), NOISYQ_JOBS (worker count),
NOISYQ_BACKEND (kernel backend, read at import).
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import os
import shutil
import sys
from datetime import datetime, timezone

from noisyq.harness.config import ConfigError, load_config

log = logging.getLogger("noisyq")


def _resolve_run_dir(cfg_out_dir: str, out_flag) -> str:
    explicit = out_flag or os.environ.get("NOISYQ_OUT")
    if explicit:
        return explicit
    stamp = datetime.now(timezone.utc).strftime("%Y%m%dT%H%M%SZ")
    run_dir = os.path.join(cfg_out_dir, stamp)
    suffix = 0
    while os.path.exists(run_dir):
        suffix += 1
        run_dir = os.path.join(cfg_out_dir, f"{stamp}-{suffix}")
    return run_dir


def _seed_override(args):
    if args.seed is not None:
        return int(args.seed)
    env = os.environ.get("NOISYQ_SEED")
    return int(env) if env else None


def _load_and_stage(args):
    """Parse config, apply overrides, create the run dir with a verbatim
    config copy."""
    cfg = load_config(args.config)
    seed = _seed_override(args)
    if seed is not None:
        cfg = dataclasses.replace(cfg, seeds=(seed,))
    run_dir = _resolve_run_dir(cfg.out_dir, args.out)
    os.makedirs(run_dir, exist_ok=True)
    staged = os.path.join(run_dir, "config.json")
    if os.path.abspath(args.config) != os.path.abspath(staged):
        shutil.copyfile(args.config, staged)
    return cfg, run_dir


def _cmd_run_histograms(args) -> int:
    from noisyq.harness.histograms import run_histograms

    cfg, run_dir = _load_and_stage(args)
    n = run_histograms(cfg, run_dir)
    log.info("wrote %d histograms under %s", n, os.path.join(run_dir, "histograms"))
    return 0


def _cmd_run_grid(args) -> int:
    from noisyq.harness.grid import run_grid
    from noisyq.harness.summary import emit_summary

    cfg, run_dir = _load_and_stage(args)
    jobs = args.jobs if args.jobs is not None else int(os.environ.get("NOISYQ_JOBS", "1"))
    n_failed = run_grid(cfg, run_dir, jobs=max(1, jobs))
    emit_summary(
        os.path.join(run_dir, "grid", "report.json"),
        csv_path=os.path.join(run_dir, "summary.csv"),
    )
    if n_failed:
        log.error("%d cell(s) failed; see grid/report.json", n_failed)
        return 1
    return 0


def _cmd_summarize(args) -> int:
    from noisyq.harness.summary import emit_summary

    if args.report:
        report = args.report
        parent = os.path.dirname(os.path.abspath(report))
        root = os.path.dirname(parent) if os.path.basename(parent) == "grid" else parent
    elif args.out:
        root = args.out
        report = os.path.join(root, "grid", "report.json")
    else:
        print("error: summarize needs --report or --out", file=sys.stderr)
        return 2
    if not os.path.exists(report):
        print(f"error: report not found: {report}", file=sys.stderr)
        return 2
    emit_summary(report, csv_path=os.path.join(root, "summary.csv"))
    return 0


def _read_feature_rows(path):
    import numpy as np

    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln for ln in fh.read().splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines:
        raise ValueError(f"{path}: no rows")
    start = 0
    try:
        float(lines[0].split(",")[0])
    except ValueError:
        start = 1  # header row
    rows = [[float(v) for v in ln.split(",")] for ln in lines[start:]]
    return np.array(rows)


def _cmd_predict(args) -> int:
    from noisyq.classifiers import load_model

    try:
        model = load_model(args.model)
        X = _read_feature_rows(args.input)
        pred = model.predict_features(X)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    out_lines = ["index,prediction"] + [f"{i},{int(p)}" for i, p in enumerate(pred)]
    text = "\n".join(out_lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="noisyq",
        description="Density-matrix QML experiments: histogram studies and noise-sweep grids.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", required=True, help="experiment config JSON")
        p.add_argument("--out", help="run directory (reuse to resume; default: <out_dir>/<timestamp>)")
        p.add_argument("--seed", type=int, help="replace the config seed list with this one seed")

    p_hist = sub.add_parser("run-histograms", help="sample the probe input under every noise setting")
    add_common(p_hist)
    p_hist.set_defaults(func=_cmd_run_histograms)

    p_grid = sub.add_parser("run-grid", help="train and score every grid cell")
    add_common(p_grid)
    p_grid.add_argument("--jobs", type=int, help="parallel worker processes (default 1)")
    p_grid.set_defaults(func=_cmd_run_grid)

    p_sum = sub.add_parser("summarize", help="pivot tables from an existing grid report")
    p_sum.add_argument("--report", help="path to grid/report.json")
    p_sum.add_argument("--out", help="run directory containing grid/report.json")
    p_sum.set_defaults(func=_cmd_summarize)

    p_pred = sub.add_parser("predict", help="label feature rows with a saved model")
    p_pred.add_argument("--model", required=True, help="model JSON artifact")
    p_pred.add_argument("--input", required=True, help="CSV of feature rows")
    p_pred.add_argument("--out", help="write predictions here instead of stdout")
    p_pred.set_defaults(func=_cmd_predict)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
