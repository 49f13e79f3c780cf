"""The noise-sweep grid: algorithms x feature maps x noise kinds x levels
x seeds.

Every cell trains a fresh model, records train/test accuracy, and saves
the model artifact.  Progress goes to an append-only cell log so an
interrupted grid resumes where it stopped, as long as the config hash
still matches.  The report separates a deterministic body (what criterion
comparisons and summaries read) from volatile wall-clock and environment
metadata.
"""

from __future__ import annotations

import json
import logging
import os
import platform
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

import noisyq
from noisyq.channels import NoiseConfig
from noisyq.classifiers import (
    accuracy,
    pegasos_train,
    qnn_train,
    qsvc_train,
    save_model,
    to_binary,
    vqc_train,
)
from noisyq.harness.config import ExperimentConfig, FeatureMapSpec
from noisyq.harness.prep import build_dataset
from noisyq.kernels import EncodingSpec, cross_gram_from_states, gram_from_states

log = logging.getLogger(__name__)

REPORT_FORMAT_VERSION = 1


@dataclass(frozen=True)
class Cell:
    noise_kind: str
    level: float
    fm: FeatureMapSpec
    algorithm: str
    seed: int

    def cell_id(self) -> str:
        return f"{self.noise_kind}_{self.level:g}_{self.fm.label()}_{self.algorithm}_s{self.seed}"

    def sort_key(self):
        return (self.noise_kind, self.level, self.fm.label(), self.algorithm, self.seed)


def enumerate_cells(cfg: ExperimentConfig) -> list:
    cells = [
        Cell(kind.value, level, fm, alg, seed)
        for kind in cfg.noise_kinds
        for level in sorted(cfg.levels)
        for fm in cfg.feature_maps
        for alg in cfg.algorithms
        for seed in cfg.seeds
    ]
    return sorted(cells, key=Cell.sort_key)


def _hyper(cfg: ExperimentConfig, algorithm: str) -> dict:
    return dict(cfg.hyperparameters.get(algorithm, {}))


def _run_cell(cfg: ExperimentConfig, cell: Cell, models_dir: str | None):
    """Train and score one cell; returns the cell record dict."""
    train, test = build_dataset(cfg.dataset, cell.seed)
    noise = NoiseConfig.from_doc({"kind": cell.noise_kind, "level": cell.level})
    spec = EncodingSpec(fm=cell.fm.kind, reps=cell.fm.reps, paulis=cell.fm.paulis, noise=noise)
    hyper = _hyper(cfg, cell.algorithm)

    if cell.algorithm in ("qsvc", "pegasos"):
        enc_tr = spec.encode(train.X)
        enc_te = spec.encode(test.X)
        K = gram_from_states(enc_tr)
        Kx = cross_gram_from_states(enc_te, enc_tr)
        if cell.algorithm == "qsvc":
            model = qsvc_train(
                K, train.y, C=float(hyper.get("C", 1.0)),
                train_X=train.X, encoding=spec,
            )
        else:
            model = pegasos_train(
                K, train.y,
                lam=float(hyper.get("lambda", 0.01)),
                T=int(hyper.get("T", 1000)),
                seed=cell.seed,
                train_X=train.X, encoding=spec,
            )
        train_pred = to_binary(model.decision_values(K.entries))
        test_pred = to_binary(model.decision_values(Kx))
        trace_len = len(getattr(model, "margins", ()))
    else:
        trainer = qnn_train if cell.algorithm == "qnn" else vqc_train
        kwargs = {
            "epochs": int(hyper.get("epochs", 50)),
            "seed": cell.seed,
            "reps": cell.fm.reps,
            "paulis": cell.fm.paulis,
            "layers": int(hyper.get("layers", 2)),
            "optimizer": hyper.get("optimizer", "spsa"),
            "spsa_a": float(hyper.get("spsa_a", 2.0)),
            "spsa_c": float(hyper.get("spsa_c", 0.2)),
            "spsa_avg": int(hyper.get("spsa_avg", 1)),
            "lr": float(hyper.get("lr", 0.2)),
        }
        if cell.algorithm == "qnn":
            kwargs["readout_qubit"] = int(hyper.get("readout_qubit", 0))
            kwargs["parity"] = bool(hyper.get("parity", False))
        model = trainer(train, cell.fm.kind, noise, **kwargs)
        train_pred = model.predict_features(train.X)
        test_pred = model.predict_features(test.X)
        trace_len = len(model.loss_trace)

    model_path = None
    if models_dir is not None:
        model_path = os.path.join("models", cell.cell_id() + ".json")
        save_model(model, os.path.join(models_dir, cell.cell_id() + ".json"))

    return {
        "cell_id": cell.cell_id(),
        "algorithm": cell.algorithm,
        "feature_map": cell.fm.to_doc(),
        "noise_kind": cell.noise_kind,
        "level": cell.level,
        "seed": cell.seed,
        "status": "ok",
        "train_accuracy": float(accuracy(train.y, train_pred)),
        "test_accuracy": float(accuracy(test.y, test_pred)),
        "model_path": model_path,
        "trace_length": trace_len,
        "error": None,
    }


def _failed_record(cell: Cell, exc: Exception) -> dict:
    return {
        "cell_id": cell.cell_id(),
        "algorithm": cell.algorithm,
        "feature_map": cell.fm.to_doc(),
        "noise_kind": cell.noise_kind,
        "level": cell.level,
        "seed": cell.seed,
        "status": "failed",
        "train_accuracy": None,
        "test_accuracy": None,
        "model_path": None,
        "trace_length": 0,
        "error": f"{type(exc).__name__}: {exc}",
    }


def _read_cell_log(path: str, config_hash: str) -> dict:
    """Completed cells from an earlier run of the same config."""
    done = {}
    if not os.path.exists(path):
        return done
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            try:
                entry = json.loads(line)
            except json.JSONDecodeError:
                continue
            if entry.get("config_hash") != config_hash:
                continue
            record = entry.get("record", {})
            # failed cells are retried on resume instead of skipped
            if record.get("status") == "ok":
                done[record["cell_id"]] = (record, entry.get("wall_time_s", 0.0))
    return done


def _append_cell_log(path: str, config_hash: str, record: dict, wall_time: float) -> None:
    entry = {"config_hash": config_hash, "wall_time_s": wall_time, "record": record}
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(json.dumps(entry, sort_keys=True) + "\n")
        fh.flush()
        os.fsync(fh.fileno())


def _cell_worker(cfg_doc: dict, cell_tuple, models_dir):
    from noisyq.harness.config import config_from_doc

    cfg = config_from_doc(cfg_doc)
    kind, level, fm_doc, alg, seed = cell_tuple
    cell = Cell(kind, level, FeatureMapSpec.from_doc(fm_doc), alg, seed)
    start = time.perf_counter()
    try:
        record = _run_cell(cfg, cell, models_dir)
    except Exception as exc:
        record = _failed_record(cell, exc)
    return record, time.perf_counter() - start


def canonical_body_text(body: dict) -> str:
    """The byte-stable serialization the determinism guarantee applies to."""
    return json.dumps(body, sort_keys=True, indent=1) + "\n"


def _write_report(path: str, body: dict, wall_times: dict) -> None:
    report = {
        "body": body,
        "environment": {
            "backend": noisyq.backend_name,
            "python": platform.python_version(),
            "numpy": np.__version__,
            "platform": platform.platform(),
        },
        "wall_times_s": {k: round(v, 6) for k, v in sorted(wall_times.items())},
        "created_utc": datetime.now(timezone.utc).isoformat(),
    }
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(report, fh, sort_keys=True, indent=1)
        fh.write("\n")
    os.replace(tmp, path)


def run_grid(cfg: ExperimentConfig, run_dir: str, jobs: int = 1) -> int:
    """Execute every cell, write grid/report.json, return failure count.

    Cells already recorded as ok in grid/cells.log under the same config
    hash are not rerun.
    """
    grid_dir = os.path.join(run_dir, "grid")
    models_dir = os.path.join(grid_dir, "models")
    os.makedirs(models_dir, exist_ok=True)
    log_path = os.path.join(grid_dir, "cells.log")
    config_hash = cfg.config_hash()

    cells = enumerate_cells(cfg)
    done = _read_cell_log(log_path, config_hash)
    pending = [c for c in cells if c.cell_id() not in done]
    log.info("grid: %d cells, %d cached, %d to run (jobs=%d)",
             len(cells), len(done), len(pending), jobs)

    records = {cid: rec for cid, (rec, _) in done.items()}
    wall_times = {cid: wt for cid, (_, wt) in done.items()}

    if jobs > 1 and pending:
        tasks = [
            (c, (c.noise_kind, c.level, c.fm.to_doc(), c.algorithm, c.seed))
            for c in pending
        ]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [
                pool.submit(_cell_worker, cfg.to_doc(), t, models_dir) for _, t in tasks
            ]
            for (cell, _), fut in zip(tasks, futures):
                record, wall = fut.result()
                records[record["cell_id"]] = record
                wall_times[record["cell_id"]] = wall
                _append_cell_log(log_path, config_hash, record, wall)
                if record["status"] != "ok":
                    log.warning("cell %s failed: %s", record["cell_id"], record["error"])
    else:
        for cell in pending:
            start = time.perf_counter()
            try:
                record = _run_cell(cfg, cell, models_dir)
            except Exception as exc:
                record = _failed_record(cell, exc)
                log.warning("cell %s failed: %s", cell.cell_id(), record["error"])
            wall = time.perf_counter() - start
            records[record["cell_id"]] = record
            wall_times[record["cell_id"]] = wall
            _append_cell_log(log_path, config_hash, record, wall)

    ordered = [records[c.cell_id()] for c in cells]
    n_failed = sum(1 for r in ordered if r["status"] != "ok")
    body = {
        "format_version": REPORT_FORMAT_VERSION,
        "config_hash": config_hash,
        "config": cfg.to_doc(),
        "cells": ordered,
        "n_cells": len(ordered),
        "n_failed": n_failed,
    }
    _write_report(os.path.join(grid_dir, "report.json"), body, wall_times)
    return n_failed
