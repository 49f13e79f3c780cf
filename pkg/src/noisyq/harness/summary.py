"""Accuracy pivot tables from a grid report.

One block per noise kind: rows are noise levels, columns algorithm x
feature map, cells mean +/- sd of test accuracy over seeds.  The CSV twin
holds the same aggregates in long form, sorted by (noise kind, level).
"""

from __future__ import annotations

import json
import math
import sys


def _fm_label(fm_doc: dict) -> str:
    return f"{fm_doc['kind']}-r{fm_doc['reps']}"


def _mean_sd(values) -> tuple:
    n = len(values)
    mean = sum(values) / n
    if n < 2:
        return mean, 0.0
    var = sum((v - mean) ** 2 for v in values) / (n - 1)
    return mean, math.sqrt(var)


def aggregate_cells(cells) -> list:
    """Group ok cells by (noise kind, level, algorithm, feature map)."""
    groups = {}
    for rec in cells:
        if rec["status"] != "ok":
            continue
        key = (rec["noise_kind"], rec["level"], rec["algorithm"], _fm_label(rec["feature_map"]))
        groups.setdefault(key, []).append(rec)
    rows = []
    for key in sorted(groups):
        members = groups[key]
        mean_tr, sd_tr = _mean_sd([r["train_accuracy"] for r in members])
        mean_te, sd_te = _mean_sd([r["test_accuracy"] for r in members])
        rows.append({
            "noise_kind": key[0],
            "level": key[1],
            "algorithm": key[2],
            "feature_map": key[3],
            "n_seeds": len(members),
            "mean_train": mean_tr,
            "sd_train": sd_tr,
            "mean_test": mean_te,
            "sd_test": sd_te,
        })
    rows.sort(key=lambda r: (r["noise_kind"], r["level"], r["algorithm"], r["feature_map"]))
    return rows


def pivot_text(rows) -> str:
    """Aligned tables, one block per noise kind."""
    kinds = sorted({r["noise_kind"] for r in rows})
    blocks = []
    for kind in kinds:
        krows = [r for r in rows if r["noise_kind"] == kind]
        levels = sorted({r["level"] for r in krows})
        columns = sorted({(r["algorithm"], r["feature_map"]) for r in krows})
        headers = ["level"] + [f"{a}/{f}" for a, f in columns]
        lookup = {(r["level"], r["algorithm"], r["feature_map"]): r for r in krows}
        lines = [[f"{lv:g}"] + [
            (lambda r: f"{r['mean_test']:.3f}±{r['sd_test']:.3f}" if r else "-")
            (lookup.get((lv, a, f)))
            for a, f in columns
        ] for lv in levels]
        widths = [max(len(h), *(len(row[i]) for row in lines)) for i, h in enumerate(headers)]
        fmt = "  ".join(f"{{:<{w}}}" for w in widths)
        block = [f"noise kind: {kind} (mean±sd of test accuracy over seeds)"]
        block.append(fmt.format(*headers))
        block.extend(fmt.format(*row) for row in lines)
        blocks.append("\n".join(block))
    return "\n\n".join(blocks) + "\n"


def write_summary_csv(rows, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("noise_kind,level,algorithm,feature_map,n_seeds,"
                 "mean_train,sd_train,mean_test,sd_test\n")
        for r in rows:
            fh.write(
                f"{r['noise_kind']},{r['level']:g},{r['algorithm']},{r['feature_map']},"
                f"{r['n_seeds']},{r['mean_train']:.6f},{r['sd_train']:.6f},"
                f"{r['mean_test']:.6f},{r['sd_test']:.6f}\n"
            )


def emit_summary(report_path, csv_path=None, stream=None) -> list:
    """Read a grid report, print the pivot, optionally write the CSV."""
    stream = stream or sys.stdout
    with open(report_path, "r", encoding="utf-8") as fh:
        report = json.load(fh)
    rows = aggregate_cells(report["body"]["cells"])
    if not rows:
        stream.write("no completed cells in report\n")
        return rows
    stream.write(pivot_text(rows))
    if csv_path is not None:
        write_summary_csv(rows, csv_path)
    return rows
