"""Experiment configuration: JSON in, validated dataclass out.

The config hash covers everything that affects numbers (dataset recipe,
sweep axes, hyperparameters, backend) and nothing that only affects where
files land, so a rerun in a fresh directory still recognises its own grid.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

from noisyq import backend_name
from noisyq.channels import NoiseKind
from noisyq.featuremaps import DEFAULT_PAULIS, DEFAULT_REPS, MAX_REPS, FeatureMapKind

ALGORITHMS = ("qsvc", "pegasos", "qnn", "vqc")
DEFAULT_LEVELS = (0.01, 0.1, 0.2, 0.3)
DEFAULT_SHOTS = (1024,)


class ConfigError(ValueError):
    """Invalid experiment configuration."""


@dataclass(frozen=True)
class FeatureMapSpec:
    kind: FeatureMapKind
    reps: int = DEFAULT_REPS
    paulis: tuple = DEFAULT_PAULIS

    def label(self) -> str:
        return f"{self.kind.value}-r{self.reps}"

    def to_doc(self) -> dict:
        doc = {"kind": self.kind.value, "reps": self.reps}
        if self.kind is FeatureMapKind.PAULI:
            doc["paulis"] = list(self.paulis)
        return doc

    @classmethod
    def from_doc(cls, doc: dict) -> "FeatureMapSpec":
        kind = FeatureMapKind(doc["kind"])
        reps = int(doc.get("reps", DEFAULT_REPS))
        if not 1 <= reps <= MAX_REPS:
            raise ConfigError(f"reps must be in [1, {MAX_REPS}], got {reps}")
        paulis = tuple(doc.get("paulis", DEFAULT_PAULIS))
        return cls(kind=kind, reps=reps, paulis=paulis)


_DATASET_KINDS = ("synthetic", "csv")


@dataclass(frozen=True)
class ExperimentConfig:
    dataset: dict
    feature_maps: tuple
    algorithms: tuple
    noise_kinds: tuple
    levels: tuple
    shots: tuple
    seeds: tuple
    hyperparameters: dict = field(default_factory=dict)
    out_dir: str = "runs"

    def to_doc(self) -> dict:
        return {
            "dataset": self.dataset,
            "feature_maps": [fm.to_doc() for fm in self.feature_maps],
            "algorithms": list(self.algorithms),
            "noise_kinds": [k.value for k in self.noise_kinds],
            "levels": list(self.levels),
            "shots": list(self.shots),
            "seeds": list(self.seeds),
            "hyperparameters": self.hyperparameters,
            "out_dir": self.out_dir,
        }

    def config_hash(self) -> str:
        doc = self.to_doc()
        doc.pop("out_dir")
        doc["backend"] = backend_name
        blob = json.dumps(doc, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ConfigError(msg)


def _validate_dataset(doc) -> dict:
    _require(isinstance(doc, dict), "dataset must be an object")
    kind = doc.get("kind")
    _require(kind in _DATASET_KINDS, f"dataset.kind must be one of {_DATASET_KINDS}, got {kind!r}")
    if kind == "synthetic":
        out = {
            "kind": "synthetic",
            "n_train": int(doc.get("n_train", 40)),
            "n_test": int(doc.get("n_test", 10)),
            "dim": int(doc.get("dim", 4)),
        }
        _require(out["n_train"] >= 4, "dataset.n_train must be at least 4")
        _require(out["n_test"] >= 2, "dataset.n_test must be at least 2")
        _require(1 <= out["dim"] <= 8, "dataset.dim must be in [1, 8]")
        return out
    out = {
        "kind": "csv",
        "path": doc.get("path"),
        "format": doc.get("format", "csv"),
        "subset": int(doc.get("subset", 250)),
        "k": int(doc.get("k", 3)),
        "dims": int(doc.get("dims", 4)),
        "test_fraction": float(doc.get("test_fraction", 0.2)),
        "split_seed": int(doc.get("split_seed", 0)),
    }
    _require(bool(out["path"]), "dataset.path is required for csv datasets")
    _require(out["format"] in ("csv", "fasta"), "dataset.format must be csv or fasta")
    _require(1 <= out["k"] <= 4, "dataset.k must be in [1, 4]")
    _require(1 <= out["dims"] <= 8, "dataset.dims must be in [1, 8]")
    _require(0.0 < out["test_fraction"] < 1.0, "dataset.test_fraction must be in (0, 1)")
    return out


def config_from_doc(doc: dict) -> ExperimentConfig:
    _require(isinstance(doc, dict), "config root must be an object")
    unknown = set(doc) - {
        "dataset", "feature_maps", "algorithms", "noise_kinds",
        "levels", "shots", "seeds", "hyperparameters", "out_dir",
    }
    _require(not unknown, f"unknown config keys: {sorted(unknown)}")
    dataset = _validate_dataset(doc.get("dataset", {"kind": "synthetic"}))

    fm_docs = doc.get("feature_maps", [{"kind": k.value} for k in FeatureMapKind])
    _require(isinstance(fm_docs, list) and fm_docs, "feature_maps must be a non-empty list")
    try:
        feature_maps = tuple(FeatureMapSpec.from_doc(d) for d in fm_docs)
    except (ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"bad feature map entry: {exc}") from exc

    algorithms = tuple(doc.get("algorithms", list(ALGORITHMS)))
    _require(bool(algorithms), "algorithms must be non-empty")
    for alg in algorithms:
        _require(alg in ALGORITHMS, f"unknown algorithm {alg!r} (expected one of {ALGORITHMS})")

    kind_names = doc.get("noise_kinds", [k.value for k in NoiseKind])
    _require(isinstance(kind_names, list) and kind_names, "noise_kinds must be a non-empty list")
    try:
        noise_kinds = tuple(NoiseKind(k) for k in kind_names)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    levels = tuple(float(v) for v in doc.get("levels", list(DEFAULT_LEVELS)))
    _require(bool(levels), "levels must be non-empty")
    for lv in levels:
        _require(0.0 <= lv <= 1.0, f"noise level {lv} outside [0, 1]")

    shots = tuple(int(s) for s in doc.get("shots", list(DEFAULT_SHOTS)))
    _require(all(s >= 1 for s in shots) and shots, "shots must be positive integers")

    seeds = tuple(int(s) for s in doc.get("seeds", [0]))
    _require(bool(seeds), "seeds must be non-empty")
    _require(len(set(seeds)) == len(seeds), "seeds must be distinct")

    hyper = doc.get("hyperparameters", {})
    _require(isinstance(hyper, dict), "hyperparameters must be an object")
    for key in hyper:
        _require(key in ALGORITHMS, f"hyperparameters key {key!r} is not an algorithm name")

    out_dir = doc.get("out_dir", "runs")
    _require(isinstance(out_dir, str) and out_dir, "out_dir must be a non-empty string")

    return ExperimentConfig(
        dataset=dataset,
        feature_maps=feature_maps,
        algorithms=algorithms,
        noise_kinds=noise_kinds,
        levels=levels,
        shots=shots,
        seeds=seeds,
        hyperparameters=hyper,
        out_dir=out_dir,
    )


def load_config(path) -> ExperimentConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return config_from_doc(doc)
