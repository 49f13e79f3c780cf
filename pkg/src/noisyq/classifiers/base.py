"""Shared classifier plumbing: datasets, label codes, model persistence.

Labels live in {0, 1} at the API boundary and in {-1, +1} inside every
decision rule (0 maps to -1).  A decision value of exactly zero always
resolves to class 1.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

MODEL_FORMAT_VERSION = 1


@dataclass(frozen=True)
class LabeledDataset:
    """Feature rows plus binary labels; features are post-PCA, scaled to [0, pi]."""

    X: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        X = np.atleast_2d(np.asarray(self.X, dtype=float))
        y = np.asarray(self.y, dtype=int).reshape(-1)
        if X.shape[0] != y.size:
            raise ValueError(f"{X.shape[0]} rows but {y.size} labels")
        if not np.all(np.isfinite(X)):
            raise ValueError("features must be finite")
        if not np.all(np.isin(y, (0, 1))):
            raise ValueError("labels must be 0 or 1")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.y.size

    @property
    def dim(self) -> int:
        return self.X.shape[1]

    def require_trainable(self) -> None:
        if self.n < 2 or len(np.unique(self.y)) < 2:
            raise ValueError("training needs at least two samples covering both classes")


def signed(y: np.ndarray) -> np.ndarray:
    """{0,1} -> {-1,+1}."""
    return 2 * np.asarray(y, dtype=int) - 1


def to_binary(decision_values: np.ndarray) -> np.ndarray:
    """Decision values -> {0,1} labels; an exact zero goes to class 1."""
    return (np.asarray(decision_values) >= 0).astype(int)


def accuracy(y_true: np.ndarray, y_pred: np.ndarray) -> float:
    y_true = np.asarray(y_true).reshape(-1)
    y_pred = np.asarray(y_pred).reshape(-1)
    if y_true.size != y_pred.size or y_true.size == 0:
        raise ValueError("prediction/label size mismatch")
    return float(np.mean(y_true == y_pred))


def save_model(model, path) -> None:
    """Write any trained model as a versioned JSON document."""
    doc = model.to_doc()
    doc["format_version"] = MODEL_FORMAT_VERSION
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_model(path):
    """Reload a model written by :func:`save_model`, dispatching on its tag."""
    # local imports keep base free of circular references
    from noisyq.classifiers.pegasos import PegasosModel
    from noisyq.classifiers.qsvc import QsvcModel
    from noisyq.classifiers.variational import VariationalModel

    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    version = doc.get("format_version")
    if version != MODEL_FORMAT_VERSION:
        raise ValueError(f"unsupported model format version {version!r}")
    tag = doc.get("algorithm")
    for cls in (QsvcModel, PegasosModel, VariationalModel):
        if tag in cls.ALGORITHM_TAGS:
            return cls.from_doc(doc)
    raise ValueError(f"unknown algorithm tag {tag!r}")
