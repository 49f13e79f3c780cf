"""Kernelized stochastic sub-gradient SVM with per-point selection counts.

At step t a uniformly sampled point i gets its count incremented when its
margin y_i * (1/(lambda*t)) * sum_j count_j y_j K[j, i] falls below 1.  The
bias is fixed at zero.  The margin sequence is recorded so a seeded replay
can be checked bit-exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from noisyq.classifiers.base import LabeledDataset, signed, to_binary
from noisyq.kernels import EncodingSpec, KernelMatrix, cross_gram_from_states

DEFAULT_LAMBDA = 0.01
DEFAULT_T = 1000


@dataclass(frozen=True)
class PegasosModel:
    ALGORITHM_TAGS = ("pegasos",)

    lam: float
    T: int
    counts: np.ndarray
    seed: int
    train_y: np.ndarray
    train_X: np.ndarray | None = None
    encoding: EncodingSpec | None = None
    margins: tuple = ()

    def decision_values(self, k_rows: np.ndarray) -> np.ndarray:
        """f(x) = (1/(lambda*T)) sum_j count_j y_j K(x_j, x); bias fixed at 0."""
        k_rows = np.atleast_2d(np.asarray(k_rows, dtype=float))
        if k_rows.shape[1] != self.counts.size:
            raise ValueError(
                f"kernel rows have {k_rows.shape[1]} columns, expected {self.counts.size}"
            )
        coeff = self.counts * signed(self.train_y)
        return k_rows @ coeff / (self.lam * self.T)

    def predict_rows(self, k_rows: np.ndarray) -> np.ndarray:
        return to_binary(self.decision_values(k_rows))

    def predict_features(self, X: np.ndarray) -> np.ndarray:
        if self.train_X is None or self.encoding is None:
            raise ValueError("model carries no embedded training features")
        test_states = self.encoding.encode(X)
        train_states = self.encoding.encode(self.train_X)
        return self.predict_rows(cross_gram_from_states(test_states, train_states))

    def to_doc(self) -> dict:
        return {
            "algorithm": "pegasos",
            "seed": self.seed,
            "hyperparameters": {
                "lambda": self.lam,
                "T": self.T,
                "encoding": None if self.encoding is None else self.encoding.to_doc(),
            },
            "parameters": {
                "counts": self.counts.tolist(),
                "train_y": self.train_y.tolist(),
                "train_X": None if self.train_X is None else self.train_X.tolist(),
            },
            "training_trace": {"margins": list(self.margins)},
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "PegasosModel":
        hp, par = doc["hyperparameters"], doc["parameters"]
        enc = hp.get("encoding")
        return cls(
            lam=float(hp["lambda"]),
            T=int(hp["T"]),
            counts=np.asarray(par["counts"], dtype=int),
            seed=int(doc["seed"]),
            train_y=np.asarray(par["train_y"], dtype=int),
            train_X=None if par.get("train_X") is None else np.asarray(par["train_X"], dtype=float),
            encoding=None if enc is None else EncodingSpec.from_doc(enc),
            margins=tuple(doc["training_trace"]["margins"]),
        )


def pegasos_train(
    K: KernelMatrix,
    y: np.ndarray,
    lam: float = DEFAULT_LAMBDA,
    T: int = DEFAULT_T,
    seed: int = 0,
    *,
    train_X: np.ndarray | None = None,
    encoding: EncodingSpec | None = None,
) -> PegasosModel:
    """Run the count recursion for T steps, deterministic per seed."""
    if lam <= 0:
        raise ValueError("lambda must be positive")
    if T < 1:
        raise ValueError("T must be >= 1")
    y = np.asarray(y, dtype=int).reshape(-1)
    if y.size != K.n:
        raise ValueError("label count does not match kernel size")
    LabeledDataset(np.zeros((y.size, 1)), y).require_trainable()
    if not np.all(np.isfinite(K.entries)):
        raise ValueError("kernel matrix entries must be finite")
    ys = signed(y)
    counts = np.zeros(y.size, dtype=int)
    coeff = np.zeros(y.size)
    rng = np.random.Generator(np.random.PCG64(seed))
    margins = []
    for t in range(1, T + 1):
        i = int(rng.integers(0, y.size))
        margin = ys[i] * float(K.entries[i] @ coeff) / (lam * t)
        margins.append(margin)
        if margin < 1.0:
            counts[i] += 1
            coeff[i] += ys[i]
    return PegasosModel(
        lam=float(lam),
        T=int(T),
        counts=counts,
        seed=int(seed),
        train_y=y,
        train_X=None if train_X is None else np.asarray(train_X, dtype=float),
        encoding=encoding,
        margins=tuple(margins),
    )
