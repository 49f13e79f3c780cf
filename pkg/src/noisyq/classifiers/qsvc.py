"""Soft-margin kernel SVM trained by sequential pairwise optimization.

The solver works on a jittered copy of the Gram matrix (diagonal + 1e-8)
for numerical safety; reported kernels and stored models keep the raw
values.  Iteration order is fixed (ascending indices, ties to the lowest
index) so training is bit-reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from noisyq.classifiers.base import LabeledDataset, signed, to_binary
from noisyq.kernels import EncodingSpec, KernelMatrix, cross_gram_from_states

KKT_TOL = 1e-6
DIAG_JITTER = 1e-8
_BOUND_EPS = 1e-12
_STEP_EPS = 1e-12


@dataclass(frozen=True)
class QsvcModel:
    ALGORITHM_TAGS = ("qsvc",)

    alphas: np.ndarray
    bias: float
    C: float
    train_y: np.ndarray
    train_X: np.ndarray | None = None
    encoding: EncodingSpec | None = None
    kkt_residual: float = float("nan")
    steps: int = 0
    converged: bool = True

    @property
    def support_indices(self) -> np.ndarray:
        return np.flatnonzero(self.alphas > _BOUND_EPS)

    def decision_values(self, k_rows: np.ndarray) -> np.ndarray:
        """f(x) = sum_i alpha_i y_i K(x_i, x) + b over precomputed rows."""
        k_rows = np.atleast_2d(np.asarray(k_rows, dtype=float))
        if k_rows.shape[1] != self.alphas.size:
            raise ValueError(
                f"kernel rows have {k_rows.shape[1]} columns, expected {self.alphas.size}"
            )
        return k_rows @ (self.alphas * signed(self.train_y)) + self.bias

    def predict_rows(self, k_rows: np.ndarray) -> np.ndarray:
        return to_binary(self.decision_values(k_rows))

    def predict_features(self, X: np.ndarray) -> np.ndarray:
        """Encode fresh feature rows against the embedded training set."""
        if self.train_X is None or self.encoding is None:
            raise ValueError("model carries no embedded training features")
        test_states = self.encoding.encode(X)
        train_states = self.encoding.encode(self.train_X)
        return self.predict_rows(cross_gram_from_states(test_states, train_states))

    def to_doc(self) -> dict:
        return {
            "algorithm": "qsvc",
            "seed": None,
            "hyperparameters": {
                "C": self.C,
                "encoding": None if self.encoding is None else self.encoding.to_doc(),
            },
            "parameters": {
                "alphas": self.alphas.tolist(),
                "bias": self.bias,
                "train_y": self.train_y.tolist(),
                "train_X": None if self.train_X is None else self.train_X.tolist(),
            },
            "training_trace": {
                "kkt_residual": self.kkt_residual,
                "steps": self.steps,
                "converged": self.converged,
            },
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "QsvcModel":
        hp, par, trace = doc["hyperparameters"], doc["parameters"], doc["training_trace"]
        enc = hp.get("encoding")
        return cls(
            alphas=np.asarray(par["alphas"], dtype=float),
            bias=float(par["bias"]),
            C=float(hp["C"]),
            train_y=np.asarray(par["train_y"], dtype=int),
            train_X=None if par.get("train_X") is None else np.asarray(par["train_X"], dtype=float),
            encoding=None if enc is None else EncodingSpec.from_doc(enc),
            kkt_residual=float(trace["kkt_residual"]),
            steps=int(trace["steps"]),
            converged=bool(trace["converged"]),
        )


class _Smo:
    """One training run's mutable state."""

    def __init__(self, K: np.ndarray, y: np.ndarray, C: float, tol: float):
        self.K = K
        self.y = y.astype(float)
        self.C = C
        self.tol = tol
        n = y.size
        self.alpha = np.zeros(n)
        self.b = 0.0
        # F_i = sum_j alpha_j y_j K[j, i]; error E_i = F_i + b - y_i
        self.F = np.zeros(n)
        self.steps = 0

    def _nonbound(self) -> np.ndarray:
        return np.flatnonzero(
            (self.alpha > _BOUND_EPS) & (self.alpha < self.C - _BOUND_EPS)
        )

    def _take_step(self, i1: int, i2: int) -> bool:
        if i1 == i2:
            return False
        K, y, C = self.K, self.y, self.C
        a1, a2 = self.alpha[i1], self.alpha[i2]
        y1, y2 = y[i1], y[i2]
        e1 = self.F[i1] + self.b - y1
        e2 = self.F[i2] + self.b - y2
        s = y1 * y2
        if s < 0:
            low, high = max(0.0, a2 - a1), min(C, C + a2 - a1)
        else:
            low, high = max(0.0, a1 + a2 - C), min(C, a1 + a2)
        if high - low < _STEP_EPS:
            return False
        k11, k12, k22 = K[i1, i1], K[i1, i2], K[i2, i2]
        eta = k11 + k22 - 2.0 * k12
        if eta > 1e-15:
            a2n = a2 + y2 * (e1 - e2) / eta
            a2n = min(max(a2n, low), high)
        else:
            # degenerate curvature: move to whichever clip endpoint improves
            # the dual objective more
            gain_low = self._objective_gain(i1, i2, a2, a1, s, low, k11, k12, k22)
            gain_high = self._objective_gain(i1, i2, a2, a1, s, high, k11, k12, k22)
            if gain_low > gain_high + _STEP_EPS:
                a2n = low
            elif gain_high > gain_low + _STEP_EPS:
                a2n = high
            else:
                return False
        if abs(a2n - a2) < _STEP_EPS * (a2n + a2 + _STEP_EPS):
            return False
        a1n = a1 + s * (a2 - a2n)
        # snap roundoff onto the box
        a1n = min(max(a1n, 0.0), C)
        d1, d2 = a1n - a1, a2n - a2
        self.alpha[i1], self.alpha[i2] = a1n, a2n
        self.F += y1 * d1 * K[i1] + y2 * d2 * K[i2]
        if _BOUND_EPS < a1n < C - _BOUND_EPS:
            self.b = y1 - self.F[i1]
        elif _BOUND_EPS < a2n < C - _BOUND_EPS:
            self.b = y2 - self.F[i2]
        else:
            self.b = ((y1 - self.F[i1]) + (y2 - self.F[i2])) / 2.0
        self.steps += 1
        return True

    def _objective_gain(self, i1, i2, a2, a1, s, a2n, k11, k12, k22) -> float:
        d2 = a2n - a2
        d1 = s * (a2 - a2n)
        y1, y2 = self.y[i1], self.y[i2]
        return (
            d1
            + d2
            - d1 * y1 * self.F[i1]
            - d2 * y2 * self.F[i2]
            - 0.5 * (d1 * d1 * k11 + d2 * d2 * k22 + 2.0 * s * d1 * d2 * k12)
        )

    def _examine(self, i2: int) -> int:
        y2 = self.y[i2]
        a2 = self.alpha[i2]
        e2 = self.F[i2] + self.b - y2
        r2 = e2 * y2
        violates = (r2 < -self.tol and a2 < self.C - _BOUND_EPS) or (
            r2 > self.tol and a2 > _BOUND_EPS
        )
        if not violates:
            return 0
        nonbound = self._nonbound()
        if nonbound.size > 1:
            errors = self.F[nonbound] + self.b - self.y[nonbound]
            i1 = int(nonbound[np.argmax(np.abs(errors - e2))])
            if self._take_step(i1, i2):
                return 1
        for i1 in nonbound:
            if self._take_step(int(i1), i2):
                return 1
        for i1 in range(self.y.size):
            if self._take_step(i1, i2):
                return 1
        return 0

    def solve(self, max_passes: int = 1000) -> bool:
        examine_all = True
        for _ in range(max_passes):
            changed = 0
            targets = range(self.y.size) if examine_all else self._nonbound()
            for i2 in targets:
                changed += self._examine(int(i2))
            if examine_all:
                if changed == 0:
                    return True
                examine_all = False
            elif changed == 0:
                examine_all = True
        return False

    def kkt_residual(self) -> float:
        margins = self.y * (self.F + self.b) - 1.0
        worst = 0.0
        for i in range(self.y.size):
            a = self.alpha[i]
            if a <= _BOUND_EPS:
                worst = max(worst, -margins[i])
            elif a >= self.C - _BOUND_EPS:
                worst = max(worst, margins[i])
            else:
                worst = max(worst, abs(margins[i]))
        return worst


def qsvc_train(
    K: KernelMatrix,
    y: np.ndarray,
    C: float = 1.0,
    *,
    tol: float = KKT_TOL,
    train_X: np.ndarray | None = None,
    encoding: EncodingSpec | None = None,
) -> QsvcModel:
    """Fit the dual problem on a precomputed Gram matrix."""
    if C <= 0:
        raise ValueError("C must be positive")
    y = np.asarray(y, dtype=int).reshape(-1)
    if y.size != K.n:
        raise ValueError("label count does not match kernel size")
    LabeledDataset(np.zeros((y.size, 1)), y).require_trainable()
    work = K.entries.copy()
    work[np.diag_indices_from(work)] += DIAG_JITTER
    smo = _Smo(work, signed(y).astype(float), C, tol)
    converged = smo.solve()
    return QsvcModel(
        alphas=smo.alpha,
        bias=float(smo.b),
        C=float(C),
        train_y=y,
        train_X=None if train_X is None else np.asarray(train_X, dtype=float),
        encoding=encoding,
        kkt_residual=float(smo.kkt_residual()),
        steps=smo.steps,
        converged=converged,
    )
