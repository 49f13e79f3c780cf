"""Variational classifiers over the shared rotation-plus-ring ansatz.

Two readout styles share the machinery: a probability readout on one qubit
trained with binary cross-entropy, and a weighted sum of per-qubit Z
expectations trained with a squared-hinge surrogate (the reported decision
stays the sign rule; the surrogate only smooths training).

Encoded input states do not depend on the trainable angles, so they are
computed once per dataset and the whole stack is pushed through the ansatz
in a single batched evolution per loss evaluation.

Two optimizers: simultaneous-perturbation stochastic descent (default,
seeded, two loss evaluations per estimate) and a deterministic gradient
mode built on exact +-pi/2 parameter shifts, which stay exact under noise
because the channels are angle-independent linear maps.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from noisyq.channels import NoiseConfig
from noisyq.classifiers.base import LabeledDataset, signed, to_binary
from noisyq.featuremaps import (
    DEFAULT_PAULIS,
    DEFAULT_REPS,
    FeatureMapKind,
    ansatz_param_count,
    build_ansatz,
)
from noisyq.kernels import EncodingSpec
from noisyq.simulator import evolve_batch

DEFAULT_LAYERS = 2
DEFAULT_EPOCHS = 50
PROB_EPS = 1e-9
SHIFT = np.pi / 2

SPSA_A = 2.0
SPSA_C = 0.2
SPSA_ALPHA = 0.602
SPSA_GAMMA = 0.101
DEFAULT_LR = 0.2


def _batch_probs(states: np.ndarray) -> np.ndarray:
    """Per-state normalized diagonal, negatives from roundoff clamped."""
    diag = np.diagonal(states, axis1=1, axis2=2).real.copy()
    np.clip(diag, 0.0, None, out=diag)
    totals = diag.sum(axis=1, keepdims=True)
    if np.any(totals <= 0.0):
        raise ValueError("a state in the batch has no diagonal mass")
    return diag / totals


def _readout_mask(n: int, readout_qubit: int, parity: bool) -> np.ndarray:
    idx = np.arange(1 << n)
    if parity:
        bits = (idx[:, None] >> np.arange(n)[None, :]) & 1
        return (bits.sum(axis=1) & 1).astype(bool)
    if not 0 <= readout_qubit < n:
        raise ValueError(f"readout qubit {readout_qubit} out of range")
    return (((idx >> (n - 1 - readout_qubit)) & 1) == 1)


def qnn_batch_probs(
    encoded: np.ndarray,
    theta: np.ndarray,
    *,
    layers: int,
    noise: NoiseConfig | None = None,
    readout_qubit: int = 0,
    parity: bool = False,
) -> np.ndarray:
    """Forward pass: ansatz evolution then one-qubit (or parity) readout."""
    n = encoded.shape[1].bit_length() - 1
    circuit = build_ansatz(n, layers, np.asarray(theta, dtype=float))
    out = evolve_batch(circuit, noise, encoded.copy())
    probs = _batch_probs(out)
    mask = _readout_mask(n, readout_qubit, parity)
    return np.clip(probs[:, mask].sum(axis=1), 0.0, 1.0)


def z_expectations(states: np.ndarray) -> np.ndarray:
    """Per-qubit Z expectations of a state stack, shape (batch, n)."""
    probs = _batch_probs(states)
    n = states.shape[1].bit_length() - 1
    idx = np.arange(1 << n)
    signs = 1.0 - 2.0 * (((idx[:, None] >> (n - 1 - np.arange(n))[None, :])) & 1)
    return probs @ signs


def vqc_batch_expectations(
    encoded: np.ndarray,
    theta: np.ndarray,
    *,
    layers: int,
    noise: NoiseConfig | None = None,
) -> np.ndarray:
    n = encoded.shape[1].bit_length() - 1
    circuit = build_ansatz(n, layers, np.asarray(theta, dtype=float))
    return z_expectations(evolve_batch(circuit, noise, encoded.copy()))


def bce_loss(p: np.ndarray, y: np.ndarray) -> float:
    """Binary cross-entropy with probabilities clamped to [eps, 1-eps]."""
    p = np.clip(np.asarray(p, dtype=float), PROB_EPS, 1.0 - PROB_EPS)
    y = np.asarray(y, dtype=float)
    return float(-np.mean(y * np.log(p) + (1.0 - y) * np.log1p(-p)))


def squared_hinge_loss(margins: np.ndarray, y: np.ndarray) -> float:
    h = np.maximum(0.0, 1.0 - signed(y) * np.asarray(margins, dtype=float))
    return float(np.mean(h * h))


def spsa_gradient(loss_fn, theta: np.ndarray, c_t: float, rng: np.random.Generator, avg: int = 1) -> np.ndarray:
    """Simultaneous-perturbation estimate, optionally averaged over draws."""
    g = np.zeros_like(theta)
    for _ in range(avg):
        delta = rng.integers(0, 2, size=theta.size) * 2.0 - 1.0
        lp = loss_fn(theta + c_t * delta)
        lm = loss_fn(theta - c_t * delta)
        g += ((lp - lm) / (2.0 * c_t)) * delta
    return g / avg


def _spsa_minimize(loss_fn, theta0, *, epochs, rng, a, c, big_a, avg):
    theta = np.array(theta0, dtype=float)
    trace = [loss_fn(theta)]
    for t in range(1, epochs + 1):
        a_t = a / (big_a + t) ** SPSA_ALPHA
        c_t = c / t**SPSA_GAMMA
        theta = theta - a_t * spsa_gradient(loss_fn, theta, c_t, rng, avg)
        trace.append(loss_fn(theta))
    return theta, trace


def _gd_minimize(loss_fn, grad_fn, theta0, *, epochs, lr):
    theta = np.array(theta0, dtype=float)
    trace = [loss_fn(theta)]
    for _ in range(epochs):
        theta = theta - lr * grad_fn(theta)
        trace.append(loss_fn(theta))
    return theta, trace


def qnn_shift_gradient(
    encoded: np.ndarray,
    y: np.ndarray,
    theta: np.ndarray,
    *,
    layers: int,
    noise: NoiseConfig | None = None,
    readout_qubit: int = 0,
    parity: bool = False,
) -> np.ndarray:
    """Exact cross-entropy gradient via +-pi/2 shifts of each angle."""
    theta = np.asarray(theta, dtype=float)
    y = np.asarray(y, dtype=float)
    kw = dict(layers=layers, noise=noise, readout_qubit=readout_qubit, parity=parity)
    p = qnn_batch_probs(encoded, theta, **kw)
    interior = (p > PROB_EPS) & (p < 1.0 - PROB_EPS)
    pc = np.clip(p, PROB_EPS, 1.0 - PROB_EPS)
    dldp = np.where(interior, (pc - y) / (pc * (1.0 - pc)), 0.0) / y.size
    grad = np.zeros(theta.size)
    for k in range(theta.size):
        tp = theta.copy()
        tp[k] += SHIFT
        tm = theta.copy()
        tm[k] -= SHIFT
        dp = (qnn_batch_probs(encoded, tp, **kw) - qnn_batch_probs(encoded, tm, **kw)) / 2.0
        grad[k] = float(dldp @ dp)
    return grad


def vqc_shift_gradient(
    encoded: np.ndarray,
    y: np.ndarray,
    theta: np.ndarray,
    weights: np.ndarray,
    *,
    layers: int,
    noise: NoiseConfig | None = None,
) -> tuple:
    """Squared-hinge gradients (d theta, d weights) via parameter shifts."""
    theta = np.asarray(theta, dtype=float)
    weights = np.asarray(weights, dtype=float)
    ys = signed(y)
    ex = vqc_batch_expectations(encoded, theta, layers=layers, noise=noise)
    h = np.maximum(0.0, 1.0 - ys * (ex @ weights))
    dldm = (2.0 / ys.size) * h * (-ys)
    grad_w = ex.T @ dldm
    grad_theta = np.zeros(theta.size)
    for k in range(theta.size):
        tp = theta.copy()
        tp[k] += SHIFT
        tm = theta.copy()
        tm[k] -= SHIFT
        dex = (
            vqc_batch_expectations(encoded, tp, layers=layers, noise=noise)
            - vqc_batch_expectations(encoded, tm, layers=layers, noise=noise)
        ) / 2.0
        grad_theta[k] = float(dldm @ (dex @ weights))
    return grad_theta, grad_w


@dataclass(frozen=True)
class VariationalModel:
    ALGORITHM_TAGS = ("qnn", "vqc")

    algorithm: str
    theta: np.ndarray
    layers: int
    encoding: EncodingSpec
    epochs: int
    seed: int
    optimizer: str
    loss_trace: tuple
    readout_qubit: int = 0
    parity: bool = False
    weights: np.ndarray | None = None

    def predict_proba_features(self, X: np.ndarray) -> np.ndarray:
        if self.algorithm != "qnn":
            raise ValueError("probability readout is the qnn path")
        encoded = self.encoding.encode(X)
        return qnn_batch_probs(
            encoded,
            self.theta,
            layers=self.layers,
            noise=self.encoding.noise,
            readout_qubit=self.readout_qubit,
            parity=self.parity,
        )

    def margins_features(self, X: np.ndarray) -> np.ndarray:
        if self.algorithm != "vqc":
            raise ValueError("weighted-expectation margins are the vqc path")
        encoded = self.encoding.encode(X)
        ex = vqc_batch_expectations(
            encoded, self.theta, layers=self.layers, noise=self.encoding.noise
        )
        return ex @ self.weights

    def predict_features(self, X: np.ndarray) -> np.ndarray:
        if self.algorithm == "qnn":
            return to_binary(self.predict_proba_features(X) - 0.5)
        return to_binary(self.margins_features(X))

    def to_doc(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "seed": self.seed,
            "hyperparameters": {
                "layers": self.layers,
                "epochs": self.epochs,
                "optimizer": self.optimizer,
                "readout_qubit": self.readout_qubit,
                "parity": self.parity,
                "encoding": self.encoding.to_doc(),
            },
            "parameters": {
                "theta": self.theta.tolist(),
                "weights": None if self.weights is None else self.weights.tolist(),
            },
            "training_trace": {"loss": list(self.loss_trace)},
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "VariationalModel":
        hp, par = doc["hyperparameters"], doc["parameters"]
        return cls(
            algorithm=doc["algorithm"],
            theta=np.asarray(par["theta"], dtype=float),
            layers=int(hp["layers"]),
            encoding=EncodingSpec.from_doc(hp["encoding"]),
            epochs=int(hp["epochs"]),
            seed=int(doc["seed"]),
            optimizer=str(hp["optimizer"]),
            loss_trace=tuple(doc["training_trace"]["loss"]),
            readout_qubit=int(hp["readout_qubit"]),
            parity=bool(hp["parity"]),
            weights=None if par.get("weights") is None else np.asarray(par["weights"], dtype=float),
        )


def qnn_forward(
    x: np.ndarray,
    theta: np.ndarray,
    fm: FeatureMapKind,
    noise: NoiseConfig | None = None,
    *,
    reps: int = DEFAULT_REPS,
    paulis: tuple = DEFAULT_PAULIS,
    layers: int = DEFAULT_LAYERS,
    readout_qubit: int = 0,
    parity: bool = False,
) -> float:
    """Single-sample probability that the readout measures 1."""
    spec = EncodingSpec(fm=FeatureMapKind(fm), reps=reps, paulis=paulis, noise=noise)
    encoded = spec.encode(np.atleast_2d(np.asarray(x, dtype=float)))
    p = qnn_batch_probs(
        encoded,
        np.asarray(theta, dtype=float),
        layers=layers,
        noise=noise,
        readout_qubit=readout_qubit,
        parity=parity,
    )
    return float(p[0])


def _check_trainable(data: LabeledDataset, epochs: int) -> None:
    if epochs < 1:
        raise ValueError("epochs must be >= 1")
    if len(np.unique(data.y)) < 2:
        warnings.warn("training on single-class data", stacklevel=3)


def qnn_train(
    data: LabeledDataset,
    fm: FeatureMapKind,
    noise: NoiseConfig | None = None,
    epochs: int = DEFAULT_EPOCHS,
    seed: int = 0,
    *,
    reps: int = DEFAULT_REPS,
    paulis: tuple = DEFAULT_PAULIS,
    layers: int = DEFAULT_LAYERS,
    readout_qubit: int = 0,
    parity: bool = False,
    optimizer: str = "spsa",
    spsa_a: float = SPSA_A,
    spsa_c: float = SPSA_C,
    spsa_avg: int = 1,
    lr: float = DEFAULT_LR,
) -> VariationalModel:
    """Minimize cross-entropy of the readout probability against the labels."""
    _check_trainable(data, epochs)
    spec = EncodingSpec(fm=FeatureMapKind(fm), reps=reps, paulis=paulis, noise=noise)
    encoded = spec.encode(data.X)
    n_params = ansatz_param_count(data.dim, layers)
    rng = np.random.Generator(np.random.PCG64(seed))
    theta0 = rng.uniform(-0.1, 0.1, size=n_params)
    kw = dict(layers=layers, noise=noise, readout_qubit=readout_qubit, parity=parity)

    def loss_fn(th):
        return bce_loss(qnn_batch_probs(encoded, th, **kw), data.y)

    if optimizer == "spsa":
        theta, trace = _spsa_minimize(
            loss_fn,
            theta0,
            epochs=epochs,
            rng=rng,
            a=spsa_a,
            c=spsa_c,
            big_a=max(1.0, 0.1 * epochs),
            avg=spsa_avg,
        )
    elif optimizer == "shift":
        grad_fn = lambda th: qnn_shift_gradient(encoded, data.y, th, **kw)
        theta, trace = _gd_minimize(loss_fn, grad_fn, theta0, epochs=epochs, lr=lr)
    else:
        raise ValueError(f"unknown optimizer {optimizer!r}")
    return VariationalModel(
        algorithm="qnn",
        theta=theta,
        layers=layers,
        encoding=spec,
        epochs=epochs,
        seed=seed,
        optimizer=optimizer,
        loss_trace=tuple(trace),
        readout_qubit=readout_qubit,
        parity=parity,
    )


def vqc_train(
    data: LabeledDataset,
    fm: FeatureMapKind,
    noise: NoiseConfig | None = None,
    epochs: int = DEFAULT_EPOCHS,
    seed: int = 0,
    *,
    reps: int = DEFAULT_REPS,
    paulis: tuple = DEFAULT_PAULIS,
    layers: int = DEFAULT_LAYERS,
    optimizer: str = "spsa",
    spsa_a: float = SPSA_A,
    spsa_c: float = SPSA_C,
    spsa_avg: int = 1,
    lr: float = DEFAULT_LR,
) -> VariationalModel:
    """Jointly train the ansatz angles and the per-qubit readout weights."""
    _check_trainable(data, epochs)
    spec = EncodingSpec(fm=FeatureMapKind(fm), reps=reps, paulis=paulis, noise=noise)
    encoded = spec.encode(data.X)
    n_theta = ansatz_param_count(data.dim, layers)
    rng = np.random.Generator(np.random.PCG64(seed))
    theta0 = rng.uniform(-0.1, 0.1, size=n_theta)
    w0 = np.ones(data.dim)
    packed0 = np.concatenate([theta0, w0])

    def unpack(v):
        return v[:n_theta], v[n_theta:]

    def loss_fn(v):
        th, w = unpack(v)
        ex = vqc_batch_expectations(encoded, th, layers=layers, noise=noise)
        return squared_hinge_loss(ex @ w, data.y)

    if optimizer == "spsa":
        packed, trace = _spsa_minimize(
            loss_fn,
            packed0,
            epochs=epochs,
            rng=rng,
            a=spsa_a,
            c=spsa_c,
            big_a=max(1.0, 0.1 * epochs),
            avg=spsa_avg,
        )
    elif optimizer == "shift":

        def grad_fn(v):
            th, w = unpack(v)
            gt, gw = vqc_shift_gradient(encoded, data.y, th, w, layers=layers, noise=noise)
            return np.concatenate([gt, gw])

        packed, trace = _gd_minimize(loss_fn, grad_fn, packed0, epochs=epochs, lr=lr)
    else:
        raise ValueError(f"unknown optimizer {optimizer!r}")
    theta, weights = unpack(packed)
    return VariationalModel(
        algorithm="vqc",
        theta=theta,
        layers=layers,
        encoding=spec,
        epochs=epochs,
        seed=seed,
        optimizer=optimizer,
        loss_trace=tuple(trace),
        weights=weights,
    )


def vqc_decision(x: np.ndarray, model: VariationalModel) -> int:
    """Sign of the weighted Z-expectation sum; an exact zero resolves to 1."""
    return int(model.predict_features(np.atleast_2d(np.asarray(x, dtype=float)))[0])
