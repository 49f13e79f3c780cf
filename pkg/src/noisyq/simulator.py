"""Density-matrix evolution through circuits with per-gate noise insertion,
Born-rule probabilities, and seeded measurement sampling.

The hot path is batched: a whole stack of density matrices moves through
the same circuit in one pass, which is what the kernel and training layers
rely on.  Noise is attached after every gate, one channel application per
participating qubit.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from noisyq import backend
from noisyq.channels import NoiseConfig
from noisyq.dmcore import DensityMatrix
from noisyq.featuremaps import Circuit, GateKind, gate_matrix

logger = logging.getLogger(__name__)

RENORM_LOG_TOL = 1e-9


def evolve_batch(
    circuit: Circuit,
    noise: NoiseConfig | None,
    states: np.ndarray,
) -> np.ndarray:
    """Evolve a (batch, 2**n, 2**n) stack through one circuit.

    The input stack is consumed; callers use the returned array.  With a
    noise config, the channel for noise.level is applied to each qubit a
    gate touches, immediately after that gate, in the gate's qubit order.
    """
    n = circuit.n_qubits
    if states.ndim != 3 or states.shape[1] != 1 << n or states.shape[2] != 1 << n:
        raise ValueError(
            f"state stack shape {states.shape} does not match a {n}-qubit circuit"
        )
    states = np.ascontiguousarray(states, dtype=np.complex128)
    kraus = noise.channel().stacked() if noise is not None else None
    for gate in circuit.gates:
        if gate.kind is GateKind.CX:
            control, target = gate.qubits
            states = backend.apply_cx(states, control, target, n)
        else:
            (q,) = gate.qubits
            states = backend.apply_1q_unitary(states, gate_matrix(gate), q, n)
        if kraus is not None:
            for q in gate.qubits:
                states = backend.apply_1q_kraus(states, kraus, q, n)
    return states


def evolve(
    circuit: Circuit,
    noise: NoiseConfig | None,
    initial: DensityMatrix,
) -> DensityMatrix:
    """Single-state wrapper around :func:`evolve_batch`."""
    if circuit.n_qubits != initial.n_qubits:
        raise ValueError(
            f"circuit has {circuit.n_qubits} qubits but state has {initial.n_qubits}"
        )
    out = evolve_batch(circuit, noise, initial.mat[None].copy())
    return DensityMatrix(out[0], copy=False)


def born_probabilities(rho: DensityMatrix) -> np.ndarray:
    """diag(rho) normalized into a probability vector over basis labels.

    Tiny negative diagonal entries from roundoff are clamped at zero.  When
    a trace-shrinking channel has been used the division renormalizes, and
    the shrinkage is logged rather than hidden.
    """
    diag = np.diag(rho.mat).real.copy()
    np.clip(diag, 0.0, None, out=diag)
    total = diag.sum()
    if total <= 0.0:
        raise ValueError("state has no probability mass on the diagonal")
    if abs(total - 1.0) > RENORM_LOG_TOL:
        logger.info("renormalizing diagonal mass %.12f to 1", total)
    return diag / total


def basis_labels(n_qubits: int) -> list:
    """All basis-state labels in ascending binary order, qubit 0 leftmost."""
    return [format(i, f"0{n_qubits}b") for i in range(1 << n_qubits)]


@dataclass(frozen=True)
class CountsMap:
    """Measurement histogram: label -> count, labels in ascending binary order."""

    n_qubits: int
    shots: int
    counts: dict

    def __post_init__(self):
        if sum(self.counts.values()) != self.shots:
            raise ValueError("counts must sum to shots")
        if any(len(k) != self.n_qubits for k in self.counts):
            raise ValueError("labels must all have length n_qubits")

    def frequency(self, label: str) -> float:
        return self.counts.get(label, 0) / self.shots


def sample_counts(rho: DensityMatrix, shots: int, seed: int) -> CountsMap:
    """Multinomial draw from the Born distribution, bit-exact per seed.

    Sampling is inverse-CDF over labels in ascending binary order using the
    PCG64 stream, so a fixed seed reproduces the same map on any platform.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    probs = born_probabilities(rho)
    cum = np.cumsum(probs)
    cum[-1] = 1.0
    rng = np.random.Generator(np.random.PCG64(seed))
    draws = np.searchsorted(cum, rng.random(shots), side="right")
    hist = np.bincount(draws, minlength=probs.size)
    labels = basis_labels(rho.n_qubits)
    counts = {label: int(c) for label, c in zip(labels, hist)}
    return CountsMap(n_qubits=rho.n_qubits, shots=shots, counts=counts)


def readout_probability_one(rho: DensityMatrix, qubit: int) -> float:
    """Marginal probability that one qubit reads out as 1."""
    n = rho.n_qubits
    if not 0 <= qubit < n:
        raise ValueError(f"qubit {qubit} out of range for {n} qubits")
    probs = born_probabilities(rho)
    idx = np.arange(probs.size)
    mask = (idx >> (n - 1 - qubit)) & 1
    p = float(probs[mask == 1].sum())
    return min(max(p, 0.0), 1.0)


def write_counts_csv(cm: CountsMap, path, *, seed: int, noise: NoiseConfig | None) -> None:
    """Serialize a histogram as `label,count` rows behind one metadata comment."""
    if noise is None:
        noise_part = "noise=none"
    else:
        noise_part = f"noise={noise.kind.value} level={noise.level:g}"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# shots={cm.shots} seed={seed} {noise_part}\n")
        fh.write("label,count\n")
        for label, count in cm.counts.items():
            fh.write(f"{label},{count}\n")
