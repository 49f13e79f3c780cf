"""Independent reference implementations used to cross-check the package.

Everything here is written against plain state vectors or textbook linear
algebra, sharing no simulation code with the package: its own gate
matrices, its own encoding construction, its own PCA route.  Agreement
between these oracles and the package is the point of the dual-route
tests, so nothing below may import from noisyq's simulation internals.
"""

from __future__ import annotations

import math

import numpy as np

_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def sv_phase(theta: float) -> np.ndarray:
    return np.array([[1, 0], [0, np.exp(1j * theta)]], dtype=complex)


def sv_rx(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def sv_ry(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def sv_rz(theta: float) -> np.ndarray:
    return np.array(
        [[np.exp(-1j * theta / 2), 0], [0, np.exp(1j * theta / 2)]], dtype=complex
    )


def lift_single(u: np.ndarray, qubit: int, n: int) -> np.ndarray:
    """Embed a 2x2 operator acting on one qubit, qubit 0 most significant."""
    mats = [np.eye(2, dtype=complex)] * n
    mats[qubit] = u
    out = mats[0]
    for m in mats[1:]:
        out = np.kron(out, m)
    return out


def cx_matrix(control: int, target: int, n: int) -> np.ndarray:
    dim = 2**n
    out = np.zeros((dim, dim), dtype=complex)
    cbit = n - 1 - control
    tbit = n - 1 - target
    for col in range(dim):
        row = col ^ (1 << tbit) if (col >> cbit) & 1 else col
        out[row, col] = 1.0
    return out


class StateVector:
    """Minimal pure-state simulator over the same qubit ordering."""

    def __init__(self, n: int):
        self.n = n
        self.amp = np.zeros(2**n, dtype=complex)
        self.amp[0] = 1.0

    def apply(self, u: np.ndarray, qubit: int) -> None:
        self.amp = lift_single(u, qubit, self.n) @ self.amp

    def apply_cx(self, control: int, target: int) -> None:
        self.amp = cx_matrix(control, target, self.n) @ self.amp

    def density(self) -> np.ndarray:
        return np.outer(self.amp, self.amp.conj())


def _encode_angles_single(x: np.ndarray) -> np.ndarray:
    return 2.0 * x


def _encode_angle_pair(xi: float, xj: float) -> float:
    return 2.0 * (math.pi - xi) * (math.pi - xj)


def oracle_feature_state(x: np.ndarray, kind: str, reps: int = 2, paulis=("Z", "ZZ", "XY")) -> np.ndarray:
    """Statevector of the encoding circuit, built from the phase formulas
    directly."""
    x = np.asarray(x, dtype=float)
    n = x.size
    sv = StateVector(n)

    def z_layer():
        for q in range(n):
            sv.apply(_H, q)
        for q in range(n):
            sv.apply(sv_phase(_encode_angles_single(x)[q]), q)

    def zz_pairs():
        for i in range(n - 1):
            j = i + 1
            sv.apply_cx(i, j)
            sv.apply(sv_phase(_encode_angle_pair(x[i], x[j])), j)
            sv.apply_cx(i, j)

    def basis_in(ch: str, q: int):
        if ch == "X":
            sv.apply(_H, q)
        elif ch == "Y":
            sv.apply(sv_rx(math.pi / 2), q)

    def basis_out(ch: str, q: int):
        if ch == "X":
            sv.apply(_H, q)
        elif ch == "Y":
            sv.apply(sv_rx(-math.pi / 2), q)

    def pauli_block(term: str):
        if len(term) == 1:
            for q in range(n):
                basis_in(term[0], q)
                sv.apply(sv_phase(_encode_angles_single(x)[q]), q)
                basis_out(term[0], q)
        else:
            for i in range(n - 1):
                j = i + 1
                basis_in(term[0], i)
                basis_in(term[1], j)
                sv.apply_cx(i, j)
                sv.apply(sv_phase(_encode_angle_pair(x[i], x[j])), j)
                sv.apply_cx(i, j)
                basis_out(term[1], j)
                basis_out(term[0], i)

    for _ in range(reps):
        if kind == "z":
            z_layer()
        elif kind == "zz":
            z_layer()
            zz_pairs()
        elif kind == "pauli":
            for q in range(n):
                sv.apply(_H, q)
            for term in paulis:
                pauli_block(term)
        else:
            raise ValueError(kind)
    return sv.amp


def oracle_kernel(X: np.ndarray, kind: str, reps: int = 2, paulis=("Z", "ZZ", "XY")) -> np.ndarray:
    """|<psi_i|psi_j>|^2 for every pair of rows."""
    amps = np.array([oracle_feature_state(row, kind, reps, paulis) for row in X])
    overlaps = amps.conj() @ amps.T
    return np.abs(overlaps) ** 2


def oracle_ansatz_state(theta: np.ndarray, n: int, layers: int, start: np.ndarray) -> np.ndarray:
    """Trainable-layer action on a statevector: RY wall, then per layer a
    CX ring and another RY wall."""
    theta = np.asarray(theta, dtype=float).reshape(layers + 1, n)
    amp = start.astype(complex).copy()

    def ry_wall(row):
        nonlocal amp
        for q in range(n):
            amp = lift_single(sv_ry(theta[row, q]), q, n) @ amp

    ry_wall(0)
    for layer in range(1, layers + 1):
        if n > 1:
            for q in range(n):
                amp = cx_matrix(q, (q + 1) % n, n) @ amp
        ry_wall(layer)
    return amp


def oracle_pca(train: np.ndarray, dims: int):
    """Covariance-eigendecomposition PCA: mean and principal directions."""
    train = np.asarray(train, dtype=float)
    mean = train.mean(axis=0)
    centered = train - mean
    cov = centered.T @ centered
    evals, evecs = np.linalg.eigh(cov)
    order = np.argsort(evals)[::-1]
    return mean, evecs[:, order[:dims]], evals[order[:dims]]


def oracle_pegasos_counts(K: np.ndarray, y01: np.ndarray, lam: float, T: int, seed: int) -> np.ndarray:
    """Count recursion computed from scratch each step (no incremental
    coefficient cache)."""
    y = 2 * np.asarray(y01, dtype=int) - 1
    counts = np.zeros(y.size, dtype=int)
    rng = np.random.Generator(np.random.PCG64(seed))
    for t in range(1, T + 1):
        i = int(rng.integers(0, y.size))
        total = sum(counts[j] * y[j] * K[j, i] for j in range(y.size))
        if y[i] * total / (lam * t) < 1.0:
            counts[i] += 1
    return counts
