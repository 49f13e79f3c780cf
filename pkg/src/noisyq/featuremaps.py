"""Gate-list circuits: data-encoding feature maps and the trainable ansatz.

Angle conventions for the encoders: a single-feature phase gets angle
2*x_i, a pairwise phase gets angle 2*(pi - x_i)*(pi - x_j), entanglement is
linear (pairs (i, i+1)).  Features are expected pre-scaled to [0, pi] by
the data layer; phase encoding is 2*pi periodic so unscaled inputs alias.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from noisyq.dmcore import ID2, MAX_QUBITS


class GateKind(str, enum.Enum):
    H = "h"
    RX = "rx"
    RY = "ry"
    RZ = "rz"
    PHASE = "phase"
    CX = "cx"


_ANGLED = frozenset({GateKind.RX, GateKind.RY, GateKind.RZ, GateKind.PHASE})


@dataclass(frozen=True)
class Gate:
    kind: GateKind
    qubits: tuple
    angle: float | None = None

    def __post_init__(self):
        if self.kind is GateKind.CX:
            if len(self.qubits) != 2 or self.qubits[0] == self.qubits[1]:
                raise ValueError("cx needs two distinct qubits")
            if self.angle is not None:
                raise ValueError("cx takes no angle")
        else:
            if len(self.qubits) != 1:
                raise ValueError(f"{self.kind.value} acts on exactly one qubit")
            if self.kind in _ANGLED:
                if self.angle is None or not math.isfinite(self.angle):
                    raise ValueError(f"{self.kind.value} needs a finite angle")
            elif self.angle is not None:
                raise ValueError("h takes no angle")


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    gates: tuple

    def __post_init__(self):
        if not 1 <= self.n_qubits <= MAX_QUBITS:
            raise ValueError(f"n_qubits must be in [1, {MAX_QUBITS}]")
        for g in self.gates:
            if any(not 0 <= q < self.n_qubits for q in g.qubits):
                raise ValueError(f"gate {g} addresses a qubit outside the register")

    def __len__(self) -> int:
        return len(self.gates)


class FeatureMapKind(str, enum.Enum):
    Z = "z"
    ZZ = "zz"
    PAULI = "pauli"


DEFAULT_PAULIS = ("Z", "ZZ", "XY")
DEFAULT_REPS = 2
MAX_REPS = 4


def _check_features(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float).reshape(-1)
    if not np.all(np.isfinite(x)):
        raise ValueError("features must be finite")
    return x


def _check_reps(reps: int) -> int:
    if not 1 <= reps <= MAX_REPS:
        raise ValueError(f"reps must be in [1, {MAX_REPS}], got {reps}")
    return reps


def _single_angle(x: np.ndarray, i: int) -> float:
    return 2.0 * float(x[i])

def _pair_angle(x: np.ndarray, i: int, j: int) -> float:
    return 2.0 * (math.pi - float(x[i])) * (math.pi - float(x[j]))


def _z_layer(x: np.ndarray, n: int) -> list:
    gates = [Gate(GateKind.H, (q,)) for q in range(n)]
    gates += [Gate(GateKind.PHASE, (q,), _single_angle(x, q)) for q in range(n)]
    return gates


def _zz_pairs(x: np.ndarray, n: int) -> list:
    gates = []
    for i in range(n - 1):
        j = i + 1
        gates.append(Gate(GateKind.CX, (i, j)))
        gates.append(Gate(GateKind.PHASE, (j,), _pair_angle(x, i, j)))
        gates.append(Gate(GateKind.CX, (i, j)))
    return gates


# basis change into the Z eigenframe for each Pauli axis; None means no gate
_BASIS_IN = {"Z": None, "X": (GateKind.H, None), "Y": (GateKind.RX, math.pi / 2)}
_BASIS_OUT = {"Z": None, "X": (GateKind.H, None), "Y": (GateKind.RX, -math.pi / 2)}


def _pauli_block(x: np.ndarray, n: int, string: str) -> list:
    if not string or any(c not in "XYZ" for c in string):
        raise ValueError(f"pauli string {string!r} must be nonempty over X/Y/Z")
    if len(string) > 2:
        raise ValueError("pauli strings longer than 2 are out of scope (linear pairs only)")
    gates = []
    if len(string) == 1:
        targets = [(q,) for q in range(n)]
    else:
        targets = [(i, i + 1) for i in range(n - 1)]
    for qubits in targets:
        # conjugate the phase block into each axis' eigenframe
        for c, q in zip(string, qubits):
            gate = _BASIS_IN[c]
            if gate is not None:
                gates.append(Gate(gate[0], (q,), gate[1]))
        if len(qubits) == 1:
            gates.append(Gate(GateKind.PHASE, qubits, _single_angle(x, qubits[0])))
        else:
            i, j = qubits
            gates.append(Gate(GateKind.CX, (i, j)))
            gates.append(Gate(GateKind.PHASE, (j,), _pair_angle(x, i, j)))
            gates.append(Gate(GateKind.CX, (i, j)))
        for c, q in reversed(list(zip(string, qubits))):
            gate = _BASIS_OUT[c]
            if gate is not None:
                gates.append(Gate(gate[0], (q,), gate[1]))
    return gates


def build_feature_map(
    kind: FeatureMapKind,
    x: np.ndarray,
    *,
    reps: int = DEFAULT_REPS,
    paulis: tuple = DEFAULT_PAULIS,
) -> Circuit:
    """Encode a feature vector of length d into a d-qubit circuit."""
    kind = FeatureMapKind(kind)
    x = _check_features(x)
    reps = _check_reps(reps)
    n = x.size
    if not 1 <= n <= MAX_QUBITS:
        raise ValueError(f"feature dimension {n} outside [1, {MAX_QUBITS}]")
    gates = []
    for _ in range(reps):
        if kind is FeatureMapKind.Z:
            gates += _z_layer(x, n)
        elif kind is FeatureMapKind.ZZ:
            gates += _z_layer(x, n)
            gates += _zz_pairs(x, n)
        else:
            gates += [Gate(GateKind.H, (q,)) for q in range(n)]
            for string in paulis:
                gates += _pauli_block(x, n, string)
    return Circuit(n_qubits=n, gates=tuple(gates))


def ansatz_param_count(n_qubits: int, layers: int) -> int:
    return n_qubits * (layers + 1)


def build_ansatz(n_qubits: int, layers: int, theta: np.ndarray) -> Circuit:
    """Trainable circuit: RY rotation layers alternating with a CX ring.

    Needs n_qubits * (layers + 1) angles; a single qubit gets no ring.
    """
    theta = np.asarray(theta, dtype=float).reshape(-1)
    want = ansatz_param_count(n_qubits, layers)
    if theta.size != want:
        raise ValueError(f"expected {want} parameters for {n_qubits} qubits / {layers} layers, got {theta.size}")
    if not np.all(np.isfinite(theta)):
        raise ValueError("parameters must be finite")
    gates = [Gate(GateKind.RY, (q,), float(theta[q])) for q in range(n_qubits)]
    for layer in range(layers):
        if n_qubits >= 2:
            gates += [Gate(GateKind.CX, (i, (i + 1) % n_qubits)) for i in range(n_qubits)]
        base = (layer + 1) * n_qubits
        gates += [Gate(GateKind.RY, (q,), float(theta[base + q])) for q in range(n_qubits)]
    return Circuit(n_qubits=n_qubits, gates=tuple(gates))


_H_MAT = np.array([[1, 1], [1, -1]], dtype=np.complex128) / math.sqrt(2)


def gate_matrix(gate: Gate) -> np.ndarray:
    """2x2 matrix of a single-qubit gate (CX is handled by lifting)."""
    if gate.kind is GateKind.H:
        return _H_MAT
    a = gate.angle
    if gate.kind is GateKind.RX:
        c, s = math.cos(a / 2), math.sin(a / 2)
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=np.complex128)
    if gate.kind is GateKind.RY:
        c, s = math.cos(a / 2), math.sin(a / 2)
        return np.array([[c, -s], [s, c]], dtype=np.complex128)
    if gate.kind is GateKind.RZ:
        return np.array(
            [[np.exp(-0.5j * a), 0], [0, np.exp(0.5j * a)]], dtype=np.complex128
        )
    if gate.kind is GateKind.PHASE:
        return np.array([[1, 0], [0, np.exp(1j * a)]], dtype=np.complex128)
    raise ValueError(f"no 2x2 matrix for {gate.kind}")


def lifted_gate_matrix(gate: Gate, n: int) -> np.ndarray:
    """Full 2**n unitary of one gate, qubit 0 in the most significant slot."""
    d = 1 << n
    if gate.kind is GateKind.CX:
        control, target = gate.qubits
        cmask = 1 << (n - 1 - control)
        tmask = 1 << (n - 1 - target)
        u = np.zeros((d, d), dtype=np.complex128)
        for col in range(d):
            row = col ^ tmask if col & cmask else col
            u[row, col] = 1.0
        return u
    (q,) = gate.qubits
    u = gate_matrix(gate)
    out = np.array([[1.0]], dtype=np.complex128)
    for pos in range(n):
        out = np.kron(out, u if pos == q else ID2)
    return out


def apply_circuit_unitary(circuit: Circuit) -> np.ndarray:
    """Full-circuit unitary product (small registers only; oracle/test path)."""
    d = 1 << circuit.n_qubits
    u = np.eye(d, dtype=np.complex128)
    for gate in circuit.gates:
        u = lifted_gate_matrix(gate, circuit.n_qubits) @ u
    return u
