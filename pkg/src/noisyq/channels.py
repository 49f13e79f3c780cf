"""Single-qubit noise channels as Kraus-operator sets.

Six channel kinds are provided.  Five are trace preserving.  Thermal
relaxation is built by default from an operator set whose completeness sum
is diag(1-p1, 1-p0) rather than the identity, so it shrinks the trace
whenever p0 or p1 is nonzero; that behaviour is deliberate and kept as the
default.  A standard trace-preserving variant is available behind an
explicit flag.

Every kind also has a closed-form single-qubit update
(:func:`closed_form_evolve`) used as an independent oracle against the
Kraus-sum route.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from noisyq import backend
from noisyq.dmcore import ID2, LOWER, PAULI_X, PAULI_Y, PAULI_Z, RAISE, DensityMatrix

COMPLETENESS_TOL = 1e-12


class NoiseKind(str, enum.Enum):
    DEPHASING = "dephasing"
    AMPLITUDE_DAMPING = "amplitude_damping"
    DEPOLARIZING = "depolarizing"
    THERMAL_RELAXATION = "thermal_relaxation"
    BIT_FLIP = "bit_flip"
    PHASE_FLIP = "phase_flip"


# parameter names each kind requires
_PARAMS = {
    NoiseKind.DEPHASING: ("p",),
    NoiseKind.AMPLITUDE_DAMPING: ("gamma",),
    NoiseKind.DEPOLARIZING: ("p",),
    NoiseKind.THERMAL_RELAXATION: ("p0", "p1"),
    NoiseKind.BIT_FLIP: ("p",),
    NoiseKind.PHASE_FLIP: ("p",),
}


@dataclass(frozen=True)
class KrausChannel:
    """Immutable single-qubit channel: rho -> sum_k K_k rho K_k^dagger."""

    kind: NoiseKind
    params: dict
    operators: tuple
    trace_preserving: bool

    def completeness_sum(self) -> np.ndarray:
        """sum_k K_k^dagger K_k; identity for a trace-preserving channel."""
        acc = np.zeros((2, 2), dtype=np.complex128)
        for k in self.operators:
            acc += k.conj().T @ k
        return acc

    def stacked(self) -> np.ndarray:
        return np.stack(self.operators)


@dataclass(frozen=True)
class NoiseConfig:
    """One swept noise setting: a kind plus the scalar error-rate knob.

    The channel is inserted after every gate, acting on each qubit the gate
    touches.  ``level`` maps onto the kind's parameters via
    :func:`level_params`.
    """

    kind: NoiseKind
    level: float
    corrected_thermal: bool = field(default=False)

    def __post_init__(self):
        if not 0.0 <= self.level <= 1.0:
            raise ValueError(f"noise level {self.level} outside [0, 1]")

    def channel(self) -> KrausChannel:
        return build_channel(self.kind, corrected=self.corrected_thermal, **level_params(self.kind, self.level))

    def to_doc(self) -> dict:
        return {
            "kind": self.kind.value,
            "level": self.level,
            "corrected_thermal": self.corrected_thermal,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "NoiseConfig":
        return cls(
            kind=NoiseKind(doc["kind"]),
            level=float(doc["level"]),
            corrected_thermal=bool(doc.get("corrected_thermal", False)),
        )


def level_params(kind: NoiseKind, level: float) -> dict:
    """Map the single swept error rate onto a kind's named parameters.

    The flip/phase/depolarizing kinds read it as p, amplitude damping as
    gamma, and thermal relaxation splits it evenly: p0 = p1 = level / 2.
    """
    kind = NoiseKind(kind)
    if kind is NoiseKind.AMPLITUDE_DAMPING:
        return {"gamma": level}
    if kind is NoiseKind.THERMAL_RELAXATION:
        return {"p0": level / 2.0, "p1": level / 2.0}
    return {"p": level}


def _check_prob(name: str, value: float) -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"parameter {name}={value} outside [0, 1]")
    return value


def build_channel(kind: NoiseKind, *, corrected: bool = False, **params) -> KrausChannel:
    """Construct the operator set for a noise kind.

    Required parameters: p for dephasing / depolarizing / bit flip / phase
    flip, gamma for amplitude damping, p0 and p1 for thermal relaxation
    (excitation and decay probabilities, p0 + p1 <= 1).  ``corrected``
    selects the trace-preserving thermal variant and is rejected for other
    kinds.
    """
    kind = NoiseKind(kind)
    required = _PARAMS[kind]
    missing = [name for name in required if name not in params]
    if missing:
        raise ValueError(f"{kind.value} channel requires parameter(s) {missing}")
    extra = [name for name in params if name not in required]
    if extra:
        raise ValueError(f"{kind.value} channel got unexpected parameter(s) {extra}")
    if corrected and kind is not NoiseKind.THERMAL_RELAXATION:
        raise ValueError("corrected=True applies only to thermal relaxation")
    vals = {name: _check_prob(name, params[name]) for name in required}

    if kind in (NoiseKind.DEPHASING, NoiseKind.PHASE_FLIP):
        p = vals["p"]
        ops = (math.sqrt(1.0 - p) * ID2, math.sqrt(p) * PAULI_Z)
    elif kind is NoiseKind.BIT_FLIP:
        p = vals["p"]
        ops = (math.sqrt(1.0 - p) * ID2, math.sqrt(p) * PAULI_X)
    elif kind is NoiseKind.AMPLITUDE_DAMPING:
        g = vals["gamma"]
        k0 = np.array([[1.0, 0.0], [0.0, math.sqrt(1.0 - g)]], dtype=np.complex128)
        k1 = np.array([[0.0, math.sqrt(g)], [0.0, 0.0]], dtype=np.complex128)
        ops = (k0, k1)
    elif kind is NoiseKind.DEPOLARIZING:
        p = vals["p"]
        ops = (
            math.sqrt(1.0 - 3.0 * p / 4.0) * ID2,
            math.sqrt(p / 4.0) * PAULI_X,
            math.sqrt(p / 4.0) * PAULI_Y,
            math.sqrt(p / 4.0) * PAULI_Z,
        )
    else:
        p0, p1 = vals["p0"], vals["p1"]
        if p0 + p1 > 1.0:
            raise ValueError(f"thermal relaxation requires p0 + p1 <= 1, got {p0 + p1}")
        if corrected:
            k0 = np.array(
                [[math.sqrt(1.0 - p0), 0.0], [0.0, math.sqrt(1.0 - p1)]],
                dtype=np.complex128,
            )
        else:
            k0 = math.sqrt(1.0 - p0 - p1) * ID2
        ops = (k0, math.sqrt(p1) * LOWER, math.sqrt(p0) * RAISE)

    ops = tuple(np.ascontiguousarray(k) for k in ops)
    acc = np.zeros((2, 2), dtype=np.complex128)
    for k in ops:
        acc += k.conj().T @ k
    tp = bool(np.abs(acc - ID2).max() <= COMPLETENESS_TOL)
    return KrausChannel(kind=kind, params=vals, operators=ops, trace_preserving=tp)


def apply_channel(rho: DensityMatrix, ch: KrausChannel, target_qubit: int) -> DensityMatrix:
    """Kraus-sum update of one register qubit."""
    n = rho.n_qubits
    if not 0 <= target_qubit < n:
        raise ValueError(f"target qubit {target_qubit} out of range for {n} qubits")
    batch = rho.mat[None].copy()
    out = backend.apply_1q_kraus(batch, ch.stacked(), target_qubit, n)
    return DensityMatrix(out[0], copy=False)


def closed_form_evolve(kind: NoiseKind, rho: DensityMatrix, **params) -> DensityMatrix:
    """Entrywise closed-form single-qubit update for each kind.

    Serves as an oracle independent of the Kraus-sum route.  For thermal
    relaxation this route pairs p0 with the gain into the ground population
    and p1 with the gain into the excited one, the opposite pairing from
    the operator set; the two agree exactly when p0 == p1, and the sweep
    mapping (:func:`level_params`) always splits the level evenly.
    """
    kind = NoiseKind(kind)
    if rho.n_qubits != 1:
        raise ValueError("closed-form update is defined for single-qubit states")
    required = _PARAMS[kind]
    missing = [name for name in required if name not in params]
    if missing:
        raise ValueError(f"{kind.value} closed form requires parameter(s) {missing}")
    vals = {name: _check_prob(name, params[name]) for name in required}
    m = rho.mat
    r00, r01, r10, r11 = m[0, 0], m[0, 1], m[1, 0], m[1, 1]

    if kind in (NoiseKind.DEPHASING, NoiseKind.PHASE_FLIP):
        p = vals["p"]
        out = np.array(
            [[r00, (1.0 - 2.0 * p) * r01], [(1.0 - 2.0 * p) * r10, r11]]
        )
    elif kind is NoiseKind.BIT_FLIP:
        p = vals["p"]
        out = np.array(
            [
                [(1.0 - p) * r00 + p * r11, (1.0 - p) * r01 + p * r10],
                [(1.0 - p) * r10 + p * r01, (1.0 - p) * r11 + p * r00],
            ]
        )
    elif kind is NoiseKind.AMPLITUDE_DAMPING:
        g = vals["gamma"]
        root = math.sqrt(1.0 - g)
        out = np.array(
            [[r00 + g * r11, root * r01], [root * r10, (1.0 - g) * r11]]
        )
    elif kind is NoiseKind.DEPOLARIZING:
        p = vals["p"]
        out = np.array(
            [
                [(1.0 - p) * r00 + p / 2.0, (1.0 - p) * r01],
                [(1.0 - p) * r10, (1.0 - p) * r11 + p / 2.0],
            ]
        )
    else:
        p0, p1 = vals["p0"], vals["p1"]
        if p0 + p1 > 1.0:
            raise ValueError(f"thermal relaxation requires p0 + p1 <= 1, got {p0 + p1}")
        shrink = 1.0 - p0 - p1
        out = np.array(
            [
                [shrink * r00 + p0 * r11, shrink * r01],
                [shrink * r10, shrink * r11 + p1 * r00],
            ]
        )
    return DensityMatrix(out.astype(np.complex128), copy=False)
