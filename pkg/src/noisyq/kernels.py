"""Quantum kernel entries and Gram matrices over encoded states.

Kernels are exact trace products of density matrices, not shot estimates,
so downstream classifier behaviour is deterministic.  Each dataset row is
encoded once and reused across all pairs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from noisyq.channels import NoiseConfig
from noisyq.dmcore import DensityMatrix, basis_state_density
from noisyq.featuremaps import DEFAULT_PAULIS, DEFAULT_REPS, FeatureMapKind, build_feature_map
from noisyq.simulator import evolve

IMAG_TOL = 1e-12


def encode_state(
    x: np.ndarray,
    fm: FeatureMapKind,
    noise: NoiseConfig | None = None,
    *,
    reps: int = DEFAULT_REPS,
    paulis: tuple = DEFAULT_PAULIS,
) -> DensityMatrix:
    """Run the feature-map circuit on |0...0> and return the encoded state."""
    x = np.asarray(x, dtype=float).reshape(-1)
    circuit = build_feature_map(fm, x, reps=reps, paulis=paulis)
    return evolve(circuit, noise, basis_state_density(0, circuit.n_qubits))


def encode_states(
    X: np.ndarray,
    fm: FeatureMapKind,
    noise: NoiseConfig | None = None,
    *,
    reps: int = DEFAULT_REPS,
    paulis: tuple = DEFAULT_PAULIS,
) -> np.ndarray:
    """Encoded states for every dataset row, stacked as (N, 2**d, 2**d)."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[0] == 0:
        raise ValueError("empty dataset")
    return np.stack(
        [encode_state(row, fm, noise, reps=reps, paulis=paulis).mat for row in X]
    )


def kernel_entry(rho_i: DensityMatrix, rho_j: DensityMatrix) -> float:
    """Similarity Tr[rho_i rho_j]; 1 for identical pure states."""
    if rho_i.mat.shape != rho_j.mat.shape:
        raise ValueError("kernel entry needs states of equal dimension")
    # Tr[A B] = sum_ij A_ij B_ji = <B, A> for Hermitian B
    value = complex(np.vdot(rho_j.mat, rho_i.mat))
    if abs(value.imag) > IMAG_TOL:
        raise AssertionError(f"kernel entry has imaginary part {value.imag}")
    return float(value.real)


@dataclass(frozen=True)
class KernelMatrix:
    """Real symmetric Gram matrix of pairwise state similarities."""

    entries: np.ndarray

    def __post_init__(self):
        e = self.entries
        if e.ndim != 2 or e.shape[0] != e.shape[1]:
            raise ValueError("kernel matrix must be square")
        if not np.all(np.isfinite(e)):
            raise ValueError("kernel matrix entries must be finite")

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def to_csv(self, path, ids=None) -> None:
        """Row-major CSV dump with a dataset-id header row."""
        if ids is None:
            ids = [str(i) for i in range(self.n)]
        if len(ids) != self.n:
            raise ValueError("need one id per row")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(",".join(ids) + "\n")
            for row in self.entries:
                fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def gram_from_states(states: np.ndarray) -> KernelMatrix:
    """All pairwise trace products of a state stack, exactly symmetric.

    The strict upper triangle is computed once and mirrored, so K[i, j] and
    K[j, i] are the same float regardless of evaluation order.
    """
    g = np.einsum("aij,bji->ab", states, states)
    if np.abs(g.imag).max() > IMAG_TOL:
        raise AssertionError("gram matrix has a non-negligible imaginary part")
    real = g.real
    sym = np.triu(real) + np.triu(real, 1).T
    return KernelMatrix(entries=sym)


def cross_gram_from_states(test_states: np.ndarray, train_states: np.ndarray) -> np.ndarray:
    """Rectangular block K[i, j] = Tr[test_i train_j] for prediction rows."""
    g = np.einsum("aij,bji->ab", test_states, train_states)
    if np.abs(g.imag).max() > IMAG_TOL:
        raise AssertionError("cross gram has a non-negligible imaginary part")
    return g.real


def kernel_matrix(
    X: np.ndarray,
    fm: FeatureMapKind,
    noise: NoiseConfig | None = None,
    *,
    reps: int = DEFAULT_REPS,
    paulis: tuple = DEFAULT_PAULIS,
) -> KernelMatrix:
    """Gram matrix over a dataset: encode each row once, then O(N^2) traces."""
    return gram_from_states(encode_states(X, fm, noise, reps=reps, paulis=paulis))


@dataclass(frozen=True)
class EncodingSpec:
    """Everything needed to re-encode feature rows: map kind, reps, noise."""

    fm: FeatureMapKind
    reps: int = DEFAULT_REPS
    paulis: tuple = DEFAULT_PAULIS
    noise: NoiseConfig | None = None

    def encode(self, X: np.ndarray) -> np.ndarray:
        return encode_states(X, self.fm, self.noise, reps=self.reps, paulis=self.paulis)

    def gram(self, X: np.ndarray) -> KernelMatrix:
        return gram_from_states(self.encode(X))

    def to_doc(self) -> dict:
        return {
            "fm": FeatureMapKind(self.fm).value,
            "reps": self.reps,
            "paulis": list(self.paulis),
            "noise": None if self.noise is None else self.noise.to_doc(),
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "EncodingSpec":
        noise = doc.get("noise")
        return cls(
            fm=FeatureMapKind(doc["fm"]),
            reps=int(doc["reps"]),
            paulis=tuple(doc["paulis"]),
            noise=None if noise is None else NoiseConfig.from_doc(noise),
        )
