"""Dense complex matrices and density-matrix representation for small registers.

Registers hold at most 8 qubits (256x256 matrices), stored dense since noisy
states have no exploitable sparsity at this scale.  Qubit 0 is the most
significant bit of a basis-state label: on four qubits, label "0100" means
qubit 1 is in state 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MAX_QUBITS = 8

ID2 = np.eye(2, dtype=np.complex128)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
# ladder operators: LOWER maps state 1 to state 0, RAISE the reverse
LOWER = np.array([[0, 1], [0, 0]], dtype=np.complex128)
RAISE = np.array([[0, 0], [1, 0]], dtype=np.complex128)

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10


def _as_complex(mat: np.ndarray) -> np.ndarray:
    out = np.ascontiguousarray(mat, dtype=np.complex128)
    if not np.all(np.isfinite(out.view(np.float64))):
        raise ValueError("matrix entries must be finite")
    return out


def tensor_product(a, b):
    """Kronecker product of two dense complex matrices.

    Accepts raw arrays or DensityMatrix operands; two DensityMatrix inputs
    give a DensityMatrix back.  Rejects results larger than the 2**8
    register bound.
    """
    wrap = isinstance(a, DensityMatrix) and isinstance(b, DensityMatrix)
    a = _as_complex(np.atleast_2d(getattr(a, "mat", a)))
    b = _as_complex(np.atleast_2d(getattr(b, "mat", b)))
    rows = a.shape[0] * b.shape[0]
    cols = a.shape[1] * b.shape[1]
    if rows > 2**MAX_QUBITS or cols > 2**MAX_QUBITS:
        raise ValueError(
            f"tensor product of {a.shape} and {b.shape} exceeds the "
            f"{2**MAX_QUBITS}x{2**MAX_QUBITS} register bound"
        )
    out = np.kron(a, b)
    return DensityMatrix(out) if wrap else out


class DensityMatrix:
    """Density operator on an n-qubit register.

    Wraps a (2**n, 2**n) complex128 array.  Construction checks only shape
    and finiteness; the physical invariants (Hermiticity, unit trace,
    positive semidefiniteness) are checked by :func:`validate` so that
    deliberately non-trace-preserving channel outputs can still be
    represented and inspected.
    """

    __slots__ = ("mat", "n_qubits")

    def __init__(self, mat: np.ndarray, *, copy: bool = True):
        arr = _as_complex(mat)
        if copy and arr is mat:
            arr = arr.copy()
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError(f"density matrix must be square, got shape {arr.shape}")
        dim = arr.shape[0]
        n = dim.bit_length() - 1
        if dim != 1 << n or n < 1:
            raise ValueError(f"dimension {dim} is not a power of two >= 2")
        if n > MAX_QUBITS:
            raise ValueError(f"register of {n} qubits exceeds the {MAX_QUBITS}-qubit bound")
        self.mat = arr
        self.n_qubits = n

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def trace(self) -> float:
        return float(np.trace(self.mat).real)

    def __repr__(self) -> str:
        return f"DensityMatrix(n_qubits={self.n_qubits}, trace={self.trace():.6f})"


def pure_state_density(amplitudes: np.ndarray) -> DensityMatrix:
    """Outer product |psi><psi| of a normalized amplitude vector."""
    vec = np.asarray(amplitudes, dtype=np.complex128).reshape(-1)
    norm = np.linalg.norm(vec)
    if abs(norm - 1.0) > 1e-10:
        raise ValueError(f"amplitude vector norm {norm} is not 1 within 1e-10")
    return DensityMatrix(np.outer(vec, vec.conj()), copy=False)


def basis_state_density(index: int, n_qubits: int) -> DensityMatrix:
    """Density matrix of the computational basis state with the given index."""
    dim = 1 << n_qubits
    if not 0 <= index < dim:
        raise ValueError(f"basis index {index} out of range for {n_qubits} qubits")
    vec = np.zeros(dim, dtype=np.complex128)
    vec[index] = 1.0
    return pure_state_density(vec)


def purity(rho: DensityMatrix) -> float:
    """Tr[rho^2]; 1 for pure states, 1/2**n for the maximally mixed state."""
    return float(np.trace(rho.mat @ rho.mat).real)


@dataclass(frozen=True)
class ValidationReport:
    """Report-only check of the density-matrix invariants."""

    hermiticity_dev: float
    trace_value: float
    trace_dev: float
    min_eigenvalue: float
    hermitian_ok: bool
    trace_ok: bool
    psd_ok: bool

    @property
    def ok(self) -> bool:
        return self.hermitian_ok and self.trace_ok and self.psd_ok


def validate(
    rho: DensityMatrix,
    trace_tol: float = TRACE_TOL,
    psd_tol: float = PSD_TOL,
) -> ValidationReport:
    """Measure Hermiticity, trace, and minimum-eigenvalue deviations.

    Never raises: callers inspect the flags.  The recorded trace is the
    actual value, which matters for channels that deliberately shrink it.
    """
    m = rho.mat
    herm_dev = float(np.abs(m - m.conj().T).max())
    tr = complex(np.trace(m))
    trace_dev = abs(tr - 1.0)
    # eigvalsh reads one triangle; symmetrize so the report stays meaningful
    # even when Hermiticity itself is violated
    eigs = np.linalg.eigvalsh((m + m.conj().T) / 2.0)
    min_eig = float(eigs[0])
    return ValidationReport(
        hermiticity_dev=herm_dev,
        trace_value=tr.real,
        trace_dev=float(trace_dev),
        min_eigenvalue=min_eig,
        hermitian_ok=herm_dev <= HERMITIAN_TOL,
        trace_ok=trace_dev <= trace_tol,
        psd_ok=min_eig >= -psd_tol,
    )
