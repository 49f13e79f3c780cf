"""Pure-numpy implementations of the hot density-matrix update kernels.

All functions operate on a batch of density matrices with shape
``(batch, 2**n, 2**n)`` and complex128 dtype.  Qubit ``q`` occupies bit
position ``n - 1 - q`` of the basis index (qubit 0 is the most significant
bit).  The input array must be treated as consumed: callers use the returned
array, which may or may not alias the input depending on the backend.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

BACKEND_NAME = "python"


def _as_blocks(rhos: np.ndarray, q: int, n: int) -> tuple[np.ndarray, tuple]:
    """View the batch so the two basis states of qubit ``q`` form trailing 2x2 axes.

    Returns the reordered array of shape (batch, L, s, L, s, 2, 2) plus the
    permutation needed to restore the original axis order.
    """
    batch = rhos.shape[0]
    s = 1 << (n - 1 - q)
    left = 1 << q
    r6 = rhos.reshape(batch, left, 2, s, left, 2, s)
    # axes: (batch, row_hi, row_bit, row_lo, col_hi, col_bit, col_lo)
    moved = r6.transpose(0, 1, 3, 4, 6, 2, 5)
    restore = (0, 1, 5, 2, 3, 6, 4)
    return moved, restore


def apply_1q_unitary(rhos: np.ndarray, u: np.ndarray, q: int, n: int) -> np.ndarray:
    """rho -> U rho U^dagger with the 2x2 unitary acting on qubit ``q``."""
    batch = rhos.shape[0]
    d = 1 << n
    blocks, restore = _as_blocks(rhos, q, n)
    out = u @ blocks @ u.conj().T
    out = out.transpose(restore).reshape(batch, d, d)
    return np.ascontiguousarray(out)


def apply_1q_kraus(rhos: np.ndarray, kraus: np.ndarray, q: int, n: int) -> np.ndarray:
    """rho -> sum_k K_k rho K_k^dagger with 2x2 operators acting on qubit ``q``.

    ``kraus`` has shape (n_ops, 2, 2).
    """
    batch = rhos.shape[0]
    d = 1 << n
    blocks, restore = _as_blocks(rhos, q, n)
    # leading Kraus axis must broadcast against the inserted batch axis
    k8 = kraus.reshape(kraus.shape[0], 1, 1, 1, 1, 1, 2, 2)
    out = (k8 @ blocks[None] @ k8.conj().swapaxes(-1, -2)).sum(axis=0)
    out = out.transpose(restore).reshape(batch, d, d)
    return np.ascontiguousarray(out)


@lru_cache(maxsize=256)
def _cx_permutation(control: int, target: int, n: int) -> np.ndarray:
    cmask = 1 << (n - 1 - control)
    tmask = 1 << (n - 1 - target)
    idx = np.arange(1 << n)
    return np.where(idx & cmask, idx ^ tmask, idx)

def apply_cx(rhos: np.ndarray, control: int, target: int, n: int) -> np.ndarray:
    """rho -> CX rho CX with the given control/target qubits."""
    p = _cx_permutation(control, target, n)
    return np.ascontiguousarray(rhos[:, p[:, None], p[None, :]])
