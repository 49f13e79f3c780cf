import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))


def random_density(rng: np.random.Generator, n_qubits: int) -> np.ndarray:
    """Random full-rank density matrix via a Ginibre draw."""
    dim = 2**n_qubits
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_pure_density(rng: np.random.Generator, n_qubits: int) -> np.ndarray:
    dim = 2**n_qubits
    psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    psi /= np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


@pytest.fixture
def rng():
    return np.random.Generator(np.random.PCG64(1234))
