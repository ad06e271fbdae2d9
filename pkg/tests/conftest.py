import numpy as np
import pytest

from psho.hamiltonian import Hamiltonian, PauliTerm
from psho.statevector import StateVector

FIXTURE_DIR_NAME = "fixtures"


def random_hamiltonian(rng, n_qubits, n_terms=8, scale=1.0, with_identity=False):
    """Random real-weighted Pauli-string operator (terms may merge)."""
    terms = []
    if with_identity:
        terms.append(PauliTerm((), rng.normal() * scale))
    for _ in range(n_terms):
        weight = rng.normal() * scale
        n_factors = rng.integers(1, n_qubits + 1)
        qubits = rng.choice(n_qubits, size=n_factors, replace=False)
        factors = tuple(
            (int(q), "XYZ"[rng.integers(3)]) for q in sorted(qubits)
        )
        terms.append(PauliTerm(factors, weight))
    return Hamiltonian(n_qubits, terms)


def random_state(rng, n_qubits):
    amps = rng.normal(size=1 << n_qubits) + 1j * rng.normal(size=1 << n_qubits)
    amps /= np.linalg.norm(amps)
    return StateVector(n_qubits, amps)


def hf_like_instance(rng, n_qubits, coupling=0.15):
    """All-negative spectrum whose ground state is dominated by one basis
    state (the molecular situation: strong diagonal, weak couplings).

    Returns (hamiltonian, reference bitstring).
    """
    bits = "".join("01"[int(rng.integers(2))] for _ in range(n_qubits))
    terms = []
    for q, ch in enumerate(bits):
        strength = float(rng.uniform(0.4, 0.9))
        terms.append(PauliTerm(((q, "Z"),), strength if ch == "1" else -strength))
    for _ in range(2 * n_qubits):
        n_factors = int(rng.integers(1, min(3, n_qubits) + 1))
        qubits = sorted(rng.choice(n_qubits, size=n_factors, replace=False))
        factors = tuple((int(q), "XY"[int(rng.integers(2))]) for q in qubits)
        terms.append(PauliTerm(factors, float(rng.normal()) * coupling))
    h = Hamiltonian(n_qubits, terms)
    mat_top = float(np.linalg.eigvalsh(_dense(h))[-1])
    terms.append(PauliTerm((), -(mat_top + 0.5)))
    return Hamiltonian(n_qubits, terms), bits


def _dense(h):
    from psho.hamiltonian import dense_matrix

    return dense_matrix(h)


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


@pytest.fixture(scope="session")
def fixture_dir():
    from pathlib import Path

    path = Path(__file__).resolve().parent.parent / FIXTURE_DIR_NAME
    if not path.is_dir():
        pytest.skip("committed Hamiltonian fixtures not present")
    return path
