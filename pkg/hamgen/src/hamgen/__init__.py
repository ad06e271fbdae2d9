"""Offline molecular Hamiltonian fixture generator (STO-3G, Jordan-Wigner)."""

__version__ = "0.1.0"

from .generate import (
    FixtureError,
    FixtureReport,
    build_qubit_hamiltonian,
    generate_fixture,
    read_fixture,
    reference_expectation,
    sector_ground_energy,
    verify_fixture,
)
from .molecule import MoleculeSpec, hydrogen_chain, lithium_hydride
