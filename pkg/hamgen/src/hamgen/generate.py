"""Fixture generation and independent verification.

``generate_fixture`` runs the full pipeline (integrals, SCF, MO
transform, Jordan-Wigner) and writes the text format the consumer
expects: ``# key=value`` metadata, then one term per line in canonical
order, coefficients as shortest exact-round-trip floats.

``verify_fixture`` re-reads a file with its own parser and re-derives
every metadata claim: the reference-determinant energy from the
diagonal terms and the FCI energy from an independent diagonalization
restricted to the particle-number/spin sector of the reference
bitstring.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .basis import build_basis, nuclear_repulsion
from .integrals import integral_tables
from .molecule import MoleculeSpec
from .qubits import (
    determinant_energy,
    jordan_wigner_hamiltonian,
    spin_orbital_integrals,
    transform_mo,
)
from .scf import restricted_hartree_fock

FCI_TOL = 1e-8


@dataclass
class FixtureReport:
    path: Path
    n_qubits: int
    n_terms: int
    e_hf: float
    e_fci: float


class FixtureError(RuntimeError):
    pass


def _canonical_lines(terms: dict[tuple, float]) -> list[str]:
    lines = []
    for factors in sorted(terms):
        coeff = terms[factors]
        if factors:
            ops = " ".join(f"{axis}{q}" for q, axis in factors)
            lines.append(f"{coeff!r} {ops}")
        else:
            lines.append(f"{coeff!r}")
    return lines


def build_qubit_hamiltonian(spec: MoleculeSpec):
    """Full pipeline up to Pauli terms; returns (terms, metadata floats)."""
    geometry = spec.geometry_bohr()
    charges = spec.charges()
    functions = build_basis(geometry)
    s, t, v, eri = integral_tables(functions, geometry, charges)
    e_nuc = nuclear_repulsion(geometry, charges)
    scf = restricted_hartree_fock(s, t + v, eri, spec.n_electrons, e_nuc)

    h_mo, eri_mo = transform_mo(t + v, eri, scf.mo_coefficients)
    h1, g2 = spin_orbital_integrals(h_mo, eri_mo)
    occupied = list(range(spec.n_electrons))
    e_hf = determinant_energy(h1, g2, occupied) + e_nuc
    if abs(e_hf - scf.energy) > 1e-8:
        raise FixtureError(
            f"determinant energy {e_hf} disagrees with SCF energy {scf.energy}"
        )
    terms = jordan_wigner_hamiltonian(h1, g2, e_nuc)
    n_qubits = h1.shape[0]

    hf_bits = "1" * spec.n_electrons + "0" * (n_qubits - spec.n_electrons)
    e_fci = sector_ground_energy(terms, n_qubits, hf_bits)
    return terms, n_qubits, hf_bits, e_hf, e_fci


def generate_fixture(spec: MoleculeSpec, out_path) -> FixtureReport:
    terms, n_qubits, hf_bits, e_hf, e_fci = build_qubit_hamiltonian(spec)
    metadata = {
        "basis": spec.basis,
        "e_fci": repr(float(e_fci)),
        "e_hf": repr(float(e_hf)),
        "geometry": spec.geometry_string(),
        "hf_bitstring": hf_bits,
        "name": spec.name,
    }
    lines = [f"# n_qubits={n_qubits}"]
    lines.extend(f"# {key}={metadata[key]}" for key in sorted(metadata))
    lines.extend(_canonical_lines(terms))
    path = Path(out_path)
    path.write_text("\n".join(lines) + "\n")
    return FixtureReport(path, n_qubits, len(terms), e_hf, e_fci)


# -- independent verification -------------------------------------------------


def read_fixture(path) -> tuple[dict[tuple, float], int, dict[str, str]]:
    """Minimal reader of the fixture format (independent of the consumer)."""
    terms: dict[tuple, float] = {}
    metadata: dict[str, str] = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition("=")
            metadata[key.strip()] = value.strip()
            continue
        tokens = line.split()
        coeff = float(tokens[0])
        factors = tuple(
            (int(tok[1:]), tok[0].upper()) for tok in tokens[1:]
        )
        terms[factors] = terms.get(factors, 0.0) + coeff
    n_qubits = int(metadata["n_qubits"])
    return terms, n_qubits, metadata


def _term_masks(factors):
    flip = sign = n_y = 0
    for q, axis in factors:
        if axis in ("X", "Y"):
            flip |= 1 << q
        if axis in ("Y", "Z"):
            sign |= 1 << q
        if axis == "Y":
            n_y += 1
    return flip, sign, n_y


def reference_expectation(terms: dict[tuple, float], bits: str) -> float:
    """<bits|H|bits>: only identity and pure-Z strings contribute."""
    index = sum(1 << q for q, ch in enumerate(bits) if ch == "1")
    total = 0.0
    for factors, coeff in terms.items():
        if any(axis != "Z" for _, axis in factors):
            continue
        parity = sum((index >> q) & 1 for q, _ in factors) & 1
        total += -coeff if parity else coeff
    return total


def sector_basis(n_qubits: int, hf_bits: str) -> list[int]:
    """Basis indices with the reference's per-spin electron counts
    (alpha on even qubits, beta on odd)."""
    n_alpha = sum(1 for q, ch in enumerate(hf_bits) if ch == "1" and q % 2 == 0)
    n_beta = sum(1 for q, ch in enumerate(hf_bits) if ch == "1" and q % 2 == 1)
    even_mask = sum(1 << q for q in range(0, n_qubits, 2))
    odd_mask = sum(1 << q for q in range(1, n_qubits, 2))
    states = []
    for index in range(1 << n_qubits):
        if (
            int(index & even_mask).bit_count() == n_alpha
            and int(index & odd_mask).bit_count() == n_beta
        ):
            states.append(index)
    return states


def sector_ground_energy(
    terms: dict[tuple, float], n_qubits: int, hf_bits: str
) -> float:
    """Lowest eigenvalue in the reference's particle/spin sector."""
    states = sector_basis(n_qubits, hf_bits)
    position = {state: k for k, state in enumerate(states)}
    dim = len(states)
    mat = np.zeros((dim, dim), dtype=complex)
    for factors, coeff in terms.items():
        flip, sign, n_y = _term_masks(factors)
        phase_y = 1j**n_y
        for b, state in enumerate(states):
            target = state ^ flip
            a = position.get(target)
            if a is None:
                continue
            parity = int(state & sign).bit_count() & 1
            mat[a, b] += coeff * phase_y * (-1.0 if parity else 1.0)
    if np.abs(mat - mat.conj().T).max() > 1e-10:
        raise FixtureError("sector Hamiltonian is not Hermitian")
    return float(np.linalg.eigvalsh(mat)[0])


def verify_fixture(path) -> FixtureReport:
    """Re-derive and check every claim a fixture makes about itself."""
    terms, n_qubits, metadata = read_fixture(path)
    for key in ("hf_bitstring", "e_hf", "e_fci"):
        if key not in metadata:
            raise FixtureError(f"missing metadata key {key!r}")
    bits = metadata["hf_bitstring"]
    if len(bits) != n_qubits:
        raise FixtureError("hf_bitstring length disagrees with n_qubits")
    for factors in terms:
        for q, _ in factors:
            if q >= n_qubits:
                raise FixtureError(f"qubit {q} out of range")
    if not all(math.isfinite(c) for c in terms.values()):
        raise FixtureError("non-finite coefficient")

    e_hf = reference_expectation(terms, bits)
    if abs(e_hf - float(metadata["e_hf"])) > FCI_TOL:
        raise FixtureError(
            f"reference energy mismatch: file says {metadata['e_hf']}, "
            f"recomputed {e_hf!r}"
        )
    e_fci = sector_ground_energy(terms, n_qubits, bits)
    if abs(e_fci - float(metadata["e_fci"])) > FCI_TOL:
        raise FixtureError(
            f"FCI energy mismatch: file says {metadata['e_fci']}, "
            f"recomputed {e_fci!r}"
        )
    return FixtureReport(Path(path), n_qubits, len(terms), e_hf, e_fci)
