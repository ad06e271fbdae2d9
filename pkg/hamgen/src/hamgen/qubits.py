"""Second quantization and the Jordan-Wigner map to Pauli strings.

Spin orbitals are interleaved (qubit 2p = spatial p alpha, 2p+1 = beta),
so the reference determinant of an N-electron closed-shell molecule is
the bitstring 1^N 0^(2M-N).  Ladder operators become Pauli strings with
a Z chain on all lower qubits; products are reduced with an exact
single-qubit multiplication table.
"""
from __future__ import annotations

import numpy as np

# (left, right) -> (phase, result); identity handled separately
_PAULI_PRODUCT = {
    ("X", "X"): (1.0, None),
    ("Y", "Y"): (1.0, None),
    ("Z", "Z"): (1.0, None),
    ("X", "Y"): (1j, "Z"),
    ("Y", "X"): (-1j, "Z"),
    ("Y", "Z"): (1j, "X"),
    ("Z", "Y"): (-1j, "X"),
    ("Z", "X"): (1j, "Y"),
    ("X", "Z"): (-1j, "Y"),
}

PRUNE_TOL = 1e-12


class PauliPolynomial:
    """Complex-weighted sum of Pauli strings (factor tuples sorted by qubit)."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms: dict[tuple, complex] = dict(terms or {})

    @classmethod
    def scalar(cls, value: complex) -> "PauliPolynomial":
        return cls({(): complex(value)})

    def __add__(self, other: "PauliPolynomial") -> "PauliPolynomial":
        out = dict(self.terms)
        for factors, coeff in other.terms.items():
            out[factors] = out.get(factors, 0.0) + coeff
        return PauliPolynomial(out)

    def __mul__(self, other: "PauliPolynomial") -> "PauliPolynomial":
        out: dict[tuple, complex] = {}
        for fa, ca in self.terms.items():
            for fb, cb in other.terms.items():
                phase, factors = _multiply_strings(fa, fb)
                coeff = ca * cb * phase
                if factors in out:
                    out[factors] += coeff
                else:
                    out[factors] = coeff
        return PauliPolynomial(out)

    def scaled(self, value: complex) -> "PauliPolynomial":
        return PauliPolynomial({f: c * value for f, c in self.terms.items()})

    def pruned(self) -> "PauliPolynomial":
        return PauliPolynomial(
            {f: c for f, c in self.terms.items() if abs(c) > PRUNE_TOL}
        )


def _multiply_strings(fa: tuple, fb: tuple) -> tuple[complex, tuple]:
    """Product of two factor tuples; merges per qubit with exact phases."""
    phase = 1.0 + 0.0j
    out = []
    ia = ib = 0
    while ia < len(fa) and ib < len(fb):
        qa, axa = fa[ia]
        qb, axb = fb[ib]
        if qa < qb:
            out.append(fa[ia])
            ia += 1
        elif qb < qa:
            out.append(fb[ib])
            ib += 1
        else:
            if axa == axb:
                pass  # squares to identity
            else:
                extra, axis = _PAULI_PRODUCT[(axa, axb)]
                phase *= extra
                out.append((qa, axis))
            ia += 1
            ib += 1
    out.extend(fa[ia:])
    out.extend(fb[ib:])
    return phase, tuple(out)


def ladder_operator(qubit: int, creation: bool) -> PauliPolynomial:
    """Jordan-Wigner image of a_p (or a_p^dagger with ``creation``)."""
    chain = tuple((q, "Z") for q in range(qubit))
    sign = -0.5j if creation else 0.5j
    return PauliPolynomial(
        {
            chain + ((qubit, "X"),): 0.5,
            chain + ((qubit, "Y"),): sign,
        }
    )


def spin_orbital_integrals(h_mo: np.ndarray, eri_mo: np.ndarray):
    """Expand spatial MO integrals to interleaved spin orbitals.

    Returns (h1, g2) with g2 in physicist notation <PQ|RS>.
    """
    m = h_mo.shape[0]
    n = 2 * m
    h1 = np.zeros((n, n))
    for p in range(n):
        for q in range(n):
            if p % 2 == q % 2:
                h1[p, q] = h_mo[p // 2, q // 2]
    g2 = np.zeros((n, n, n, n))
    for p in range(n):
        for q in range(n):
            for r in range(n):
                for s in range(n):
                    if p % 2 == r % 2 and q % 2 == s % 2:
                        g2[p, q, r, s] = eri_mo[p // 2, r // 2, q // 2, s // 2]
    return h1, g2


def transform_mo(h_core: np.ndarray, eri: np.ndarray, c: np.ndarray):
    h_mo = c.T @ h_core @ c
    eri_mo = np.einsum("pi,qj,pqrs,rk,sl->ijkl", c, c, eri, c, c, optimize=True)
    return h_mo, eri_mo


def determinant_energy(h1: np.ndarray, g2: np.ndarray, occupied) -> float:
    """Slater-Condon energy of one determinant over spin orbitals."""
    energy = sum(h1[p, p] for p in occupied)
    for p in occupied:
        for q in occupied:
            energy += 0.5 * (g2[p, q, p, q] - g2[p, q, q, p])
    return float(energy)


def jordan_wigner_hamiltonian(
    h1: np.ndarray, g2: np.ndarray, e_nuclear: float
) -> dict[tuple, float]:
    """Pauli-string form of the second-quantized Hamiltonian.

    Returns {factor tuple: real coefficient}; raises if any imaginary
    residue survives (it cannot, for Hermitian integrals).
    """
    n = h1.shape[0]
    accumulator: dict[tuple, complex] = {(): complex(e_nuclear)}

    def absorb(poly: PauliPolynomial, weight: complex) -> None:
        for factors, coeff in poly.terms.items():
            value = accumulator.get(factors, 0.0) + coeff * weight
            accumulator[factors] = value

    creators = [ladder_operator(p, True) for p in range(n)]
    annihilators = [ladder_operator(p, False) for p in range(n)]

    for p in range(n):
        for q in range(n):
            if abs(h1[p, q]) > PRUNE_TOL:
                absorb(creators[p] * annihilators[q], h1[p, q])
    for p in range(n):
        for q in range(n):
            if p == q:
                continue
            left = creators[p] * creators[q]
            for r in range(n):
                for s in range(n):
                    weight = g2[p, q, r, s]
                    if abs(weight) <= PRUNE_TOL or r == s:
                        continue
                    # 0.5 * <pq|rs> a+_p a+_q a_s a_r
                    absorb(left * (annihilators[s] * annihilators[r]), 0.5 * weight)

    real_terms: dict[tuple, float] = {}
    for factors, coeff in accumulator.items():
        if abs(coeff) <= PRUNE_TOL:
            continue
        if abs(coeff.imag) > 1e-10:
            raise ValueError(f"imaginary coefficient {coeff} on {factors}")
        real_terms[factors] = float(coeff.real)
    return real_terms
