"""STO-3G basis data and contracted Gaussian shells.

Exponents and contraction coefficients are the standard published
STO-3G values.  Each contracted function is a linear combination of
normalized Cartesian primitives, renormalized as a whole.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

ANGSTROM_TO_BOHR = 1.0 / 0.52917721092

# element -> list of (shell_type, [exponents], {subshell: [coefficients]})
STO3G = {
    "H": [
        ("S", [3.42525091, 0.62391373, 0.16885540],
         {"S": [0.15432897, 0.53532814, 0.44463454]}),
    ],
    "Li": [
        ("S", [16.11957475, 2.93620066, 0.79465050],
         {"S": [0.15432897, 0.53532814, 0.44463454]}),
        ("SP", [0.63628970, 0.14786010, 0.04808870],
         {"S": [-0.09996723, 0.39951283, 0.70011547],
          "P": [0.15591627, 0.60768372, 0.39195739]}),
    ],
}

NUCLEAR_CHARGE = {"H": 1, "Li": 3}

CARTESIAN_POWERS = {
    "S": [(0, 0, 0)],
    "P": [(1, 0, 0), (0, 1, 0), (0, 0, 1)],
}


def double_factorial(n: int) -> int:
    return 1 if n <= 0 else n * double_factorial(n - 2)


def primitive_norm(alpha: float, powers: tuple[int, int, int]) -> float:
    l, m, n = powers
    total = l + m + n
    pref = (2.0 * alpha / math.pi) ** 0.75 * (4.0 * alpha) ** (total / 2.0)
    denom = math.sqrt(
        double_factorial(2 * l - 1)
        * double_factorial(2 * m - 1)
        * double_factorial(2 * n - 1)
    )
    return pref / denom


@dataclass
class BasisFunction:
    """One contracted Cartesian Gaussian."""

    center: np.ndarray  # bohr
    powers: tuple[int, int, int]
    exponents: np.ndarray
    coefficients: np.ndarray  # contraction x primitive norms, renormalized

    @property
    def n_primitives(self) -> int:
        return len(self.exponents)


def _contracted(center, powers, exponents, raw_coeffs) -> BasisFunction:
    exps = np.asarray(exponents, dtype=float)
    coeffs = np.array(
        [c * primitive_norm(a, powers) for c, a in zip(raw_coeffs, exps)]
    )
    func = BasisFunction(np.asarray(center, float), powers, exps, coeffs)
    from .integrals import overlap_contracted  # cycle-free at call time

    norm = overlap_contracted(func, func)
    func.coefficients = coeffs / math.sqrt(norm)
    return func


def build_basis(geometry) -> list[BasisFunction]:
    """Basis functions for a geometry given as [(element, xyz-in-bohr)]."""
    functions: list[BasisFunction] = []
    for element, center in geometry:
        if element not in STO3G:
            raise ValueError(f"no STO-3G data for element {element!r}")
        for shell_type, exponents, coeff_map in STO3G[element]:
            for subshell in shell_type:  # "SP" expands to S then P
                for powers in CARTESIAN_POWERS[subshell]:
                    functions.append(
                        _contracted(center, powers, exponents, coeff_map[subshell])
                    )
    return functions


def nuclear_repulsion(geometry, charges) -> float:
    energy = 0.0
    for i in range(len(geometry)):
        for j in range(i + 1, len(geometry)):
            rij = np.linalg.norm(geometry[i][1] - geometry[j][1])
            energy += charges[i] * charges[j] / rij
    return energy
