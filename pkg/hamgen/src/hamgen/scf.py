"""Restricted Hartree-Fock for closed-shell singlets."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class ScfResult:
    energy: float  # total (electronic + nuclear)
    electronic_energy: float
    mo_coefficients: np.ndarray  # AO x MO
    mo_energies: np.ndarray
    density: np.ndarray
    n_iterations: int


class ScfError(RuntimeError):
    pass


def restricted_hartree_fock(
    s: np.ndarray,
    h_core: np.ndarray,
    eri: np.ndarray,
    n_electrons: int,
    e_nuclear: float,
    max_iterations: int = 200,
    tolerance: float = 1e-12,
) -> ScfResult:
    """Roothaan SCF with symmetric orthogonalization and density damping.

    ``eri`` is chemist-notation (ij|kl).  Raises on non-convergence.
    """
    if n_electrons % 2:
        raise ScfError("restricted SCF needs an even electron count")
    n_occ = n_electrons // 2

    s_vals, s_vecs = np.linalg.eigh(s)
    if s_vals.min() < 1e-10:
        raise ScfError("overlap matrix is numerically singular")
    x = s_vecs @ np.diag(s_vals**-0.5) @ s_vecs.T

    def solve(fock):
        f_ortho = x.T @ fock @ x
        mo_energies, c_ortho = np.linalg.eigh(f_ortho)
        c = x @ c_ortho
        occupied = c[:, :n_occ]
        return mo_energies, c, 2.0 * occupied @ occupied.T

    _, c, density = solve(h_core)
    previous_energy = 0.0
    for iteration in range(1, max_iterations + 1):
        coulomb = np.einsum("ijkl,kl->ij", eri, density)
        exchange = np.einsum("ikjl,kl->ij", eri, density)
        fock = h_core + coulomb - 0.5 * exchange
        electronic = 0.5 * float(np.sum(density * (h_core + fock)))
        mo_energies, c, new_density = solve(fock)
        drift = abs(electronic - previous_energy)
        delta_d = np.abs(new_density - density).max()
        density = 0.7 * new_density + 0.3 * density  # damping
        previous_energy = electronic
        if drift < tolerance and delta_d < 1e-8:
            density = new_density
            break
    else:
        raise ScfError(f"SCF did not converge in {max_iterations} iterations")

    # final consistent quantities from the undamped density
    coulomb = np.einsum("ijkl,kl->ij", eri, density)
    exchange = np.einsum("ikjl,kl->ij", eri, density)
    fock = h_core + coulomb - 0.5 * exchange
    electronic = 0.5 * float(np.sum(density * (h_core + fock)))
    mo_energies, c, density = solve(fock)
    return ScfResult(
        energy=electronic + e_nuclear,
        electronic_energy=electronic,
        mo_coefficients=c,
        mo_energies=mo_energies,
        density=density,
        n_iterations=iteration,
    )
