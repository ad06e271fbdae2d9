"""Molecule specifications and the geometries used for fixtures."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import ANGSTROM_TO_BOHR, NUCLEAR_CHARGE


@dataclass(frozen=True)
class MoleculeSpec:
    name: str
    atoms: tuple[tuple[str, tuple[float, float, float]], ...]  # element, xyz in angstrom
    basis: str = "STO-3G"
    charge: int = 0
    multiplicity: int = 1

    def __post_init__(self):
        if self.charge != 0 or self.multiplicity != 1:
            raise ValueError("fixture pipeline covers neutral singlets only")
        if self.basis != "STO-3G":
            raise ValueError("fixture pipeline carries STO-3G data only")
        for _, xyz in self.atoms:
            if not all(np.isfinite(v) for v in xyz):
                raise ValueError("geometry must be finite")

    @property
    def n_electrons(self) -> int:
        return sum(NUCLEAR_CHARGE[element] for element, _ in self.atoms)

    def geometry_bohr(self):
        return [
            (element, np.asarray(xyz, dtype=float) * ANGSTROM_TO_BOHR)
            for element, xyz in self.atoms
        ]

    def charges(self):
        return [NUCLEAR_CHARGE[element] for element, _ in self.atoms]

    def geometry_string(self) -> str:
        return "; ".join(
            f"{element} {xyz[0]:g} {xyz[1]:g} {xyz[2]:g}"
            for element, xyz in self.atoms
        )


def hydrogen_chain(n_atoms: int, spacing: float) -> MoleculeSpec:
    """Linear H chain along z with equal spacing (angstrom)."""
    atoms = tuple(
        ("H", (0.0, 0.0, round(i * spacing, 10))) for i in range(n_atoms)
    )
    return MoleculeSpec(name=f"H{n_atoms}_r{spacing:.1f}", atoms=atoms)


def lithium_hydride(distance: float) -> MoleculeSpec:
    return MoleculeSpec(
        name=f"LiH_r{distance:.1f}",
        atoms=(("Li", (0.0, 0.0, 0.0)), ("H", (0.0, 0.0, distance))),
    )
