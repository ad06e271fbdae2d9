"""Time evolution ``exp(-i H t)``: exact spectral form or Trotter circuits.

The second-order product step over the Hamiltonian's canonical term
order,

    U2(d) = e^{-i h1 d/2} ... e^{-i h_{Z-1} d/2} e^{-i hZ d}
            e^{-i h_{Z-1} d/2} ... e^{-i h1 d/2},

is palindromic, so U2(-d) is its exact inverse.  A full evolution is
floor(|t|/d) such steps plus one remainder step; sequences for negative
times are built as the formal inverse of the positive-time sequence so
that replaying t then -t is the identity to rounding, which in turn
keeps the circuit approximation of sin(H t) Hermitian.

The first-order step U1 lacks this symmetry and exists only as a foil
for tests of that property.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import oracle
from .hamiltonian import Hamiltonian
from .statevector import StateVector

# Remainder steps shorter than this are dropped as exact-time artifacts.
REMAINDER_TOL = 1e-12


@dataclass(frozen=True)
class Exact:
    """Evolve with the cached dense eigendecomposition."""


@dataclass(frozen=True)
class Trotter:
    """Evolve with second-order product steps of length ``delta``."""

    delta: float

    def __post_init__(self):
        if not (np.isfinite(self.delta) and self.delta > 0):
            raise ValueError(f"delta must be positive and finite, got {self.delta}")


EvolutionMode = Exact | Trotter


@dataclass
class Rotation:
    """``exp(-i * angle * P)``, optionally applied on one control branch."""

    factors: tuple
    angle: float
    control: tuple[int, int] | None = None


@dataclass
class OneQubit:
    qubit: int
    matrix: np.ndarray


@dataclass(frozen=True)
class GateCounts:
    total: int
    rotations: int
    one_qubit: int


@dataclass
class GateSequence:
    """Replayable ordered gate list."""

    gates: list = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.gates)

    def extend(self, other: "GateSequence") -> "GateSequence":
        self.gates.extend(other.gates)
        return self

    def inverse(self) -> "GateSequence":
        """Formal inverse: reversed order, negated angles / daggered gates."""
        inv = []
        for gate in reversed(self.gates):
            if isinstance(gate, Rotation):
                inv.append(Rotation(gate.factors, -gate.angle, gate.control))
            else:
                inv.append(OneQubit(gate.qubit, gate.matrix.conj().T))
        return GateSequence(inv)

    def apply(
        self, state: StateVector, control: tuple[int, int] | None = None
    ) -> StateVector:
        """Replay onto ``state``; ``control`` is attached to every gate."""
        for gate in self.gates:
            if isinstance(gate, Rotation):
                gate_control = gate.control
                if control is not None:
                    if gate_control is not None:
                        raise ValueError("gate already controlled")
                    gate_control = control
                state.apply_pauli_rotation(gate.factors, gate.angle, gate_control)
            else:
                if control is not None:
                    raise ValueError("cannot attach a control to a one-qubit gate")
                state.apply_one_qubit_gate(gate.qubit, gate.matrix)
        return state

    def to_matrix(self, n_qubits: int) -> np.ndarray:
        """Dense unitary of the sequence (test-scale qubit counts)."""
        dim = 1 << n_qubits
        cols = np.empty((dim, dim), dtype=complex)
        for j in range(dim):
            state = StateVector(n_qubits)
            state.amplitudes[0] = 0.0
            state.amplitudes[j] = 1.0
            self.apply(state)
            cols[:, j] = state.amplitudes
        return cols


def gate_count(seq: GateSequence) -> GateCounts:
    rotations = sum(1 for g in seq.gates if isinstance(g, Rotation))
    return GateCounts(len(seq.gates), rotations, len(seq.gates) - rotations)


def trotter_step_u2(h: Hamiltonian, delta: float) -> GateSequence:
    """One palindromic second-order step of length ``delta``.

    ``delta`` may be negative here; the step for ``-delta`` is the exact
    inverse of the step for ``delta``.  A single-term Hamiltonian incurs
    no splitting error.
    """
    terms = h.terms
    if not terms:
        return GateSequence()
    gates = [
        Rotation(t.factors, t.coefficient * delta / 2.0) for t in terms[:-1]
    ]
    gates.append(Rotation(terms[-1].factors, terms[-1].coefficient * delta))
    gates.extend(
        Rotation(t.factors, t.coefficient * delta / 2.0) for t in reversed(terms[:-1])
    )
    return GateSequence(gates)


def trotter_step_u1(h: Hamiltonian, delta: float) -> GateSequence:
    """First-order step; breaks time-inversion symmetry (test foil only)."""
    return GateSequence(
        [Rotation(t.factors, t.coefficient * delta) for t in h.terms]
    )


def evolution_sequence(h: Hamiltonian, t: float, delta: float) -> GateSequence:
    """Product-step circuit for ``exp(-i H t)`` with step ``delta > 0``.

    floor(|t|/delta) full steps plus one remainder step (dropped when
    shorter than 1e-12).  Negative times reuse the positive sequence's
    formal inverse, so evolve(t) then evolve(-t) cancels identically.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    magnitude = abs(t)
    if magnitude < REMAINDER_TOL:
        return GateSequence()
    quotient = magnitude / delta
    steps = int(quotient)
    # Absorb representation error when t is meant to be divisible by delta.
    if quotient - steps > 1.0 - 1e-9:
        steps += 1
    remainder = magnitude - steps * delta
    if remainder < REMAINDER_TOL:
        remainder = 0.0

    seq = GateSequence()
    step = trotter_step_u2(h, delta)
    for _ in range(steps):
        seq.extend(GateSequence(list(step.gates)))
    if remainder:
        seq.extend(trotter_step_u2(h, remainder))
    return seq if t > 0 else seq.inverse()


def apply_evolution(
    state: StateVector,
    h: Hamiltonian,
    t: float,
    mode: EvolutionMode,
    control: tuple[int, int] | None = None,
) -> StateVector:
    """Apply ``exp(-i H t)`` to the register qubits 0..h.n_qubits-1.

    ``control=(qubit, polarity)`` gates the whole evolution on a qubit
    above the register.  Exact mode reuses the cached diagonalization;
    Trotter mode replays the product-step sequence.
    """
    if isinstance(mode, Trotter):
        evolution_sequence(h, t, mode.delta).apply(state, control)
        return state

    k = h.n_qubits
    if state.n_qubits < k:
        raise ValueError("state smaller than the Hamiltonian register")
    spectrum = oracle.diagonalize(h)
    phases = np.exp(-1j * spectrum.eigenvalues * t)
    basis = spectrum.eigenvectors
    view = state.amplitudes.reshape(-1, 1 << k)
    if control is None:
        rows = view
    else:
        cq, pol = control
        if cq < k:
            raise ValueError("control qubit lies inside the evolved register")
        if pol not in (0, 1):
            raise ValueError("control polarity must be 0 or 1")
        row_idx = np.arange(view.shape[0])
        rows = view[((row_idx >> (cq - k)) & 1) == pol]
    transformed = ((rows @ basis.conj()) * phases) @ basis.T
    if control is None:
        view[:] = transformed
    else:
        view[((row_idx >> (cq - k)) & 1) == pol] = transformed
    return state
