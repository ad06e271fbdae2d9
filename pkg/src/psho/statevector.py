"""Dense complex statevector with the small gate set the filter circuits need.

Gates mutate the state in place.  A Pauli string acts on a basis index as
``P|j> = i^n_y (-1)^popcount(j & sign_mask) |j ^ flip_mask>``, so both
rotations ``exp(-i*angle*P)`` and expectation values reduce to one gather
plus a phase multiply; the per-term index/phase arrays are cached.

Rotation convention: ``apply_pauli_rotation(factors, angle)`` implements
``exp(-i * angle * P)`` with no extra 1/2 factor.  Global phase is not a
contract anywhere; all checks are stated up to global phase.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from .hamiltonian import Hamiltonian, PauliTerm, term_masks

NORM_TOL = 1e-10

# Ancilla single-qubit gates used by the sin/cos block circuit.
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2.0)
S_GATE = np.array([[1, 0], [0, 1j]], dtype=complex)
S_DAGGER = np.array([[1, 0], [0, -1j]], dtype=complex)


def _parity(values: np.ndarray) -> np.ndarray:
    """Per-element bit parity as a sign array (+1 even, -1 odd)."""
    return np.where(np.bitwise_count(values) & 1, -1.0, 1.0)


@lru_cache(maxsize=512)
def _pauli_action(n_qubits: int, factors: tuple) -> tuple[np.ndarray, np.ndarray]:
    """Cached (gather_index, phase) arrays for a Pauli string on n qubits."""
    flip, sign, n_y = term_masks(PauliTerm(factors, 1.0))
    idx = np.arange(1 << n_qubits)
    gather = idx ^ flip
    phase = (1j ** n_y) * _parity(gather & sign).astype(complex)
    gather.setflags(write=False)
    phase.setflags(write=False)
    return gather, phase


@lru_cache(maxsize=128)
def _control_mask(n_qubits: int, qubit: int, polarity: int) -> np.ndarray:
    idx = np.arange(1 << n_qubits)
    mask = ((idx >> qubit) & 1) == polarity
    mask.setflags(write=False)
    return mask


class StateVector:
    """2^n complex amplitudes over ``n_qubits`` qubits (qubit 0 = LSB)."""

    __slots__ = ("n_qubits", "amplitudes")

    def __init__(self, n_qubits: int, amplitudes: np.ndarray | None = None):
        if n_qubits < 1:
            raise ValueError("n_qubits must be positive")
        self.n_qubits = n_qubits
        if amplitudes is None:
            amps = np.zeros(1 << n_qubits, dtype=complex)
            amps[0] = 1.0
        else:
            amps = np.asarray(amplitudes, dtype=complex)
            if amps.shape != (1 << n_qubits,):
                raise ValueError(
                    f"expected {1 << n_qubits} amplitudes, got {amps.shape}"
                )
            amps = amps.copy()
        self.amplitudes = amps

    # -- construction ---------------------------------------------------

    @classmethod
    def from_bitstring(cls, bitstring: str, n_qubits: int | None = None) -> "StateVector":
        """Computational basis state; character k of the string is qubit k."""
        if n_qubits is None:
            n_qubits = len(bitstring)
        if len(bitstring) != n_qubits:
            raise ValueError(
                f"bitstring length {len(bitstring)} != n_qubits {n_qubits}"
            )
        index = 0
        for q, ch in enumerate(bitstring):
            if ch == "1":
                index |= 1 << q
            elif ch != "0":
                raise ValueError(f"invalid bitstring character {ch!r}")
        state = cls(n_qubits)
        state.amplitudes[0] = 0.0
        state.amplitudes[index] = 1.0
        return state

    def copy(self) -> "StateVector":
        return StateVector(self.n_qubits, self.amplitudes)

    def with_ancilla(self) -> "StateVector":
        """Same register with one fresh |0> qubit appended above it."""
        out = StateVector(self.n_qubits + 1)
        out.amplitudes[: 1 << self.n_qubits] = self.amplitudes
        out.amplitudes[1 << self.n_qubits:] = 0.0
        return out

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    # -- gates ----------------------------------------------------------

    def apply_one_qubit_gate(self, qubit: int, gate: np.ndarray) -> "StateVector":
        """Apply a 2x2 unitary to one qubit (checked unitary to 1e-12)."""
        if not 0 <= qubit < self.n_qubits:
            raise ValueError(f"qubit {qubit} out of range")
        gate = np.asarray(gate, dtype=complex)
        if gate.shape != (2, 2):
            raise ValueError("one-qubit gate must be 2x2")
        if np.abs(gate @ gate.conj().T - np.eye(2)).max() > 1e-12:
            raise ValueError("gate is not unitary")
        view = self.amplitudes.reshape(-1, 2, 1 << qubit)
        low = view[:, 0, :].copy()
        high = view[:, 1, :]
        view[:, 0, :] = gate[0, 0] * low + gate[0, 1] * high
        view[:, 1, :] = gate[1, 0] * low + gate[1, 1] * high
        return self

    def apply_pauli_rotation(
        self,
        factors: tuple,
        angle: float,
        control: tuple[int, int] | None = None,
    ) -> "StateVector":
        """Apply ``exp(-i * angle * P)`` for the Pauli string ``P``.

        ``control=(qubit, polarity)`` restricts the rotation to the
        half-space where the control qubit reads ``polarity``; the empty
        factor tuple then becomes a relative phase between the branches.
        """
        factors = tuple(sorted(factors))
        if control is not None:
            cq, pol = control
            if not 0 <= cq < self.n_qubits:
                raise ValueError(f"control qubit {cq} out of range")
            if pol not in (0, 1):
                raise ValueError("control polarity must be 0 or 1")
            if any(q == cq for q, _ in factors):
                raise ValueError("control qubit overlaps rotation target")
        if any(q >= self.n_qubits for q, _ in factors):
            raise ValueError("rotation qubit out of range")

        c, s = np.cos(angle), np.sin(angle)
        amps = self.amplitudes
        if not factors:
            phase = c - 1j * s
            if control is None:
                amps *= phase
            else:
                amps[_control_mask(self.n_qubits, cq, pol)] *= phase
            return self

        gather, phase = _pauli_action(self.n_qubits, factors)
        if control is None:
            amps[:] = c * amps - (1j * s) * (phase * amps[gather])
        else:
            sel = _control_mask(self.n_qubits, cq, pol)
            moved = phase[sel] * amps[gather[sel]]
            amps[sel] = c * amps[sel] - (1j * s) * moved
        return self

    # -- observables ----------------------------------------------------

    def term_expectation(self, factors: tuple) -> float:
        """<psi| P |psi> for one Pauli string (real part; strings are
        Hermitian so the value is real up to rounding)."""
        factors = tuple(sorted(factors))
        if any(q >= self.n_qubits for q, _ in factors):
            raise ValueError("observable qubit out of range")
        if not factors:
            return float(np.vdot(self.amplitudes, self.amplitudes).real)
        gather, phase = _pauli_action(self.n_qubits, factors)
        value = np.vdot(self.amplitudes, phase * self.amplitudes[gather])
        return float(value.real)

    def expectation(
        self,
        h: Hamiltonian,
        qubit_offset: int = 0,
        minus_z_qubit: int | None = None,
    ) -> float:
        """Expectation of ``H`` embedded at ``qubit_offset``; with
        ``minus_z_qubit`` set, of the product observable ``(-Z) (x) H``.

        The imaginary residue is checked (< 1e-8) before being discarded.
        """
        values = self.term_expectations(h, qubit_offset, minus_z_qubit)
        coeffs = np.array([t.coefficient for t in h.terms])
        return float(np.dot(coeffs, values))

    def term_expectations(
        self,
        h: Hamiltonian,
        qubit_offset: int = 0,
        minus_z_qubit: int | None = None,
    ) -> np.ndarray:
        """Per-term Pauli expectations (no coefficients), each in [-1, 1].

        This is the granularity at which sampling noise acts: one value
        per measured Pauli string.  With ``minus_z_qubit`` the string is
        extended by a Z factor there and negated.
        """
        if qubit_offset < 0 or qubit_offset + h.n_qubits > self.n_qubits:
            raise ValueError("embedded Hamiltonian exceeds the register")
        sign = 1.0
        extra: tuple = ()
        if minus_z_qubit is not None:
            if not 0 <= minus_z_qubit < self.n_qubits:
                raise ValueError("ancilla qubit out of range")
            sign = -1.0
            extra = ((minus_z_qubit, "Z"),)
        out = np.empty(len(h.terms))
        for i, term in enumerate(h.terms):
            shifted = tuple((q + qubit_offset, a) for q, a in term.factors)
            if extra and any(q == extra[0][0] for q, _ in shifted):
                raise ValueError("ancilla qubit overlaps observable")
            value = self._complex_term_expectation(shifted + extra)
            if abs(value.imag) > 1e-8:
                raise ValueError(
                    f"imaginary residue {value.imag:.3e} on term {term}"
                )
            out[i] = sign * value.real
        return out

    def _complex_term_expectation(self, factors: tuple) -> complex:
        factors = tuple(sorted(factors))
        if not factors:
            return complex(np.vdot(self.amplitudes, self.amplitudes))
        gather, phase = _pauli_action(self.n_qubits, factors)
        return complex(np.vdot(self.amplitudes, phase * self.amplitudes[gather]))

    # -- measurement ----------------------------------------------------

    def measure_qubit(
        self,
        qubit: int,
        rng: np.random.Generator | None = None,
        forced_outcome: int | None = None,
    ) -> tuple[int, float]:
        """Projectively measure one qubit; collapse and renormalize.

        Returns ``(outcome, probability-of-that-branch)``.  Either an RNG
        stream or a forced outcome must be supplied; forcing still
        returns the true branch probability.
        """
        if not 0 <= qubit < self.n_qubits:
            raise ValueError(f"qubit {qubit} out of range")
        view = self.amplitudes.reshape(-1, 2, 1 << qubit)
        p1 = float(np.sum(np.abs(view[:, 1, :]) ** 2))
        p0 = max(0.0, 1.0 - p1)
        probs = (p0, p1)
        if forced_outcome is not None:
            if forced_outcome not in (0, 1):
                raise ValueError("forced outcome must be 0 or 1")
            outcome = forced_outcome
            if probs[outcome] < 1e-300:
                raise ValueError(
                    f"forced branch {outcome} has vanishing probability"
                )
        else:
            if rng is None:
                raise ValueError("measurement needs an RNG stream or a forced outcome")
            outcome = 1 if rng.random() < p1 else 0
        view[:, 1 - outcome, :] = 0.0
        self.amplitudes /= np.sqrt(probs[outcome])
        return outcome, probs[outcome]


def basis_state(bitstring: str, n_qubits: int | None = None) -> StateVector:
    return StateVector.from_bitstring(bitstring, n_qubits)


def dump_amplitudes(state: StateVector, path) -> None:
    """Debug dump: little-endian float64 (real, imag) pairs, index order.

    Not a stability surface; intended for ad-hoc inspection only.
    """
    interleaved = np.empty(2 * len(state.amplitudes))
    interleaved[0::2] = state.amplitudes.real
    interleaved[1::2] = state.amplitudes.imag
    interleaved.astype("<f8").tofile(path)


def inner_product(a: StateVector, b: StateVector) -> complex:
    """<a|b>, conjugate-linear in the first argument."""
    if a.n_qubits != b.n_qubits:
        raise ValueError("states have different qubit counts")
    return complex(np.vdot(a.amplitudes, b.amplitudes))
