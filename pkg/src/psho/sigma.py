"""Ancilla sin/cos block and the moment measurements feeding the estimator.

One ancilla qubit above the register turns the nonunitary ``sin(H t)``
into a block of a larger unitary: after the block circuit the ancilla-0
branch holds ``sin(H t)|phi0>`` and the ancilla-1 branch
``cos(H t)|phi0>`` (up to one global phase).  Measuring ``-Z (x) I`` and
``-Z (x) H`` on that state yields the two moment families

    c_m = <phi0| cos(2 H tau m) |phi0>,
    h_m = <phi0| H cos(2 H tau m) |phi0>,

which are the only quantum inputs the estimator needs; a table of depth
N serves every power n <= N.

Noise acts at the moment level, per measured Pauli string: either a
finite-shot binomial model, fixed-decimal quantization, or both.  The
m = 0 entries are classical (c_0 = 1, h_0 = <phi0|H|phi0>) and carry no
noise.
"""
from __future__ import annotations

import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .evolution import EvolutionMode, Trotter, apply_evolution
from .hamiltonian import Hamiltonian, PauliTerm
from .statevector import HADAMARD, S_DAGGER, StateVector

ANCILLA_LEAK_TOL = 1e-10


# -- noise specifications ------------------------------------------------


@dataclass(frozen=True)
class ExactValue:
    def delta_max(self) -> float:
        return 0.0

    def describe(self) -> str:
        return "exact"


@dataclass(frozen=True)
class Shots:
    count: int
    seed: int

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("shot count must be >= 1")

    def delta_max(self) -> float:
        # one standard error of a +/-1 observable estimate
        return 1.0 / math.sqrt(self.count)

    def describe(self) -> str:
        return f"shots:{self.count}:{self.seed}"


@dataclass(frozen=True)
class Quantize:
    digits: int = 6

    def __post_init__(self):
        if self.digits < 1:
            raise ValueError("digits must be >= 1")

    def delta_max(self) -> float:
        return 0.5 * 10.0 ** (-self.digits)

    def describe(self) -> str:
        return f"quantize:{self.digits}"


@dataclass(frozen=True)
class ShotsThenQuantize:
    count: int
    seed: int
    digits: int = 6

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("shot count must be >= 1")
        if self.digits < 1:
            raise ValueError("digits must be >= 1")

    def delta_max(self) -> float:
        return 1.0 / math.sqrt(self.count) + 0.5 * 10.0 ** (-self.digits)

    def describe(self) -> str:
        return f"shots:{self.count}:{self.seed}+quantize:{self.digits}"


NoiseSpec = ExactValue | Shots | Quantize | ShotsThenQuantize


def parse_noise(text: str) -> NoiseSpec:
    """Parse the CLI noise syntax: ``exact``, ``shots:N:SEED``,
    ``quantize:D`` or ``shots:N:SEED+quantize:D``."""
    text = text.strip().lower()
    if text == "exact":
        return ExactValue()
    if "+" in text:
        shots_part, _, quant_part = text.partition("+")
        shots = parse_noise(shots_part)
        quant = parse_noise(quant_part)
        if not isinstance(shots, Shots) or not isinstance(quant, Quantize):
            raise ValueError(f"unrecognized noise spec {text!r}")
        return ShotsThenQuantize(shots.count, shots.seed, quant.digits)
    parts = text.split(":")
    if parts[0] == "shots" and len(parts) == 3:
        return Shots(int(parts[1]), int(parts[2]))
    if parts[0] == "quantize" and len(parts) == 2:
        return Quantize(int(parts[1]))
    raise ValueError(f"unrecognized noise spec {text!r}")


def shot_estimate(expectation: float, count: int, rng: np.random.Generator) -> float:
    """Mean of ``count`` +/-1 samples drawn with P(+1) = (1+e)/2."""
    if abs(expectation) > 1.0 + 1e-9:
        raise ValueError(f"expectation {expectation} outside [-1, 1]")
    p_up = min(1.0, max(0.0, (1.0 + expectation) / 2.0))
    ups = rng.binomial(count, p_up)
    return 2.0 * ups / count - 1.0


def _apply_noise(
    noise: NoiseSpec,
    per_term: np.ndarray,
    coeffs: np.ndarray,
    stream_key: tuple[int, int],
) -> float:
    """Combine per-Pauli expectations under the noise model.

    Shot streams are seeded per (m, observable, term), so tables are
    identical however the evaluation is scheduled.
    """
    if isinstance(noise, ExactValue):
        return float(np.dot(coeffs, per_term))
    if isinstance(noise, Quantize):
        return round(float(np.dot(coeffs, per_term)), noise.digits)
    sampled = np.empty_like(per_term)
    for i, value in enumerate(per_term):
        rng = np.random.default_rng([noise.seed & 0x7FFFFFFF, *stream_key, i])
        sampled[i] = shot_estimate(value, noise.count, rng)
    total = float(np.dot(coeffs, sampled))
    if isinstance(noise, ShotsThenQuantize):
        total = round(total, noise.digits)
    return total


# -- moment table ----------------------------------------------------------


@dataclass
class MomentTable:
    """Arrays c_m, h_m for m = 0..max_m plus their provenance."""

    tau: float
    c: np.ndarray
    h: np.ndarray
    noise: NoiseSpec
    evolution: str

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float)
        self.h = np.asarray(self.h, dtype=float)
        if self.c.shape != self.h.shape or self.c.ndim != 1 or len(self.c) < 1:
            raise ValueError("c and h must be equal-length 1-D arrays")
        if self.c[0] != 1.0:
            raise ValueError(f"c[0] must be exactly 1, got {self.c[0]}")
        allowance = self.noise.delta_max() + 1e-9
        worst = np.abs(self.c).max()
        if worst > 1.0 + allowance:
            raise ValueError(f"|c_m| = {worst} exceeds 1 + noise allowance")

    @property
    def max_m(self) -> int:
        return len(self.c) - 1

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write(f"# tau={self.tau!r}\n")
        out.write(f"# noise={self.noise.describe()}\n")
        out.write(f"# evolution={self.evolution}\n")
        out.write("m,c_m,h_m\n")
        for m in range(self.max_m + 1):
            out.write(f"{m},{float(self.c[m])!r},{float(self.h[m])!r}\n")
        return out.getvalue()


@lru_cache(maxsize=32)
def _identity_operator(n_qubits: int) -> Hamiltonian:
    return Hamiltonian(n_qubits, [PauliTerm((), 1.0)])


# -- circuits --------------------------------------------------------------


def apply_sigma_block(
    state: StateVector, h: Hamiltonian, t: float, mode: EvolutionMode
) -> StateVector:
    """Run the block circuit in place.

    Expects the register in qubits 0..h.n_qubits-1 and the ancilla
    (qubit h.n_qubits) in |0>; afterwards the ancilla-0 branch is
    ``sin(H t)|phi0>`` and the ancilla-1 branch ``cos(H t)|phi0>`` up to
    a global phase (up to product-step error in Trotter mode).

    Circuit: Hadamard and diag(1, -i) on the ancilla, the two
    opposite-time evolutions (``exp(-iHt)`` on the hollow/0 branch,
    ``exp(+iHt)`` on the solid/1 branch), then diag(1, -i), Hadamard,
    diag(1, -i) to land on the contracted block form.
    """
    ancilla = h.n_qubits
    if state.n_qubits < ancilla + 1:
        raise ValueError("state lacks the ancilla qubit")
    leak = 1.0 - float(
        np.sum(np.abs(state.amplitudes.reshape(-1, 1 << ancilla)[::2]) ** 2)
    )
    if leak > ANCILLA_LEAK_TOL:
        raise ValueError(f"ancilla not in |0>: leakage {leak:.3e}")

    state.apply_one_qubit_gate(ancilla, HADAMARD)
    state.apply_one_qubit_gate(ancilla, S_DAGGER)
    apply_evolution(state, h, +t, mode, control=(ancilla, 0))
    apply_evolution(state, h, -t, mode, control=(ancilla, 1))
    state.apply_one_qubit_gate(ancilla, S_DAGGER)
    state.apply_one_qubit_gate(ancilla, HADAMARD)
    state.apply_one_qubit_gate(ancilla, S_DAGGER)
    return state


def moment_pair(
    h: Hamiltonian,
    phi0: StateVector,
    tau: float,
    m: int,
    mode: EvolutionMode,
    noise: NoiseSpec,
) -> tuple[float, float]:
    """(c_m, h_m) for one index.  m = 0 is evaluated classically."""
    if m < 0:
        raise ValueError("moment index must be nonnegative")
    if m == 0:
        return 1.0, phi0.expectation(h)
    state = phi0.with_ancilla()
    apply_sigma_block(state, h, tau * m, mode)
    ancilla = h.n_qubits

    identity = _identity_operator(h.n_qubits)
    c_terms = state.term_expectations(identity, 0, minus_z_qubit=ancilla)
    c_m = _apply_noise(noise, c_terms, np.array([1.0]), (m, 0))

    h_terms = state.term_expectations(h, 0, minus_z_qubit=ancilla)
    coeffs = np.array([t.coefficient for t in h.terms])
    h_m = _apply_noise(noise, h_terms, coeffs, (m, 1))
    return c_m, h_m


def moment_table(
    h: Hamiltonian,
    phi0: StateVector,
    tau: float,
    max_m: int,
    mode: EvolutionMode,
    noise: NoiseSpec,
    workers: int = 1,
) -> MomentTable:
    """Measure moments m = 0..max_m.

    Entries are independent; with ``workers > 1`` they are evaluated on a
    thread pool (each owns its statevector), and the per-(m, term) noise
    streams keep the result identical to the sequential run.
    """
    if max_m < 1:
        raise ValueError("max_m must be >= 1")
    entries: list[tuple[float, float]] = [(0.0, 0.0)] * (max_m + 1)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = {
                m: pool.submit(moment_pair, h, phi0.copy(), tau, m, mode, noise)
                for m in range(max_m + 1)
            }
            for m, fut in futures.items():
                entries[m] = fut.result()
    else:
        for m in range(max_m + 1):
            entries[m] = moment_pair(h, phi0, tau, m, mode, noise)
    c = np.array([e[0] for e in entries])
    hmom = np.array([e[1] for e in entries])
    if isinstance(mode, Trotter):
        evolution = f"trotter:{mode.delta!r}"
    else:
        evolution = "exact"
    return MomentTable(tau=tau, c=c, h=hmom, noise=noise, evolution=evolution)
