"""Monte-Carlo study of the direct (measure-and-post-select) route.

Each round applies the ancilla block and measures the ancilla; only the
all-zero outcome chain leaves ``sin^n(H tau)|phi0>`` (normalized) on the
register, with total probability ``<phi0|sin^{2n}(H tau)|phi0>`` -- the
per-round success probabilities telescope.  Because the post-selected
state after each success is deterministic, the chain is replayed once
with forced outcomes to obtain those probabilities and the conditioned
state, and the trials are then exact Bernoulli draws against the chain.
This is what makes the exponentially-unlikely regime testable at desk
scale.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import oracle
from .evolution import EvolutionMode, Exact
from .hamiltonian import Hamiltonian
from .sigma import apply_sigma_block
from .statevector import StateVector

UNDERFLOW_P = 1e-300


@dataclass
class DirectStats:
    trials: int
    successes: int
    empirical_p: float
    predicted_p: float
    conditioned_energy: float
    step_probabilities: list[float]

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "successes": self.successes,
            "empirical_p": self.empirical_p,
            "predicted_p": self.predicted_p,
            "conditioned_energy": self.conditioned_energy,
            "step_probabilities": self.step_probabilities,
        }


def per_step_success(h: Hamiltonian, phi0: StateVector, tau: float, step: int) -> float:
    """Success probability of round ``step`` given all earlier successes:
    the norm ratio ``<sin^{2 step}> / <sin^{2(step-1)}>``."""
    if step < 1:
        raise ValueError("step must be >= 1")
    prev = oracle.direct_success_probability_exact(h, phi0, tau, step - 1)
    if prev < UNDERFLOW_P:
        raise ValueError(f"norm underflow before step {step}")
    return oracle.direct_success_probability_exact(h, phi0, tau, step) / prev


def run_direct(
    h: Hamiltonian,
    phi0: StateVector,
    tau: float,
    n: int,
    trials: int,
    seed: int,
    mode: EvolutionMode = Exact(),
) -> DirectStats:
    """Simulate ``trials`` attempts at ``n`` consecutive filter rounds."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if n < 0:
        raise ValueError("n must be nonnegative")

    predicted = oracle.direct_success_probability_exact(h, phi0, tau, n)
    if 0.0 < predicted < UNDERFLOW_P or (predicted == 0.0 and n > 0):
        raise ValueError(
            f"predicted success probability underflows ({predicted!r}); "
            "Monte Carlo skipped"
        )

    # One forced-success replay: per-round probabilities + conditioned state.
    state = phi0.with_ancilla()
    ancilla = h.n_qubits
    step_probs: list[float] = []
    for _ in range(n):
        apply_sigma_block(state, h, tau, mode)
        _, p_zero = state.measure_qubit(ancilla, forced_outcome=0)
        step_probs.append(p_zero)
    register = StateVector(h.n_qubits, state.amplitudes[: 1 << h.n_qubits])
    conditioned_energy = register.expectation(h)

    if n == 0:
        return DirectStats(trials, trials, 1.0, predicted, conditioned_energy, [])

    rng = np.random.default_rng(seed)
    draws = rng.random((trials, n))
    successes = int(np.sum(np.all(draws < np.asarray(step_probs), axis=1)))
    return DirectStats(
        trials=trials,
        successes=successes,
        empirical_p=successes / trials,
        predicted_p=predicted,
        conditioned_energy=conditioned_energy,
        step_probabilities=step_probs,
    )
