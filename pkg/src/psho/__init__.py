"""Eigenstate energies of Pauli-string Hamiltonians via sine-filter powers.

The filter ``sin^n(H tau)`` applied to a reference state projects out
the eigenstate whose ``|sin(E_i tau)|`` is largest among those the
reference overlaps; sweeping tau therefore reads out ground and excited
energies in turn.  This package provides the measurement circuits, the
extended-precision moment assembly, an exact dense oracle, and the
experiment drivers, plus a CLI over all of it.
"""

__version__ = "0.1.0"

from .estimator import (
    PshoEstimate,
    assemble_ab,
    binomial,
    energy_from_qn,
    energy_of_power,
    error_amplification_bound,
    estimate_series,
    qn_of_power,
)
from .evolution import (
    Exact,
    EvolutionMode,
    GateSequence,
    Trotter,
    apply_evolution,
    evolution_sequence,
    gate_count,
    trotter_step_u1,
    trotter_step_u2,
)
from .hamiltonian import (
    Hamiltonian,
    ParseError,
    PauliTerm,
    dense_matrix,
    offset_hamiltonian,
    parse_hamiltonian,
    serialize_hamiltonian,
)
from .oracle import (
    Spectrum,
    diagonalize,
    direct_success_probability_exact,
    exact_energy_phi_n,
    exact_moments,
    exact_phi_n,
    overlaps,
)
from .sigma import (
    ExactValue,
    MomentTable,
    NoiseSpec,
    Quantize,
    Shots,
    ShotsThenQuantize,
    apply_sigma_block,
    moment_pair,
    moment_table,
    parse_noise,
    shot_estimate,
)
from .statevector import StateVector, basis_state, inner_product
from .direct import DirectStats, per_step_success, run_direct
from .experiments import (
    Plateau,
    PlateauReport,
    ScanConfig,
    ScanResult,
    TauGrid,
    detect_plateaus,
    excited_state_scan,
    fit_deviation_scaling,
    ground_state_search,
    min_power_for_accuracy,
    single_excitation_refs,
    trotter_deviation_sweep,
)
