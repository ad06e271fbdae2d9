import math

import numpy as np
import pytest

from psho import oracle
from psho.experiments import (
    ScanConfig,
    TauGrid,
    detect_plateaus,
    excited_state_scan,
    fit_deviation_scaling,
    ground_state_search,
    min_power_for_accuracy,
    single_excitation_refs,
    trotter_deviation_sweep,
    _envelope_factor,
)
from psho.hamiltonian import offset_hamiltonian, parse_hamiltonian
from psho.statevector import basis_state

from conftest import hf_like_instance, random_hamiltonian, random_state


def all_negative(h):
    """Shift a random operator so its whole spectrum is negative."""
    top = oracle.diagonalize(h).eigenvalues[-1]
    return offset_hamiltonian(h, -(top + 0.5))


class TestDetectPlateaus:
    def test_constant_curve_single_plateau(self):
        curve = [(0.1 * i, 2.0) for i in range(10)]
        plateaus = detect_plateaus(curve, window=4, tol=1e-3)
        assert len(plateaus) == 1
        assert plateaus[0].n_points == 10
        assert plateaus[0].energy == 2.0

    def test_steep_monotone_none(self):
        curve = [(0.1 * i, 0.5 * i) for i in range(10)]
        assert detect_plateaus(curve, window=4, tol=1e-3) == []

    def test_two_step_curve(self):
        values = [1.0] * 5 + [2.0] * 6
        curve = [(0.1 * i, v) for i, v in enumerate(values)]
        plateaus = detect_plateaus(curve, window=4, tol=1e-3)
        assert [p.energy for p in plateaus] == [1.0, 2.0]
        assert [p.n_points for p in plateaus] == [5, 6]

    def test_nan_breaks_runs(self):
        values = [1.0] * 4 + [math.nan] + [1.0] * 4
        curve = [(0.1 * i, v) for i, v in enumerate(values)]
        plateaus = detect_plateaus(curve, window=4, tol=1e-3)
        assert len(plateaus) == 2

    def test_unsorted_rejected(self):
        with pytest.raises(ValueError):
            detect_plateaus([(0.2, 1.0), (0.1, 1.0)], 2, 1.0)


class TestSingleExcitations:
    def test_two_orbitals(self):
        assert single_excitation_refs("10") == ["01"]

    def test_four_orbitals(self):
        refs = single_excitation_refs("1100")
        assert sorted(refs) == ["0101", "0110", "1001", "1010"]

    def test_eight_orbitals_contains_known_configs(self):
        refs = single_excitation_refs("11110000")
        assert len(refs) == 16
        assert len(set(refs)) == 16
        assert "11011000" in refs
        assert "01111000" in refs
        assert all(ref.count("1") == 4 for ref in refs)


class TestGroundStateSearch:
    def test_eigenstate_reference_returns_eigenvalue(self):
        # register basis state is an eigenstate of a diagonal operator
        h = parse_hamiltonian("# n_qubits=2\n-1.5\n0.25 Z0\n0.125 Z1\n0.05 Z0 Z1")
        phi0 = basis_state("00")
        energy = phi0.expectation(h)
        cfg = ScanConfig(powers=(1, 2, 4, 8), plateau_tol=1e-6)
        result = ground_state_search(h, phi0, cfg)
        assert result.found
        assert result.energy == pytest.approx(energy, abs=1e-9)
        # every tau point converged immediately
        assert all(p.n_energy == 2 for p in result.points)

    def test_random_instance_matches_oracle(self, rng):
        for _ in range(3):
            h, bits = hf_like_instance(rng, 4)
            spectrum = oracle.diagonalize(h)
            phi0 = basis_state(bits)
            cfg = ScanConfig(powers=(1, 2, 4, 8, 16, 32, 64, 128))
            result = ground_state_search(h, phi0, cfg)
            assert result.found
            assert result.energy == pytest.approx(
                spectrum.eigenvalues[0], abs=cfg.convergence_tol
            )

    def test_positive_reference_needs_sign_flag(self, rng):
        h = random_hamiltonian(rng, 2, n_terms=4)
        shifted = offset_hamiltonian(h, 20.0)  # spectrum now positive
        with pytest.raises(ValueError, match="sign"):
            ground_state_search(shifted, basis_state("00"), ScanConfig())

    def test_no_plateau_reported_not_faked(self, rng):
        # two-point grid cannot host a 4-point plateau
        h = all_negative(random_hamiltonian(rng, 3, n_terms=8))
        cfg = ScanConfig(powers=(1, 2), tau_grid=TauGrid(0.3, 0.4, 2))
        result = ground_state_search(h, basis_state("000"), cfg)
        assert not result.found
        assert result.energy is None
        assert len(result.points) == 2  # trace retained

    def test_offset_consistency(self, rng):
        # within its validity range the offset shifts the answer by itself
        h, bits = hf_like_instance(rng, 3)
        spectrum = oracle.diagonalize(h)
        phi0 = basis_state(bits)
        eps = 0.45 * abs(spectrum.eigenvalues[0] + spectrum.eigenvalues[-1])
        powers = (1, 2, 4, 8, 16, 32, 64, 128)
        base = ground_state_search(h, phi0, ScanConfig(powers=powers))
        shifted = ground_state_search(
            h, phi0, ScanConfig(powers=powers, offset_eps=eps)
        )
        assert base.found and shifted.found
        assert shifted.energy - eps == pytest.approx(base.energy, abs=2e-3)


class TestExcitedScan:
    def test_mixed_reference_filters_dominant_sine(self):
        # eigenvalues -2 and -1 at tau=2: |sin(-2)| > |sin(-4)| picks -1
        h = parse_hamiltonian("# n_qubits=1\n-1.5\n0.5 Z0")
        phi0_amps = np.array([1.0, 1.0]) / np.sqrt(2)
        from psho.statevector import StateVector

        phi0 = StateVector(1, phi0_amps)
        assert oracle.exact_energy_phi_n(h, phi0, 2.0, 300) == pytest.approx(
            -1.0, abs=1e-6
        )

    def test_toy_plateaus_cover_spectrum(self):
        h = parse_hamiltonian("# n_qubits=2\n-2.5\n0.45 Z0\n0.8 Z1\n0.05 Z0 Z1")
        spectrum = oracle.diagonalize(h)
        e0 = spectrum.eigenvalues[0]
        refs = ["00", "10", "01", "11"]
        cfg = ScanConfig(powers=(100,), plateau_tol=2e-3, plateau_window=3)
        report = excited_state_scan(h, refs, cfg, e0)
        assert report.hits
        for hit in report.hits:
            assert hit.matched_energy == pytest.approx(hit.energy, abs=2e-3)
        # basis-state references of a diagonal operator are eigenstates:
        # each hit sits on that reference's own eigenvalue
        for hit in report.hits:
            index = int(hit.reference[0] == "1") + 2 * int(hit.reference[1] == "1")
            diag = float(np.diag(oracle.dense_matrix(h))[index].real)
            assert hit.energy == pytest.approx(diag, abs=2e-3)

    def test_zero_overlap_states_never_appear(self, rng):
        # diagonal operator, basis-state reference: only its own eigenvalue
        h = parse_hamiltonian("# n_qubits=2\n-2.0\n0.3 Z0\n0.7 Z1")
        e0 = oracle.diagonalize(h).eigenvalues[0]
        cfg = ScanConfig(powers=(80,), plateau_tol=2e-3, plateau_window=3)
        report = excited_state_scan(h, ["10"], cfg, e0)
        own = basis_state("10").expectation(h)
        for hit in report.hits:
            assert hit.energy == pytest.approx(own, abs=2e-3)

    def test_empty_refs_rejected(self):
        h = parse_hamiltonian("# n_qubits=1\n1.0 Z0")
        with pytest.raises(ValueError):
            excited_state_scan(h, [], ScanConfig(), -1.0)


class TestMinPower:
    def test_eigenstate_converges_immediately(self):
        h = parse_hamiltonian("# n_qubits=1\n-2.0\n0.5 Z0")
        phi0 = basis_state("0")
        table = oracle.exact_moments(h, phi0, 0.6, 12)
        assert min_power_for_accuracy(table, -1.5, 1e-6, 12) == 1

    def test_needs_more_power_for_mixed_reference(self, rng):
        h = all_negative(random_hamiltonian(rng, 3, n_terms=10))
        spectrum = oracle.diagonalize(h)
        phi0 = random_state(rng, 3)
        tau = 0.95 * (np.pi / 2) / abs(spectrum.eigenvalues[0])
        table = oracle.exact_moments(h, phi0, tau, 40)
        n_needed = min_power_for_accuracy(table, spectrum.eigenvalues[0], 1e-3, 40)
        if n_needed is not None:
            assert n_needed > 1
            energies = [
                abs(
                    oracle.exact_energy_phi_n(h, phi0, tau, n)
                    - spectrum.eigenvalues[0]
                )
                for n in range(n_needed, 41)
            ]
            assert max(energies) <= 1e-3 + 1e-9


class TestTrotterSweep:
    def test_single_term_no_deviation(self, rng):
        h = parse_hamiltonian("# n_qubits=2\n0.8 X0 Z1")
        phi0 = random_state(rng, 2)
        table = trotter_deviation_sweep(h, phi0, [0.1, 0.2], TauGrid(0.2, 2.0, 8))
        for delta in (0.1, 0.2):
            assert np.abs(table.dev_c[delta]).max() < 1e-10
            assert np.abs(table.dev_h[delta]).max() < 1e-10

    def test_deviation_shrinks_quadratically(self, rng):
        h = parse_hamiltonian("# n_qubits=1\n1.0 X0\n1.0 Z0")
        phi0 = basis_state("0")
        table = trotter_deviation_sweep(h, phi0, [0.1, 0.05], TauGrid(0.3, 3.0, 10))
        big = np.abs(table.dev_h[0.1]).max()
        small = np.abs(table.dev_h[0.05]).max()
        assert 2.5 < big / small < 5.5

    def test_synthetic_envelope_factor(self):
        # deviation k*tau*sin(w*tau): envelope slope is k
        taus = np.linspace(0.1, 12.0, 400)
        k, w = 0.37, 5.0
        devs = k * taus * np.sin(w * taus)
        factor = _envelope_factor(taus, devs)
        assert factor == pytest.approx(k, rel=0.02)

    def test_factor_scales_as_delta_squared(self, rng):
        h = parse_hamiltonian("# n_qubits=1\n1.0 X0\n1.0 Z0")
        phi0 = basis_state("0")
        table = trotter_deviation_sweep(
            h, phi0, [0.05, 0.1, 0.2], TauGrid(0.25, 8.0, 32)
        )
        fits = fit_deviation_scaling(table)
        assert fits.h_fit.factors[0.2] / fits.h_fit.factors[0.1] == pytest.approx(
            4.0, rel=0.35
        )
        assert 1.85 < fits.h_fit.loglog_slope < 2.15

    def test_too_few_extrema_rejected(self):
        taus = np.linspace(0, 1, 5)
        with pytest.raises(ValueError, match="extrema"):
            _envelope_factor(taus, taus * 2.0)


class TestOrderingInvariant:
    def test_dominant_state_climbs_spectrum_with_tau(self, rng):
        # over (pi/2|E0|, pi/|E0|) the dominant-sine index moves up in
        # energy for an all-negative spectrum
        for _ in range(5):
            h = all_negative(random_hamiltonian(rng, 3, n_terms=10))
            energies = oracle.diagonalize(h).eigenvalues
            e0 = energies[0]
            taus = np.linspace(np.pi / (2 * abs(e0)) * 1.01, np.pi / abs(e0) * 0.99, 40)
            picks = [int(np.argmax(np.abs(np.sin(energies * t)))) for t in taus]
            assert all(b >= a for a, b in zip(picks, picks[1:]))
