import numpy as np
import pytest

from psho.hamiltonian import Hamiltonian, PauliTerm, dense_matrix, parse_hamiltonian
from psho.statevector import (
    HADAMARD,
    S_GATE,
    StateVector,
    basis_state,
    inner_product,
)

from conftest import random_hamiltonian, random_state


def embedded_pauli(factors, n_qubits):
    return dense_matrix(Hamiltonian(n_qubits, [PauliTerm(tuple(factors), 1.0)]))


class TestBasisState:
    def test_zero(self):
        assert np.allclose(basis_state("0").amplitudes, [1, 0])

    def test_ten_sets_index_one(self):
        assert np.allclose(basis_state("10").amplitudes, [0, 1, 0, 0])

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            basis_state("10", n_qubits=3)

    def test_invalid_character(self):
        with pytest.raises(ValueError):
            basis_state("1x")


class TestOneQubitGates:
    def test_hadamard_on_zero(self):
        state = basis_state("0").apply_one_qubit_gate(0, HADAMARD)
        assert np.allclose(state.amplitudes, [1, 1] / np.sqrt(2))

    def test_s_gate_phases_one_component(self):
        state = basis_state("0").apply_one_qubit_gate(0, HADAMARD)
        state.apply_one_qubit_gate(0, S_GATE)
        assert np.allclose(state.amplitudes, [1, 1j] / np.sqrt(2))

    def test_gate_then_dagger_restores(self, rng):
        for _ in range(10):
            state = random_state(rng, 3)
            before = state.amplitudes.copy()
            raw = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
            gate, _ = np.linalg.qr(raw)
            qubit = int(rng.integers(3))
            state.apply_one_qubit_gate(qubit, gate)
            state.apply_one_qubit_gate(qubit, gate.conj().T)
            assert np.abs(state.amplitudes - before).max() < 1e-12

    def test_norm_preserved(self, rng):
        state = random_state(rng, 4)
        state.apply_one_qubit_gate(2, HADAMARD)
        assert state.norm() == pytest.approx(1.0, abs=1e-12)

    def test_non_unitary_rejected(self):
        with pytest.raises(ValueError):
            basis_state("0").apply_one_qubit_gate(0, np.array([[1, 0], [0, 2]]))

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            basis_state("0").apply_one_qubit_gate(1, HADAMARD)


class TestPauliRotation:
    def test_z_rotation_phases_eigenstate(self):
        state = basis_state("0").apply_pauli_rotation(((0, "Z"),), np.pi / 2)
        # |0> is the +1 eigenstate: picks up exp(-i pi/2)
        assert np.allclose(state.amplitudes[0], np.exp(-1j * np.pi / 2))

    def test_control_polarity_blocks(self):
        # control qubit reads 0, solid (polarity 1) rotation must not act
        state = basis_state("00")
        before = state.amplitudes.copy()
        state.apply_pauli_rotation(((0, "X"),), 1.23, control=(1, 1))
        assert np.allclose(state.amplitudes, before)

    def test_control_selects_branch(self, rng):
        register = random_state(rng, 2)
        state = StateVector(3)
        state.amplitudes[:4] = register.amplitudes / np.sqrt(2)
        state.amplitudes[4:] = register.amplitudes / np.sqrt(2)
        factors = ((0, "Y"), (1, "X"))
        angle = 0.77
        state.apply_pauli_rotation(factors, angle, control=(2, 1))
        # branch 0 untouched
        assert np.allclose(state.amplitudes[:4], register.amplitudes / np.sqrt(2))
        # branch 1 rotated
        expected = register.copy().apply_pauli_rotation(factors, angle)
        assert np.allclose(state.amplitudes[4:], expected.amplitudes / np.sqrt(2))

    def test_matches_dense_exponential(self, rng):
        for _ in range(8):
            n_factors = int(rng.integers(1, 4))
            qubits = sorted(rng.choice(3, size=n_factors, replace=False))
            factors = tuple((int(q), "XYZ"[rng.integers(3)]) for q in qubits)
            angle = float(rng.uniform(-2, 2))
            mat = embedded_pauli(factors, 3)
            w, v = np.linalg.eigh(mat)
            expm = (v * np.exp(-1j * angle * w)) @ v.conj().T
            state = random_state(rng, 3)
            expected = expm @ state.amplitudes
            state.apply_pauli_rotation(factors, angle)
            assert np.abs(state.amplitudes - expected).max() < 1e-12

    def test_identity_factors_give_global_phase(self, rng):
        state = random_state(rng, 2)
        before = state.amplitudes.copy()
        state.apply_pauli_rotation((), 0.4)
        assert np.allclose(state.amplitudes, np.exp(-0.4j) * before)

    def test_rotation_unwinds(self, rng):
        state = random_state(rng, 3)
        before = state.amplitudes.copy()
        factors = ((0, "X"), (2, "Z"))
        state.apply_pauli_rotation(factors, 0.9)
        state.apply_pauli_rotation(factors, -0.9)
        assert np.abs(state.amplitudes - before).max() < 1e-12

    def test_overlapping_control_rejected(self):
        with pytest.raises(ValueError):
            basis_state("00").apply_pauli_rotation(((0, "X"),), 0.1, control=(0, 1))


class TestExpectation:
    def test_z_on_zero(self):
        h = parse_hamiltonian("# n_qubits=1\n1.0 Z0")
        assert basis_state("0").expectation(h) == pytest.approx(1.0)

    def test_x_on_plus(self):
        h = parse_hamiltonian("# n_qubits=1\n1.0 X0")
        state = basis_state("0").apply_one_qubit_gate(0, HADAMARD)
        assert state.expectation(h) == pytest.approx(1.0)

    def test_matches_dense(self, rng):
        for _ in range(6):
            h = random_hamiltonian(rng, 3, n_terms=8, with_identity=True)
            state = random_state(rng, 3)
            expected = np.vdot(state.amplitudes, dense_matrix(h) @ state.amplitudes)
            assert state.expectation(h) == pytest.approx(expected.real, abs=1e-10)

    def test_offset_embedding(self, rng):
        h = random_hamiltonian(rng, 2, n_terms=4)
        register = random_state(rng, 2)
        big = StateVector(3)
        big.amplitudes[::2] = 0
        # place register on qubits 1..2, qubit 0 fixed to |1>
        big.amplitudes[1::2] = register.amplitudes
        assert big.expectation(h, qubit_offset=1) == pytest.approx(
            register.expectation(h), abs=1e-12
        )

    def test_minus_z_factor(self):
        h = parse_hamiltonian("# n_qubits=1\n1.0 Z0")
        state = basis_state("01")  # register |0>, ancilla |1>
        # -Z on ancilla gives +1; Z0 on register gives +1
        assert state.expectation(h, minus_z_qubit=1) == pytest.approx(1.0)
        state = basis_state("00")
        assert state.expectation(h, minus_z_qubit=1) == pytest.approx(-1.0)

    def test_register_overflow_rejected(self):
        h = parse_hamiltonian("# n_qubits=2\n1.0 Z0")
        with pytest.raises(ValueError):
            basis_state("0").expectation(h)


class TestMeasurement:
    def test_deterministic_zero(self):
        outcome, prob = basis_state("0").measure_qubit(0, np.random.default_rng(0))
        assert outcome == 0 and prob == pytest.approx(1.0)

    def test_forced_branch(self):
        state = basis_state("0").apply_one_qubit_gate(0, HADAMARD)
        outcome, prob = state.measure_qubit(0, forced_outcome=0)
        assert outcome == 0
        assert prob == pytest.approx(0.5)
        assert np.allclose(state.amplitudes, [1, 0])

    def test_forced_impossible_branch(self):
        with pytest.raises(ValueError):
            basis_state("0").measure_qubit(0, forced_outcome=1)

    def test_branch_probabilities_sum_to_one(self, rng):
        for _ in range(8):
            state = random_state(rng, 3)
            qubit = int(rng.integers(3))
            _, p0 = state.copy().measure_qubit(qubit, forced_outcome=0) \
                if abs(state.amplitudes.reshape(-1, 2, 1 << qubit)[:, 0, :]).max() > 1e-8 \
                else (0, 0.0)
            probs = state.copy().amplitudes.reshape(-1, 2, 1 << qubit)
            p0_direct = float(np.sum(np.abs(probs[:, 0, :]) ** 2))
            p1_direct = float(np.sum(np.abs(probs[:, 1, :]) ** 2))
            assert p0_direct + p1_direct == pytest.approx(1.0, abs=1e-10)

    def test_collapse_renormalizes(self, rng):
        state = random_state(rng, 3)
        state.measure_qubit(1, np.random.default_rng(3))
        assert state.norm() == pytest.approx(1.0, abs=1e-12)


class TestInnerProduct:
    def test_orthonormal_basis(self):
        assert inner_product(basis_state("0"), basis_state("0")) == 1.0
        assert inner_product(basis_state("0"), basis_state("1")) == 0.0

    def test_conjugate_linear_first(self, rng):
        a, b = random_state(rng, 2), random_state(rng, 2)
        scaled = StateVector(2, 1j * a.amplitudes)
        assert inner_product(scaled, b) == pytest.approx(
            -1j * inner_product(a, b), abs=1e-12
        )

    def test_cauchy_schwarz(self, rng):
        for _ in range(10):
            a, b = random_state(rng, 3), random_state(rng, 3)
            assert abs(inner_product(a, b)) <= 1 + 1e-12
        c = random_state(rng, 3)
        d = StateVector(3, np.exp(0.3j) * c.amplitudes)
        assert abs(inner_product(c, d)) == pytest.approx(1.0, abs=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            inner_product(basis_state("0"), basis_state("00"))


class TestAmplitudeDump:
    def test_round_trip(self, rng, tmp_path):
        from psho.statevector import dump_amplitudes

        state = random_state(rng, 3)
        path = tmp_path / "amps.bin"
        dump_amplitudes(state, path)
        raw = np.fromfile(path, dtype="<f8")
        restored = raw[0::2] + 1j * raw[1::2]
        assert np.array_equal(restored, state.amplitudes)
