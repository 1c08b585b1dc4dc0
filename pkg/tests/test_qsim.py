import numpy as np
import pytest

from dqgnn.errors import CapacityError, UsageError
from dqgnn.qsim import (
    CnotGate,
    QuantumState,
    RotationGate,
    apply_cnot,
    apply_rotation,
    inner_product,
    max_qubits,
    measurement_entropy,
    random_state,
    rotation_matrix,
    tensor_product,
    zero_state,
)


def states_close(a: QuantumState, b: QuantumState, atol=1e-12) -> bool:
    return a.qubit_count == b.qubit_count and np.allclose(
        a.amplitudes, b.amplitudes, atol=atol
    )


class TestQuantumState:
    def test_zero_state_single_qubit(self):
        state = zero_state(1)
        assert state.qubit_count == 1
        assert np.allclose(state.amplitudes, [1.0, 0.0])

    def test_zero_state_three_qubits(self):
        state = zero_state(3)
        expected = np.zeros(8)
        expected[0] = 1.0
        assert np.allclose(state.amplitudes, expected)

    def test_rejects_unnormalized(self):
        with pytest.raises(UsageError):
            QuantumState(np.array([1.0, 1.0]), 1)

    def test_rejects_wrong_length(self):
        with pytest.raises(UsageError):
            QuantumState(np.array([1.0, 0.0, 0.0]), 2)

    def test_amplitudes_are_read_only(self):
        state = zero_state(2)
        with pytest.raises(ValueError):
            state.amplitudes[0] = 0.0

    def test_constructor_copies_input(self):
        raw = np.array([1.0, 0.0], dtype=np.complex128)
        state = QuantumState(raw, 1)
        raw[0] = 0.5
        assert state.amplitudes[0] == 1.0

    def test_from_amplitudes_infers_count(self):
        state = QuantumState.from_amplitudes([0.0, 0.0, 0.0, 1.0])
        assert state.qubit_count == 2

    def test_from_amplitudes_rejects_non_power_of_two(self):
        with pytest.raises(UsageError):
            QuantumState.from_amplitudes([1.0, 0.0, 0.0])


class TestCapacity:
    def test_zero_state_respects_default_ceiling(self):
        with pytest.raises(CapacityError):
            zero_state(max_qubits() + 1)

    def test_explicit_limit_overrides(self):
        with pytest.raises(CapacityError):
            zero_state(3, limit=2)

    def test_env_override(self, monkeypatch):
        monkeypatch.setenv("DQGNN_MAX_QUBITS", "4")
        assert max_qubits() == 4
        with pytest.raises(CapacityError):
            zero_state(5)

    def test_env_override_rejects_garbage(self, monkeypatch):
        monkeypatch.setenv("DQGNN_MAX_QUBITS", "many")
        with pytest.raises(UsageError):
            max_qubits()

    def test_capacity_error_names_limit(self):
        with pytest.raises(CapacityError, match="2 qubits"):
            zero_state(3, limit=2)


class TestRotations:
    def test_ry_pi_flips_zero_to_one(self):
        state = apply_rotation(zero_state(1), RotationGate("y", np.pi, 0))
        assert np.allclose(state.amplitudes, [0.0, 1.0], atol=1e-12)

    def test_rx_matches_explicit_matrix(self):
        # Oracle: RX(t) = [[cos(t/2), -i sin(t/2)], [-i sin(t/2), cos(t/2)]].
        theta = np.pi / 2
        state = apply_rotation(zero_state(1), RotationGate("x", theta, 0))
        expected = np.array(
            [np.cos(theta / 2), -1j * np.sin(theta / 2)], dtype=np.complex128
        )
        assert np.allclose(state.amplitudes, expected)

    def test_rz_matches_explicit_matrix(self):
        theta = 0.73
        mat = rotation_matrix("z", theta)
        expected = np.array(
            [[np.exp(-1j * theta / 2), 0], [0, np.exp(1j * theta / 2)]]
        )
        assert np.allclose(mat, expected)

    def test_ry_matches_explicit_matrix(self):
        theta = 1.21
        mat = rotation_matrix("y", theta)
        expected = np.array(
            [
                [np.cos(theta / 2), -np.sin(theta / 2)],
                [np.sin(theta / 2), np.cos(theta / 2)],
            ]
        )
        assert np.allclose(mat, expected)

    def test_rotation_matrices_are_unitary(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            axis = rng.choice(["x", "y", "z"])
            mat = rotation_matrix(str(axis), float(rng.uniform(-7, 7)))
            assert np.allclose(mat @ mat.conj().T, np.eye(2), atol=1e-12)

    def test_rotation_preserves_norm(self):
        rng = np.random.default_rng(11)
        for _ in range(25):
            q = int(rng.integers(1, 5))
            state = random_state(q, rng)
            gate = RotationGate(
                str(rng.choice(["x", "y", "z"])),
                float(rng.uniform(-6, 6)),
                int(rng.integers(0, q)),
            )
            out = apply_rotation(state, gate)
            assert abs(np.linalg.norm(out.amplitudes) - 1.0) < 1e-12

    def test_rotation_composition_adds_angles(self):
        rng = np.random.default_rng(23)
        for _ in range(15):
            q = int(rng.integers(1, 4))
            target = int(rng.integers(0, q))
            axis = str(rng.choice(["x", "y", "z"]))
            a, b = rng.uniform(-4, 4, size=2)
            state = random_state(q, rng)
            step = apply_rotation(
                apply_rotation(state, RotationGate(axis, float(a), target)),
                RotationGate(axis, float(b), target),
            )
            combined = apply_rotation(
                state, RotationGate(axis, float(a + b), target)
            )
            assert states_close(step, combined, atol=1e-10)

    def test_rotation_only_touches_target(self):
        # Rotating qubit 1 of |00> must leave qubit 0 in |0>.
        state = apply_rotation(zero_state(2), RotationGate("y", np.pi, 1))
        assert np.allclose(state.amplitudes, [0.0, 1.0, 0.0, 0.0], atol=1e-12)

    def test_big_endian_target_zero(self):
        # Qubit 0 is the most significant bit: flipping it lands on index 2.
        state = apply_rotation(zero_state(2), RotationGate("y", np.pi, 0))
        assert np.allclose(state.amplitudes, [0.0, 0.0, 1.0, 0.0], atol=1e-12)

    def test_rotation_agrees_with_full_matrix_kron(self):
        rng = np.random.default_rng(31)
        eye = np.eye(2, dtype=np.complex128)
        for _ in range(15):
            q = int(rng.integers(1, 5))
            target = int(rng.integers(0, q))
            axis = str(rng.choice(["x", "y", "z"]))
            angle = float(rng.uniform(-6, 6))
            state = random_state(q, rng)
            full = np.array([[1.0]], dtype=np.complex128)
            for pos in range(q):
                full = np.kron(
                    full, rotation_matrix(axis, angle) if pos == target else eye
                )
            expected = full @ state.amplitudes
            out = apply_rotation(state, RotationGate(axis, angle, target))
            assert np.allclose(out.amplitudes, expected, atol=1e-12)

    def test_target_out_of_range(self):
        with pytest.raises(UsageError):
            apply_rotation(zero_state(2), RotationGate("x", 0.1, 2))

    def test_bad_axis_rejected(self):
        with pytest.raises(UsageError):
            RotationGate("q", 0.1, 0)


class TestCnot:
    def test_flips_target_when_control_set(self):
        # |10> -> |11>: amplitude moves from index 2 to index 3.
        one_zero = QuantumState.from_amplitudes([0.0, 0.0, 1.0, 0.0])
        out = apply_cnot(one_zero, CnotGate(0, 1))
        assert np.allclose(out.amplitudes, [0.0, 0.0, 0.0, 1.0])

    def test_identity_when_control_clear(self):
        zero_one = QuantumState.from_amplitudes([0.0, 1.0, 0.0, 0.0])
        out = apply_cnot(zero_one, CnotGate(0, 1))
        assert np.allclose(out.amplitudes, zero_one.amplitudes)

    def test_involution(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            q = int(rng.integers(2, 5))
            control, target = rng.choice(q, size=2, replace=False)
            gate = CnotGate(int(control), int(target))
            state = random_state(q, rng)
            twice = apply_cnot(apply_cnot(state, gate), gate)
            assert states_close(twice, state)

    def test_agrees_with_dense_matrix(self):
        rng = np.random.default_rng(13)
        for _ in range(10):
            q = int(rng.integers(2, 5))
            control, target = map(int, rng.choice(q, size=2, replace=False))
            dim = 2**q
            full = np.zeros((dim, dim))
            for i in range(dim):
                cbit = (i >> (q - 1 - control)) & 1
                j = i ^ (1 << (q - 1 - target)) if cbit else i
                full[j, i] = 1.0
            state = random_state(q, rng)
            out = apply_cnot(state, CnotGate(control, target))
            assert np.allclose(out.amplitudes, full @ state.amplitudes)

    def test_rejects_equal_control_and_target(self):
        with pytest.raises(UsageError):
            CnotGate(1, 1)

    def test_rejects_out_of_range(self):
        with pytest.raises(UsageError):
            apply_cnot(zero_state(2), CnotGate(0, 2))


class TestTensorProduct:
    def test_zero_tensor_one(self):
        one = apply_rotation(zero_state(1), RotationGate("y", np.pi, 0))
        joint = tensor_product(zero_state(1), one)
        assert joint.qubit_count == 2
        assert np.allclose(joint.amplitudes, [0.0, 1.0, 0.0, 0.0], atol=1e-12)

    def test_first_factor_is_high_order(self):
        one = apply_rotation(zero_state(1), RotationGate("y", np.pi, 0))
        joint = tensor_product(one, zero_state(1))
        assert np.allclose(joint.amplitudes, [0.0, 0.0, 1.0, 0.0], atol=1e-12)

    def test_matches_kron_oracle(self):
        rng = np.random.default_rng(3)
        for _ in range(15):
            a = random_state(int(rng.integers(1, 4)), rng)
            b = random_state(int(rng.integers(1, 4)), rng)
            joint = tensor_product(a, b)
            assert np.allclose(
                joint.amplitudes, np.kron(a.amplitudes, b.amplitudes)
            )

    def test_associative(self):
        rng = np.random.default_rng(41)
        a, b, c = (random_state(2, rng) for _ in range(3))
        left = tensor_product(tensor_product(a, b), c)
        right = tensor_product(a, tensor_product(b, c))
        assert states_close(left, right)

    def test_enforces_ceiling(self):
        with pytest.raises(CapacityError):
            tensor_product(zero_state(2), zero_state(2), limit=3)


class TestInnerProduct:
    def test_orthogonal_basis_states(self):
        one = apply_rotation(zero_state(1), RotationGate("y", np.pi, 0))
        assert abs(inner_product(zero_state(1), one)) < 1e-12

    def test_self_inner_product_is_one(self):
        rng = np.random.default_rng(19)
        for _ in range(10):
            state = random_state(int(rng.integers(1, 5)), rng)
            assert abs(inner_product(state, state) - 1.0) < 1e-12

    def test_matches_conjugate_sum_oracle(self):
        rng = np.random.default_rng(29)
        for _ in range(15):
            q = int(rng.integers(1, 4))
            a, b = random_state(q, rng), random_state(q, rng)
            oracle = sum(
                np.conj(x) * y for x, y in zip(a.amplitudes, b.amplitudes)
            )
            assert abs(inner_product(a, b) - oracle) < 1e-12

    def test_conjugate_symmetry(self):
        rng = np.random.default_rng(37)
        a, b = random_state(3, rng), random_state(3, rng)
        assert abs(inner_product(a, b) - np.conj(inner_product(b, a))) < 1e-12

    def test_rejects_mismatched_sizes(self):
        with pytest.raises(UsageError):
            inner_product(zero_state(1), zero_state(2))


class TestMeasurementEntropy:
    def test_basis_state_has_zero_entropy(self):
        assert measurement_entropy(zero_state(3)) == 0.0

    def test_uniform_superposition_has_maximal_entropy(self):
        q = 3
        amps = np.full(2**q, 1.0 / np.sqrt(2**q), dtype=np.complex128)
        state = QuantumState(amps, q)
        assert abs(measurement_entropy(state) - q) < 1e-12

    def test_equal_pair_gives_one_bit(self):
        state = QuantumState.from_amplitudes(
            [1 / np.sqrt(2), 0.0, 0.0, 1 / np.sqrt(2)]
        )
        assert abs(measurement_entropy(state) - 1.0) < 1e-12

    def test_matches_shannon_oracle(self):
        rng = np.random.default_rng(43)
        for _ in range(20):
            state = random_state(int(rng.integers(1, 5)), rng)
            probs = np.abs(state.amplitudes) ** 2
            oracle = -sum(p * np.log2(p) for p in probs if p > 0)
            assert abs(measurement_entropy(state) - oracle) < 1e-12

    def test_bounded_by_qubit_count(self):
        rng = np.random.default_rng(47)
        for _ in range(25):
            q = int(rng.integers(1, 5))
            h = measurement_entropy(random_state(q, rng))
            assert 0.0 <= h <= q + 1e-12

    def test_phase_invariance(self):
        rng = np.random.default_rng(53)
        state = random_state(3, rng)
        phases = np.exp(1j * rng.uniform(0, 2 * np.pi, size=8))
        rotated = QuantumState(state.amplitudes * phases, 3)
        assert abs(
            measurement_entropy(state) - measurement_entropy(rotated)
        ) < 1e-12
