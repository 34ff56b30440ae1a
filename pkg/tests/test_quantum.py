import math

import numpy as np
import pytest

from ddsim import quantum as q

TD_ZERO_PLUS = 0.7071067811865476  # eigenvalues of |0><0| - |+><+| are +-1/sqrt(2)


def u3(theta, phi, lam):
    return np.array(
        [
            [math.cos(theta / 2), -np.exp(1j * lam) * math.sin(theta / 2)],
            [np.exp(1j * phi) * math.sin(theta / 2),
             np.exp(1j * (phi + lam)) * math.cos(theta / 2)],
        ]
    )


class TestEulerUnitary:
    def test_x_gate_angles(self):
        u = q.euler_unitary(q.EulerAngles(math.pi, 0, math.pi))
        assert np.allclose(u, q.standard_gate("X"), atol=1e-12)

    def test_y_gate_angles(self):
        u = q.euler_unitary(q.EulerAngles(math.pi, 2 * math.pi, 0))
        assert q.ray_equal(u, q.standard_gate("Y"), tol=1e-12)

    def test_identity_angles(self):
        u = q.euler_unitary(q.EulerAngles(0, 0, 0))
        assert np.allclose(u, 1j * np.eye(2), atol=1e-12)

    def test_matches_u3_with_negated_angles(self):
        rng = np.random.default_rng(11)
        for _ in range(25):
            t, p, l = rng.uniform(-math.pi, math.pi, 3)
            ours = q.euler_unitary(q.EulerAngles(t, p, l))
            assert q.ray_equal(ours, u3(-t, -p, -l), tol=1e-10)

    def test_always_unitary(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            angles = q.EulerAngles(*rng.uniform(0, 2 * math.pi, 3))
            assert q.is_unitary(q.euler_unitary(angles))

    def test_rejects_non_finite(self):
        with pytest.raises(q.QuantumValueError):
            q.EulerAngles(math.nan)
        with pytest.raises(q.QuantumValueError):
            q.EulerAngles(1.0, math.inf, 0.0)

    def test_angles_reduced_mod_2pi(self):
        a = q.EulerAngles(5 * math.pi, -math.pi / 2, 0)
        assert abs(a.theta - math.pi) < 1e-12
        assert abs(a.phi - 3 * math.pi / 2) < 1e-12


class TestStandardGates:
    def test_h_on_zero_gives_plus(self):
        plus = q.standard_gate("H") @ q.ket("0")
        assert np.allclose(plus, np.array([1, 1]) / math.sqrt(2))

    def test_x_is_involution(self):
        x = q.standard_gate("X")
        assert np.allclose(x @ x, np.eye(2))

    def test_cnot_flips_target(self):
        out = q.standard_gate("CNOT") @ q.ket("10")
        assert np.allclose(out, q.ket("11"))

    def test_unknown_gate(self):
        with pytest.raises(q.QuantumValueError):
            q.standard_gate("T")

    def test_all_gates_unitary(self):
        for name in ("I", "X", "Y", "Z", "H", "CNOT"):
            assert q.is_unitary(q.standard_gate(name))


class TestBellPrep:
    def test_phi_plus_state(self):
        u = q.circuit_unitary(q.bell_prep("phi+"), 2)
        psi = u @ q.ket("00")
        target = (q.ket("00") + q.ket("11")) / math.sqrt(2)
        assert q.ray_equal(psi, target)

    def test_psi_plus_state(self):
        u = q.circuit_unitary(q.bell_prep("psi+"), 2)
        psi = u @ q.ket("00")
        target = (q.ket("01") + q.ket("10")) / math.sqrt(2)
        assert q.ray_equal(psi, target)

    def test_phi_plus_outcome_probabilities(self):
        u = q.circuit_unitary(q.bell_prep("phi+"), 2)
        probs = np.abs(u @ q.ket("00")) ** 2
        assert np.allclose(probs, [0.5, 0, 0, 0.5], atol=1e-12)

    def test_unknown_kind(self):
        with pytest.raises(q.QuantumValueError):
            q.bell_prep("sigma+")


class TestDistances:
    def test_trace_distance_self(self):
        rho = q.density(q.ket("0"))
        assert q.trace_distance(rho, rho) == 0

    def test_trace_distance_orthogonal(self):
        assert abs(q.trace_distance(q.density(q.ket("0")), q.density(q.ket("1"))) - 1) < 1e-12

    def test_trace_distance_zero_plus(self):
        plus = q.density(np.array([1, 1]) / math.sqrt(2))
        d = q.trace_distance(q.density(q.ket("0")), plus)
        assert abs(d - TD_ZERO_PLUS) < 1e-12

    def test_dim_mismatch(self):
        with pytest.raises(q.QuantumValueError):
            q.trace_distance(np.eye(2) / 2, np.eye(4) / 4)

    def test_fidelity_self(self):
        rho = q.density(np.array([0.6, 0.8j]))
        assert abs(q.uhlmann_fidelity(rho, rho) - 1) < 1e-12

    def test_fidelity_orthogonal(self):
        f = q.uhlmann_fidelity(q.density(q.ket("0")), q.density(q.ket("1")))
        assert f < 1e-12

    def test_fidelity_zero_vs_mixed(self):
        f = q.uhlmann_fidelity(q.density(q.ket("0")), np.eye(2) / 2)
        assert abs(f - 0.5) < 1e-12

    def test_fidelity_symmetric(self):
        rng = np.random.default_rng(3)
        a = q.density(q.haar_random_state(rng))
        b = 0.7 * q.density(q.haar_random_state(rng)) + 0.3 * np.eye(2) / 2
        assert abs(q.uhlmann_fidelity(a, b) - q.uhlmann_fidelity(b, a)) < 1e-10

    def test_fidelity_rejects_non_psd(self):
        bad = np.array([[1.5, 0], [0, -0.5]], dtype=complex)
        with pytest.raises(q.QuantumValueError):
            q.uhlmann_fidelity(bad, np.eye(2) / 2)

    def test_pure_state_relation(self):
        # for pure states: trace_distance^2 + fidelity = 1
        rng = np.random.default_rng(17)
        for _ in range(30):
            a = q.density(q.haar_random_state(rng))
            b = q.density(q.haar_random_state(rng))
            d = q.trace_distance(a, b)
            f = q.uhlmann_fidelity(a, b)
            assert abs(d * d + f - 1) < 1e-10


class TestHaarSampling:
    def test_deterministic(self):
        a = q.haar_random_state(np.random.default_rng(42))
        b = q.haar_random_state(np.random.default_rng(42))
        assert np.array_equal(a, b)

    def test_normalized(self):
        rng = np.random.default_rng(1)
        for _ in range(100):
            assert abs(np.linalg.norm(q.haar_random_state(rng)) - 1) < 1e-12

    def test_mean_overlap_is_half(self):
        # the analytic Bloch-sphere average of |<0|psi>|^2 is exactly 1/2
        rng = np.random.default_rng(2024)
        overlaps = [abs(q.haar_random_state(rng)[0]) ** 2 for _ in range(10_000)]
        assert abs(np.mean(overlaps) - 0.5) < 0.02


class TestPauliEigenstates:
    def test_six_states(self):
        assert len(q.pauli_eigenstates()) == 6

    def test_plus_is_x_eigenstate(self):
        plus = q.pauli_eigenstates()[2]
        val = plus.conj() @ q.standard_gate("X") @ plus
        assert abs(val - 1) < 1e-12

    def test_pairwise_distinct_rays(self):
        states = q.pauli_eigenstates()
        for i in range(6):
            for j in range(i + 1, 6):
                assert not q.ray_equal(states[i], states[j])


class TestPlumbing:
    def test_partial_trace_of_product(self):
        rng = np.random.default_rng(8)
        rho_a = q.density(q.haar_random_state(rng))
        rho_b = 0.5 * q.density(q.haar_random_state(rng)) + 0.5 * np.eye(2) / 2
        joint = np.kron(rho_a, rho_b)
        assert np.max(np.abs(q.partial_trace(joint, (2, 2), 0) - rho_a)) < 1e-12
        assert np.max(np.abs(q.partial_trace(joint, (2, 2), 1) - rho_b)) < 1e-12

    def test_partial_trace_preserves_trace(self):
        rng = np.random.default_rng(9)
        m = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
        rho = m @ m.conj().T
        rho /= np.trace(rho)
        reduced = q.partial_trace(rho, (2, 4), 0)
        assert abs(np.trace(reduced) - 1) < 1e-12

    def test_validate_density_matrix(self):
        q.validate_density_matrix(np.eye(2) / 2)
        with pytest.raises(q.QuantumValueError):
            q.validate_density_matrix(np.array([[0.5, 0.4], [0.2, 0.5]], dtype=complex))
        with pytest.raises(q.QuantumValueError):
            q.validate_density_matrix(np.eye(2))

    def test_ray_equal_rejects_different_states(self):
        assert not q.ray_equal(q.ket("0"), q.ket("1"))
        assert q.ray_equal(q.ket("0"), 1j * q.ket("0"))
