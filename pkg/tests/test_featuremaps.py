"""Encoding circuits, the trainable ansatz, and gate matrices."""

import numpy as np
import pytest

from noisyq.featuremaps import (
    DEFAULT_PAULIS,
    Circuit,
    FeatureMapKind,
    Gate,
    GateKind,
    ansatz_param_count,
    apply_circuit_unitary,
    build_ansatz,
    build_feature_map,
    gate_matrix,
    lifted_gate_matrix,
)
from oracles import StateVector, cx_matrix, lift_single, sv_phase, sv_rx, sv_ry, sv_rz


class TestGateValidation:
    def test_cx_needs_two_distinct_qubits(self):
        with pytest.raises(ValueError):
            Gate(GateKind.CX, (1, 1))
        with pytest.raises(ValueError):
            Gate(GateKind.CX, (0,))
        with pytest.raises(ValueError):
            Gate(GateKind.CX, (0, 1), angle=0.5)

    def test_rotations_need_finite_angle(self):
        with pytest.raises(ValueError):
            Gate(GateKind.RY, (0,))
        with pytest.raises(ValueError):
            Gate(GateKind.PHASE, (0,), angle=float("nan"))
        with pytest.raises(ValueError):
            Gate(GateKind.H, (0,), angle=1.0)

    def test_circuit_rejects_out_of_range_qubit(self):
        with pytest.raises(ValueError):
            Circuit(2, (Gate(GateKind.H, (2,)),))

    def test_circuit_qubit_bounds(self):
        with pytest.raises(ValueError):
            Circuit(0, ())
        with pytest.raises(ValueError):
            Circuit(9, ())


class TestGateMatrices:
    def test_single_qubit_matrices_match_reference(self):
        theta = 0.81
        cases = [
            (Gate(GateKind.RX, (0,), theta), sv_rx(theta)),
            (Gate(GateKind.RY, (0,), theta), sv_ry(theta)),
            (Gate(GateKind.RZ, (0,), theta), sv_rz(theta)),
            (Gate(GateKind.PHASE, (0,), theta), sv_phase(theta)),
        ]
        for gate, expected in cases:
            np.testing.assert_allclose(gate_matrix(gate), expected, atol=1e-15)

    def test_all_gate_matrices_unitary(self):
        gates = [
            Gate(GateKind.H, (0,)),
            Gate(GateKind.RX, (0,), 0.3),
            Gate(GateKind.RY, (0,), -1.2),
            Gate(GateKind.RZ, (0,), 2.5),
            Gate(GateKind.PHASE, (0,), 0.9),
        ]
        for g in gates:
            u = gate_matrix(g)
            np.testing.assert_allclose(u @ u.conj().T, np.eye(2), atol=1e-15)

    def test_lifted_cx_matches_reference(self):
        for n in (2, 3):
            for c in range(n):
                for t in range(n):
                    if c == t:
                        continue
                    got = lifted_gate_matrix(Gate(GateKind.CX, (c, t)), n)
                    np.testing.assert_array_equal(got, cx_matrix(c, t, n))

    def test_lifted_single_matches_kron_reference(self):
        g = Gate(GateKind.RY, (1,), 0.42)
        got = lifted_gate_matrix(g, 3)
        np.testing.assert_allclose(got, lift_single(sv_ry(0.42), 1, 3), atol=1e-15)


class TestFeatureMaps:
    @pytest.mark.parametrize("kind", list(FeatureMapKind), ids=lambda k: k.value)
    def test_circuit_unitary_is_unitary(self, kind, rng):
        x = rng.uniform(0, np.pi, 4)
        circ = build_feature_map(kind, x)
        u = apply_circuit_unitary(circ)
        np.testing.assert_allclose(u @ u.conj().T, np.eye(16), atol=1e-13)

    def test_z_map_structure(self):
        x = np.array([0.1, 0.2])
        circ = build_feature_map(FeatureMapKind.Z, x, reps=1)
        kinds = [g.kind for g in circ.gates]
        assert kinds == [GateKind.H, GateKind.H, GateKind.PHASE, GateKind.PHASE]
        np.testing.assert_allclose(
            [g.angle for g in circ.gates if g.kind is GateKind.PHASE], 2 * x
        )

    def test_zz_map_pair_angles(self):
        x = np.array([0.5, 1.0, 1.5])
        circ = build_feature_map(FeatureMapKind.ZZ, x, reps=1)
        pair_phases = [
            g.angle for g in circ.gates if g.kind is GateKind.PHASE and g.qubits[0] > 0
        ]
        expected = [
            2 * (np.pi - x[i]) * (np.pi - x[i + 1]) for i in range(2)
        ]
        # the single-qubit layer also places phases on qubits 1, 2
        assert len(pair_phases) >= 2
        for want in expected:
            assert any(abs(got - want) < 1e-12 for got in pair_phases)

    def test_reps_multiply_gate_count(self):
        x = np.array([0.3, 0.6])
        one = build_feature_map(FeatureMapKind.ZZ, x, reps=1)
        two = build_feature_map(FeatureMapKind.ZZ, x, reps=2)
        assert len(two) == 2 * len(one)

    def test_reps_out_of_range(self):
        x = np.array([0.3, 0.6])
        with pytest.raises(ValueError):
            build_feature_map(FeatureMapKind.Z, x, reps=0)
        with pytest.raises(ValueError):
            build_feature_map(FeatureMapKind.Z, x, reps=5)

    def test_pauli_default_terms(self):
        assert DEFAULT_PAULIS == ("Z", "ZZ", "XY")

    def test_pauli_rejects_long_terms(self):
        x = np.array([0.3, 0.6, 0.9])
        with pytest.raises(ValueError):
            build_feature_map(FeatureMapKind.PAULI, x, paulis=("ZZZ",))

    def test_pauli_basis_conjugation_cancels(self):
        """X and Y basis changes must undo themselves: the circuit stays
        unitary and reduces to phases in a rotated frame."""
        x = np.array([0.4, 0.8])
        circ = build_feature_map(FeatureMapKind.PAULI, x, reps=1, paulis=("XY",))
        u = apply_circuit_unitary(circ)
        np.testing.assert_allclose(u @ u.conj().T, np.eye(4), atol=1e-13)

    @pytest.mark.parametrize("kind", list(FeatureMapKind), ids=lambda k: k.value)
    def test_statevector_route_agrees(self, kind, rng):
        """Package circuit vs the oracle's own construction of the same
        encoding."""
        from oracles import oracle_feature_state

        for _ in range(3):
            x = rng.uniform(0, np.pi, 3)
            circ = build_feature_map(kind, x)
            u = apply_circuit_unitary(circ)
            psi_pkg = u[:, 0]
            psi_ref = oracle_feature_state(x, kind.value)
            np.testing.assert_allclose(psi_pkg, psi_ref, atol=1e-12)


class TestAnsatz:
    def test_param_count(self):
        assert ansatz_param_count(4, 2) == 12
        assert ansatz_param_count(1, 3) == 4

    def test_wrong_theta_length_rejected(self):
        with pytest.raises(ValueError):
            build_ansatz(3, 2, np.zeros(5))

    def test_ring_skipped_for_single_qubit(self):
        circ = build_ansatz(1, 2, np.arange(3.0))
        assert all(g.kind is GateKind.RY for g in circ.gates)

    def test_cx_ring_count(self):
        theta = np.zeros(ansatz_param_count(4, 2))
        circ = build_ansatz(4, 2, theta)
        n_cx = sum(1 for g in circ.gates if g.kind is GateKind.CX)
        assert n_cx == 8  # ring of 4, repeated per layer

    def test_matches_oracle_evolution(self, rng):
        from oracles import oracle_ansatz_state

        n, layers = 3, 2
        theta = rng.uniform(-np.pi, np.pi, ansatz_param_count(n, layers))
        circ = build_ansatz(n, layers, theta)
        u = apply_circuit_unitary(circ)
        start = np.zeros(2**n, dtype=complex)
        start[0] = 1.0
        np.testing.assert_allclose(
            u @ start, oracle_ansatz_state(theta, n, layers, start), atol=1e-12
        )
