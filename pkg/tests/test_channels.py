"""Kraus channel construction, completeness, and closed-form agreement."""

import numpy as np
import pytest

from conftest import random_density
from noisyq.channels import (
    COMPLETENESS_TOL,
    NoiseConfig,
    NoiseKind,
    apply_channel,
    build_channel,
    closed_form_evolve,
    level_params,
)
from noisyq.dmcore import DensityMatrix, pure_state_density

ALL_KINDS = list(NoiseKind)
LEVELS = (0.0, 0.01, 0.1, 0.2, 0.3, 1.0)


def _plus_state() -> DensityMatrix:
    return pure_state_density(np.array([1, 1]) / np.sqrt(2))


class TestOperatorSets:
    def test_dephasing_operator_shapes_and_values(self):
        ch = build_channel(NoiseKind.DEPHASING, p=0.1)
        assert len(ch.operators) == 2
        np.testing.assert_allclose(ch.operators[0], np.sqrt(0.9) * np.eye(2), atol=1e-15)
        np.testing.assert_allclose(
            ch.operators[1], np.sqrt(0.1) * np.diag([1, -1]), atol=1e-15
        )

    def test_phase_flip_matches_dephasing_action(self, rng):
        rho = random_density(rng, 1)
        a = apply_channel(DensityMatrix(rho.copy()), build_channel(NoiseKind.DEPHASING, p=0.23), 0)
        b = apply_channel(DensityMatrix(rho.copy()), build_channel(NoiseKind.PHASE_FLIP, p=0.23), 0)
        np.testing.assert_allclose(a.mat, b.mat, atol=1e-15)

    def test_depolarizing_has_four_operators(self):
        ch = build_channel(NoiseKind.DEPOLARIZING, p=0.2)
        assert len(ch.operators) == 4
        weights = [np.trace(k.conj().T @ k).real for k in ch.operators]
        np.testing.assert_allclose(weights, [2 * (1 - 0.15), 0.1, 0.1, 0.1], atol=1e-14)

    def test_amplitude_damping_operators(self):
        gamma = 0.3
        ch = build_channel(NoiseKind.AMPLITUDE_DAMPING, gamma=gamma)
        np.testing.assert_allclose(
            ch.operators[0], np.diag([1, np.sqrt(1 - gamma)]), atol=1e-15
        )
        expected = np.zeros((2, 2))
        expected[0, 1] = np.sqrt(gamma)
        np.testing.assert_allclose(ch.operators[1], expected, atol=1e-15)

    def test_missing_and_extra_params_rejected(self):
        with pytest.raises(ValueError):
            build_channel(NoiseKind.DEPHASING)
        with pytest.raises(ValueError):
            build_channel(NoiseKind.DEPHASING, p=0.1, gamma=0.2)
        with pytest.raises(ValueError):
            build_channel(NoiseKind.AMPLITUDE_DAMPING, p=0.1)

    def test_out_of_range_params_rejected(self):
        with pytest.raises(ValueError):
            build_channel(NoiseKind.BIT_FLIP, p=1.5)
        with pytest.raises(ValueError):
            build_channel(NoiseKind.THERMAL_RELAXATION, p0=0.7, p1=0.4)


class TestCompleteness:
    @pytest.mark.parametrize(
        "kind",
        [k for k in ALL_KINDS if k is not NoiseKind.THERMAL_RELAXATION],
        ids=lambda k: k.value,
    )
    def test_trace_preserving_kinds(self, kind):
        for level in LEVELS:
            ch = build_channel(kind, **level_params(kind, level))
            dev = np.abs(ch.completeness_sum() - np.eye(2)).max()
            assert dev <= COMPLETENESS_TOL
            assert ch.trace_preserving

    def test_thermal_default_sum_is_diagonal_deficit(self):
        p0, p1 = 0.2, 0.1
        ch = build_channel(NoiseKind.THERMAL_RELAXATION, p0=p0, p1=p1)
        np.testing.assert_allclose(
            ch.completeness_sum(), np.diag([1 - p1, 1 - p0]), atol=1e-15
        )
        assert not ch.trace_preserving

    def test_thermal_corrected_sums_to_identity(self):
        for p0, p1 in [(0.2, 0.1), (0.05, 0.3), (0.0, 0.0), (0.5, 0.5)]:
            ch = build_channel(
                NoiseKind.THERMAL_RELAXATION, corrected=True, p0=p0, p1=p1
            )
            dev = np.abs(ch.completeness_sum() - np.eye(2)).max()
            assert dev <= COMPLETENESS_TOL
            assert ch.trace_preserving

    def test_corrected_flag_only_for_thermal(self):
        with pytest.raises(ValueError):
            build_channel(NoiseKind.BIT_FLIP, corrected=True, p=0.1)


class TestKnownEvolutions:
    def test_dephasing_shrinks_off_diagonals(self):
        out = apply_channel(_plus_state(), build_channel(NoiseKind.DEPHASING, p=0.1), 0)
        np.testing.assert_allclose(
            out.mat, np.array([[0.5, 0.4], [0.4, 0.5]]), atol=1e-15
        )

    def test_amplitude_damping_moves_excited_population(self):
        rho = DensityMatrix(np.diag([0, 1]).astype(complex))
        out = apply_channel(rho, build_channel(NoiseKind.AMPLITUDE_DAMPING, gamma=0.3), 0)
        np.testing.assert_allclose(out.mat, np.diag([0.3, 0.7]), atol=1e-15)

    def test_full_depolarizing_gives_maximally_mixed(self, rng):
        rho = DensityMatrix(random_density(rng, 1))
        out = apply_channel(rho, build_channel(NoiseKind.DEPOLARIZING, p=1.0), 0)
        np.testing.assert_allclose(out.mat, np.eye(2) / 2, atol=1e-14)

    def test_bit_flip_swaps_populations_at_full_strength(self):
        rho = DensityMatrix(np.diag([0.8, 0.2]).astype(complex))
        out = apply_channel(rho, build_channel(NoiseKind.BIT_FLIP, p=1.0), 0)
        np.testing.assert_allclose(out.mat, np.diag([0.2, 0.8]), atol=1e-15)

    def test_thermal_default_loses_trace(self):
        rho = DensityMatrix(np.diag([0.5, 0.5]).astype(complex))
        ch = build_channel(NoiseKind.THERMAL_RELAXATION, p0=0.2, p1=0.1)
        out = apply_channel(rho, ch, 0)
        # trace deficit follows directly from the non-identity operator sum
        np.testing.assert_allclose(out.trace().real, 0.85, atol=1e-14)

    def test_thermal_corrected_preserves_trace(self, rng):
        rho = DensityMatrix(random_density(rng, 1))
        ch = build_channel(NoiseKind.THERMAL_RELAXATION, corrected=True, p0=0.2, p1=0.1)
        out = apply_channel(rho, ch, 0)
        np.testing.assert_allclose(out.trace().real, 1.0, atol=1e-13)

    def test_target_qubit_selects_subsystem(self, rng):
        rho1 = random_density(rng, 1)
        ident = np.eye(2, dtype=complex) / 2
        joint = DensityMatrix(np.kron(rho1, ident))
        ch = build_channel(NoiseKind.AMPLITUDE_DAMPING, gamma=0.4)
        out = apply_channel(joint, ch, 0)
        single = apply_channel(DensityMatrix(rho1.copy()), ch, 0)
        np.testing.assert_allclose(out.mat, np.kron(single.mat, ident), atol=1e-14)


class TestClosedFormAgreement:
    """Kraus application and the literal closed forms are separate routes;
    they must agree wherever both are defined."""

    @pytest.mark.parametrize(
        "kind",
        [k for k in ALL_KINDS if k is not NoiseKind.THERMAL_RELAXATION],
        ids=lambda k: k.value,
    )
    def test_dual_route_non_thermal(self, kind, rng):
        for level in LEVELS:
            params = level_params(kind, level)
            ch = build_channel(kind, **params)
            for _ in range(10):
                rho = random_density(rng, 1)
                via_kraus = apply_channel(DensityMatrix(rho.copy()), ch, 0)
                via_form = closed_form_evolve(kind, DensityMatrix(rho.copy()), **params)
                np.testing.assert_allclose(via_kraus.mat, via_form.mat, atol=1e-12)

    def test_thermal_routes_agree_for_symmetric_rates(self, rng):
        for level in LEVELS:
            params = level_params(NoiseKind.THERMAL_RELAXATION, level)
            assert params["p0"] == params["p1"]
            ch = build_channel(NoiseKind.THERMAL_RELAXATION, **params)
            for _ in range(10):
                rho = random_density(rng, 1)
                via_kraus = apply_channel(DensityMatrix(rho.copy()), ch, 0)
                via_form = closed_form_evolve(
                    NoiseKind.THERMAL_RELAXATION, DensityMatrix(rho.copy()), **params
                )
                np.testing.assert_allclose(via_kraus.mat, via_form.mat, atol=1e-12)

    def test_thermal_routes_diverge_for_asymmetric_rates(self):
        """The operator pairing and the closed-form pairing differ by
        design; unequal rates expose it."""
        rho = DensityMatrix(np.diag([1.0, 0.0]).astype(complex))
        params = {"p0": 0.3, "p1": 0.0}
        ch = build_channel(NoiseKind.THERMAL_RELAXATION, **params)
        via_kraus = apply_channel(DensityMatrix(rho.mat.copy()), ch, 0)
        via_form = closed_form_evolve(NoiseKind.THERMAL_RELAXATION, rho, **params)
        assert np.abs(via_kraus.mat - via_form.mat).max() > 0.1


class TestLevelMapping:
    def test_probability_kinds_pass_level_through(self):
        for kind in (NoiseKind.DEPHASING, NoiseKind.BIT_FLIP,
                     NoiseKind.PHASE_FLIP, NoiseKind.DEPOLARIZING):
            assert level_params(kind, 0.2) == {"p": 0.2}
        assert level_params(NoiseKind.AMPLITUDE_DAMPING, 0.2) == {"gamma": 0.2}

    def test_thermal_level_splits_evenly(self):
        params = level_params(NoiseKind.THERMAL_RELAXATION, 0.3)
        np.testing.assert_allclose([params["p0"], params["p1"]], [0.15, 0.15])

    def test_noise_config_round_trip(self):
        cfg = NoiseConfig(NoiseKind.DEPOLARIZING, 0.25)
        doc = cfg.to_doc()
        back = NoiseConfig.from_doc(doc)
        assert back.kind is cfg.kind
        assert back.level == cfg.level

    def test_noise_config_level_range(self):
        with pytest.raises(ValueError):
            NoiseConfig(NoiseKind.DEPHASING, 1.2)
