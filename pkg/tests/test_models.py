"""Closed-form dynamics: frozen values, invariants, branch handling."""

import math

import numpy as np
import pytest

from qubitid.models import (
    Branch,
    DriveAxis,
    ExperimentDesign,
    SystemParams,
    basis_functions,
    coefficients,
    effective_frequency,
    initial_bloch,
    probability_trace,
    propagate,
)

AXES = [DriveAxis.Z, DriveAxis.X, DriveAxis.Y]


def random_design(rng, axis=None):
    axis = axis or AXES[rng.integers(3)]
    return ExperimentDesign(rng.uniform(0, 2 * np.pi), rng.uniform(0, 2 * np.pi), axis)


def random_params(rng, branch=None):
    gamma = 10.0 ** rng.uniform(-2, 0.7)
    if branch == "critical":
        return SystemParams(gamma / 2, gamma)
    if branch == "hyperbolic":
        return SystemParams(gamma / 2 * rng.uniform(0.05, 0.95), gamma)
    if branch == "oscillatory":
        return SystemParams(gamma / 2 * rng.uniform(1.05, 10.0), gamma)
    return SystemParams(10.0 ** rng.uniform(-2, 0.7), gamma)


class TestEffectiveFrequency:
    def test_oscillatory(self):
        eff = effective_frequency(SystemParams(1.0, 0.1))
        assert eff.branch is Branch.OSCILLATORY
        assert eff.magnitude == pytest.approx(0.9987492177719089, abs=1e-12)

    def test_critical_for_any_gamma(self):
        for gamma in (0.01, 1.0, 17.3):
            eff = effective_frequency(SystemParams(gamma / 2, gamma))
            assert eff.branch is Branch.CRITICAL
            assert eff.magnitude == 0.0

    def test_hyperbolic(self):
        eff = effective_frequency(SystemParams(0.1, 1.0))
        assert eff.branch is Branch.HYPERBOLIC
        assert eff.magnitude == pytest.approx(math.sqrt(0.24), abs=1e-12)

    def test_guard_band_routes_to_critical(self):
        eff = effective_frequency(SystemParams(0.5 * (1 + 1e-14), 1.0))
        assert eff.branch is Branch.CRITICAL


class TestPropagate:
    def test_z_drive_initial_state(self):
        d = ExperimentDesign(np.pi / 2, np.pi / 2, DriveAxis.Z)
        v = propagate(d, SystemParams(1.0, 0.1), 0.0)
        assert np.allclose(v, [1.0, 0.0, 0.0], atol=1e-15)

    def test_z_drive_pole_is_stationary(self):
        d = ExperimentDesign(0.0, 0.3, DriveAxis.Z)
        for t in (0.0, 1.7, 12.0):
            v = propagate(d, SystemParams(2.0, 0.5), t)
            assert np.allclose(v, [0.0, 0.0, 1.0], atol=1e-15)

    def test_z_drive_half_turn(self):
        # exp(-0.1 pi) * cos(pi) on x; evaluated independently to 16 digits
        d = ExperimentDesign(np.pi / 2, np.pi / 2, DriveAxis.Z)
        v = propagate(d, SystemParams(1.0, 0.1), np.pi)
        assert v[0] == pytest.approx(-0.7304026910486456, abs=1e-12)
        assert abs(v[1]) < 1e-12 and abs(v[2]) < 1e-15

    def test_x_drive_equator_decay(self):
        d = ExperimentDesign(np.pi / 2, 0.0, DriveAxis.X)
        v = propagate(d, SystemParams(1.0, 0.1), 3.0)
        assert v[0] == pytest.approx(0.7408182206817179, abs=1e-12)
        assert abs(v[1]) < 1e-15 and abs(v[2]) < 1e-15

    def test_x_drive_equator_stays_on_x(self):
        d = ExperimentDesign(np.pi / 2, 0.0, DriveAxis.X)
        ts = np.linspace(0, 20, 50)
        v = propagate(d, SystemParams(0.7, 0.4), ts)
        assert np.allclose(v[:, 0], np.exp(-0.4 * ts), atol=1e-14)
        assert np.max(np.abs(v[:, 1:])) < 1e-15

    def test_y_drive_y_component_zero(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            d = random_design(rng, DriveAxis.Y)
            v = propagate(d, random_params(rng), np.linspace(0, 25, 40))
            assert np.max(np.abs(v[:, 1])) == 0.0

    def test_z_component_conserved_for_z_drive(self):
        rng = np.random.default_rng(6)
        for _ in range(20):
            d = random_design(rng, DriveAxis.Z)
            v = propagate(d, random_params(rng), np.linspace(0, 25, 40))
            assert np.allclose(v[:, 2], math.cos(d.theta_prep), atol=1e-15)

    def test_unitary_limit_preserves_norm(self):
        rng = np.random.default_rng(7)
        ts = np.linspace(0, 30, 100)
        for axis in AXES:
            d = ExperimentDesign(rng.uniform(0, 2 * np.pi), 0.0, axis)
            v = propagate(d, SystemParams(rng.uniform(0.1, 3), 0.0), ts)
            norms = np.linalg.norm(v, axis=-1)
            assert np.max(np.abs(norms - 1.0)) < 1e-12

    def test_bloch_ball_never_left(self):
        rng = np.random.default_rng(8)
        ts = np.linspace(0, 50, 200)
        for _ in range(50):
            v = propagate(random_design(rng), random_params(rng), ts)
            assert np.max(np.linalg.norm(v, axis=-1)) <= 1.0 + 1e-12

    def test_continuity_across_critical_point(self):
        ts = np.linspace(0, 25, 200)
        for axis in (DriveAxis.X, DriveAxis.Y):
            d = ExperimentDesign(0.9, 0.3, axis)
            center = propagate(d, SystemParams(0.5, 1.0), ts)
            for eps in (1e-6, -1e-6):
                near = propagate(d, SystemParams(0.5 + eps, 1.0), ts)
                assert np.max(np.abs(near - center)) < 1e-4

    def test_negative_time_rejected(self):
        d = ExperimentDesign(1.0, 1.0, DriveAxis.Z)
        with pytest.raises(ValueError):
            propagate(d, SystemParams(1.0, 0.1), -0.5)


class TestProbabilityTrace:
    def test_aligned_max_visibility_starts_at_one(self):
        d = ExperimentDesign(np.pi / 2, np.pi / 2, DriveAxis.Z)
        assert probability_trace(d, SystemParams(1.0, 0.1), 0.0) == pytest.approx(1.0)

    def test_stationary_design_is_flat_half(self):
        d = ExperimentDesign(0.0, np.pi / 2, DriveAxis.Z)
        p = probability_trace(d, SystemParams(1.3, 0.2), np.linspace(0, 20, 50))
        assert np.allclose(p, 0.5, atol=1e-15)

    def test_y_drive_value_at_zero(self):
        d = ExperimentDesign(np.pi / 3, np.pi / 4, DriveAxis.Y)
        p0 = probability_trace(d, SystemParams(1.0, 0.1), 0.0)
        assert p0 == pytest.approx(0.9829629131445341, abs=1e-12)

    def test_outcomes_sum_to_one_and_bounded(self):
        rng = np.random.default_rng(9)
        ts = np.linspace(0, 50, 123)
        for _ in range(30):
            d = random_design(rng)
            params = random_params(rng)
            p = probability_trace(d, params, ts)
            assert np.all(p >= -1e-15) and np.all(p <= 1 + 1e-15)
            # the opposite outcome is the measurement axis flipped by pi
            d_flip = ExperimentDesign(d.theta_prep, d.theta_meas + np.pi, d.model)
            p_minus = probability_trace(d_flip, params, ts)
            assert np.allclose(p + p_minus, 1.0, atol=1e-14)


class TestBasisAndCoefficients:
    def test_z_basis_at_zero(self):
        g1, g2 = basis_functions(DriveAxis.Z, SystemParams(2.0, 0.7), 0.0)
        assert g1 == pytest.approx(1.0) and g2 == pytest.approx(1.0)

    def test_y_basis_at_zero(self):
        g1, g2 = basis_functions(DriveAxis.Y, SystemParams(1.0, 0.1), 0.0)
        assert g1 == pytest.approx(1.0) and g2 == pytest.approx(0.0, abs=1e-15)

    def test_x_basis_frozen_value(self):
        # evaluated with 40-digit arithmetic: g1 = exp(-0.2),
        # g2 = exp(-0.1) * [cos(2 what) + 0.05/what * sin(2 what)]
        g1, g2 = basis_functions(DriveAxis.X, SystemParams(1.0, 0.1), 2.0)
        assert g1 == pytest.approx(0.8187307530779819, abs=1e-14)
        assert g2 == pytest.approx(-0.3332489860805094, abs=1e-14)

    def test_table_coefficients(self):
        p = SystemParams(1.0, 0.1)
        a1, a2 = coefficients(ExperimentDesign(np.pi / 3, np.pi / 4, DriveAxis.Z), p)
        assert a1 == pytest.approx(0.3536, abs=5e-5)
        assert a2 == pytest.approx(0.6124, abs=5e-5)
        b1, b2 = coefficients(ExperimentDesign(np.pi / 3, np.pi / 4, DriveAxis.X), p)
        assert b1 == pytest.approx(0.6124, abs=5e-5)
        assert b2 == pytest.approx(0.3536, abs=5e-5)

    def test_y_equal_angles_gives_unit_cosine_coefficient(self):
        a1, _ = coefficients(ExperimentDesign(1.234, 1.234, DriveAxis.Y), SystemParams(1.0, 0.1))
        assert a1 == pytest.approx(1.0)

    def test_y_sine_coefficient_direct_evaluation(self):
        # gamma/(2 what) cos(ti+tm) + omega/what sin(ti-tm) at the Table-2 angles
        _, a2 = coefficients(ExperimentDesign(np.pi / 3, np.pi / 4, DriveAxis.Y), SystemParams(1.0, 0.1))
        assert a2 == pytest.approx(0.2461860179434429, abs=1e-12)

    @pytest.mark.parametrize("branch", ["oscillatory", "critical", "hyperbolic", None])
    def test_reconstruction_identity(self, branch):
        rng = np.random.default_rng(hash(branch) % 2**32)
        for _ in range(250):
            d = random_design(rng)
            p = random_params(rng, branch)
            ts = rng.uniform(0, 50, size=6)
            p_bar = 2 * probability_trace(d, p, ts) - 1
            a1, a2 = coefficients(d, p)
            g1, g2 = basis_functions(d.model, p, ts)
            assert np.max(np.abs(p_bar - (a1 * g1 + a2 * g2))) < 1e-12

    def test_initial_bloch_on_sphere(self):
        rng = np.random.default_rng(11)
        for theta in rng.uniform(0, 2 * np.pi, 20):
            assert np.linalg.norm(initial_bloch(theta)) == pytest.approx(1.0)


class TestValidation:
    def test_negative_parameters_rejected(self):
        with pytest.raises(ValueError):
            SystemParams(-1.0, 0.1)
        with pytest.raises(ValueError):
            SystemParams(1.0, -0.1)

    def test_angles_reduced(self):
        d = ExperimentDesign(2 * np.pi + 0.25, -0.25, DriveAxis.Z)
        assert d.theta_prep == pytest.approx(0.25)
        assert d.theta_meas == pytest.approx(2 * np.pi - 0.25)

    def test_axis_from_string(self):
        assert DriveAxis.from_string(" Z ") is DriveAxis.Z
        with pytest.raises(ValueError):
            DriveAxis.from_string("q")
