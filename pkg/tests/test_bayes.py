"""Likelihood estimator: exactness, symmetry, surface behaviour."""

import numpy as np
import pytest

from qubitid.bayes import bayes_loglik, bayes_surface
from qubitid.fourier import fourier_estimate, periodogram
from qubitid.models import (
    DriveAxis,
    ExperimentDesign,
    SystemParams,
    coefficients,
    probability_trace,
)
from qubitid.simulate import NoisyTrace, SamplingPlan, simulate_trace

AX_ALL = [DriveAxis.Z, DriveAxis.X, DriveAxis.Y]


def noiseless(design, params, times):
    return NoisyTrace(times, probability_trace(design, params, times), 100)


class TestBayesLoglik:
    def test_exact_fit_at_truth(self):
        d = ExperimentDesign(np.pi / 3, np.pi / 4, DriveAxis.Z)
        p = SystemParams(1.0, 0.1)
        tr = noiseless(d, p, np.linspace(0, 25, 75))
        pt = bayes_loglik(tr, DriveAxis.Z, 1.0, 0.1)
        a1, a2 = coefficients(d, p)
        assert pt.resid < 1e-20
        assert pt.alpha1 == pytest.approx(a1, abs=1e-8)
        assert pt.alpha2 == pytest.approx(a2, abs=1e-8)

    @pytest.mark.parametrize("axis", AX_ALL)
    def test_coefficient_recovery_all_models(self, axis):
        d = ExperimentDesign(1.1, 0.6, axis)
        p = SystemParams(0.9, 0.25)
        tr = noiseless(d, p, np.linspace(0, 25, 120))
        pt = bayes_loglik(tr, axis, 0.9, 0.25)
        a1, a2 = coefficients(d, p)
        assert pt.alpha1 == pytest.approx(a1, abs=1e-8)
        assert pt.alpha2 == pytest.approx(a2, abs=1e-8)

    def test_wrong_frequency_scores_lower(self):
        d = ExperimentDesign(np.pi / 3, np.pi / 4, DriveAxis.Z)
        p = SystemParams(1.0, 0.1)
        tr = simulate_trace(d, p, SamplingPlan(np.linspace(0, 25, 75), 100, "bernoulli", 5))
        surf = bayes_surface(tr, DriveAxis.Z, np.linspace(0.5, 1.5, 101), np.linspace(0.001, 0.4, 81))
        w_om, _ = surf.peak_extents()
        at_peak = bayes_loglik(tr, DriveAxis.Z, surf.best.omega, surf.best.gamma)
        away = bayes_loglik(tr, DriveAxis.Z, surf.best.omega + 10 * w_om, surf.best.gamma)
        assert away.loglik < at_peak.loglik

    def test_rank_deficient_basis_flagged(self):
        # omega = gamma = 0 makes both z-drive basis functions constant
        tr = noiseless(
            ExperimentDesign(1.0, 1.0, DriveAxis.Z), SystemParams(1.0, 0.1),
            np.linspace(0, 10, 40),
        )
        pt = bayes_loglik(tr, DriveAxis.Z, 0.0, 0.0)
        assert pt.loglik == -np.inf
        assert np.isnan(pt.alpha1) and pt.note is not None

    def test_outcome_relabeling_symmetry(self):
        # swapping +/- outcomes flips the data sign and the coefficients,
        # leaving the likelihood untouched
        d = ExperimentDesign(np.pi / 3, np.pi / 4, DriveAxis.Z)
        p = SystemParams(1.0, 0.1)
        tr = simulate_trace(d, p, SamplingPlan(np.linspace(0, 25, 75), 100, "bernoulli", 6))
        swapped = NoisyTrace(tr.times, 1.0 - tr.p_hat, tr.n_e)
        for om, ga in [(0.9, 0.05), (1.0, 0.1), (1.2, 0.2)]:
            a = bayes_loglik(tr, DriveAxis.Z, om, ga)
            b = bayes_loglik(swapped, DriveAxis.Z, om, ga)
            assert b.loglik == pytest.approx(a.loglik, rel=1e-12)
            assert b.alpha1 == pytest.approx(-a.alpha1, abs=1e-12)
            assert b.alpha2 == pytest.approx(-a.alpha2, abs=1e-12)
        # and the flipped design produces exactly the negated coefficients
        d_flip = ExperimentDesign(d.theta_prep, d.theta_meas + np.pi, d.model)
        a1, a2 = coefficients(d, p)
        b1, b2 = coefficients(d_flip, p)
        assert (b1, b2) == pytest.approx((-a1, -a2))

    def test_known_sigma_mode(self):
        d = ExperimentDesign(np.pi / 3, np.pi / 4, DriveAxis.Z)
        p = SystemParams(1.0, 0.1)
        tr = simulate_trace(d, p, SamplingPlan(np.linspace(0, 25, 75), 100, "gaussian", 7))
        pt = bayes_loglik(tr, DriveAxis.Z, 1.0, 0.1, sigma=2 * tr.sigma)
        assert np.isfinite(pt.loglik)
        # coefficients are sigma-independent, uncertainties scale with sigma
        pt2 = bayes_loglik(tr, DriveAxis.Z, 1.0, 0.1)
        assert pt.alpha1 == pytest.approx(pt2.alpha1)
        assert pt.u1 == pytest.approx(2 * tr.sigma * pt2.u1 / np.sqrt(pt2.resid / len(tr.times)))

    def test_too_few_samples_rejected(self):
        tr = NoisyTrace(np.array([0.0, 1.0]), np.array([1.0, 0.5]), 100)
        with pytest.raises(ValueError):
            bayes_loglik(tr, DriveAxis.Z, 1.0, 0.1)


class TestBayesSurface:
    def test_single_cell_grid(self):
        d = ExperimentDesign(np.pi / 3, np.pi / 4, DriveAxis.Z)
        p = SystemParams(1.0, 0.1)
        tr = noiseless(d, p, np.linspace(0, 25, 75))
        surf = bayes_surface(tr, DriveAxis.Z, [1.0], [0.1])
        assert surf.best.omega == 1.0 and surf.best.gamma == 0.1
        assert surf.loglik.shape == (1, 1)

    def test_grid_argmax_is_best_without_refine(self):
        d = ExperimentDesign(np.pi / 3, np.pi / 4, DriveAxis.Z)
        p = SystemParams(1.0, 0.1)
        tr = simulate_trace(d, p, SamplingPlan(np.linspace(0, 25, 75), 100, "bernoulli", 8))
        surf = bayes_surface(tr, DriveAxis.Z, np.linspace(0.5, 1.5, 51), np.linspace(0.01, 0.3, 31))
        i, j = surf.argmax_indices()
        assert surf.best.omega == surf.omega_grid[i]
        assert surf.best.gamma == surf.gamma_grid[j]

    def test_surface_matches_pointwise_loglik(self):
        # the batched normal-equation path must agree with the per-point path
        rng = np.random.default_rng(9)
        p = SystemParams(1.0, 0.1)
        for axis in AX_ALL:
            d = ExperimentDesign(np.pi / 3, np.pi / 4, axis)
            tr = simulate_trace(d, p, SamplingPlan(np.linspace(0, 25, 60), 100, "bernoulli", 9))
            oms = np.linspace(0.6, 1.4, 7)
            gas = np.linspace(0.02, 0.35, 5)
            surf = bayes_surface(tr, axis, oms, gas)
            for i in rng.choice(7, 3, replace=False):
                for j in rng.choice(5, 2, replace=False):
                    pt = bayes_loglik(tr, axis, oms[i], gas[j])
                    assert surf.loglik[i, j] == pytest.approx(pt.loglik, rel=1e-9)

    def test_refinement_improves_noiseless_recovery(self):
        d = ExperimentDesign(np.pi / 3, np.pi / 4, DriveAxis.Y)
        p = SystemParams(1.0, 0.1)
        tr = noiseless(d, p, np.linspace(0, 25, 100))
        surf = bayes_surface(tr, DriveAxis.Y, np.linspace(0.8, 1.2, 41),
                             np.linspace(0.02, 0.3, 29), refine=True)
        assert surf.best.omega == pytest.approx(1.0, abs=2e-4)
        assert surf.best.gamma == pytest.approx(0.1, abs=2e-3)

    def test_frequency_sharper_than_damping(self):
        d = ExperimentDesign(np.pi / 3, np.pi / 4, DriveAxis.Z)
        p = SystemParams(1.0, 0.1)
        tr = simulate_trace(d, p, SamplingPlan(np.linspace(0, 25, 75), 100, "bernoulli", 10))
        surf = bayes_surface(tr, DriveAxis.Z, np.linspace(0.5, 1.5, 101),
                             np.linspace(0.001, 0.4, 81), refine=True)
        w_om, w_ga = surf.peak_extents()
        assert w_om < w_ga
        s_om, s_ga = surf.param_uncertainty
        assert s_om < s_ga

    def test_agreement_with_fourier_peak(self):
        d = ExperimentDesign(np.pi / 2, np.pi / 2, DriveAxis.Z)
        p = SystemParams(1.0, 0.1)
        ts = np.linspace(0, 200, 2001)
        tr = noiseless(d, p, ts)
        spec = periodogram(tr)
        est = fourier_estimate(spec)
        surf = bayes_surface(tr, DriveAxis.Z, np.linspace(0.9, 1.1, 81),
                             np.linspace(0.05, 0.2, 31), refine=True)
        assert abs(surf.best.omega - est.omega_star) < spec.resolution

    def test_csv_output(self, tmp_path):
        d = ExperimentDesign(np.pi / 3, np.pi / 4, DriveAxis.Z)
        tr = noiseless(d, SystemParams(1.0, 0.1), np.linspace(0, 25, 75))
        surf = bayes_surface(tr, DriveAxis.Z, [0.9, 1.0], [0.05, 0.1, 0.15])
        path = tmp_path / "surface.csv"
        surf.write_csv(path)
        lines = path.read_text().splitlines()
        assert lines[0] == "omega,gamma,loglik"
        assert len(lines) == 1 + 2 * 3

    def test_empty_grid_rejected(self):
        tr = noiseless(ExperimentDesign(1, 1, DriveAxis.Z), SystemParams(1, 0.1),
                       np.linspace(0, 10, 20))
        with pytest.raises(ValueError):
            bayes_surface(tr, DriveAxis.Z, [], [0.1])


class TestMonotoneInformation:
    def test_more_repetitions_no_worse(self):
        # doubling the repetition count must not increase the spread of
        # either estimate (10% slack, >= 200 seeds)
        d = ExperimentDesign(np.pi / 3, np.pi / 4, DriveAxis.Z)
        p = SystemParams(1.0, 0.1)
        ts = np.linspace(0, 25, 75)
        oms = {100: [], 200: []}
        gas = {100: [], 200: []}
        grid_om = np.linspace(0.5, 1.5, 61)
        grid_ga = np.linspace(0.001, 0.4, 41)
        for n_e in (100, 200):
            for seed in range(200):
                tr = simulate_trace(d, p, SamplingPlan(ts, n_e, "bernoulli", seed=7000 + seed))
                surf = bayes_surface(tr, DriveAxis.Z, grid_om, grid_ga, refine=True)
                oms[n_e].append(surf.best.omega)
                gas[n_e].append(surf.best.gamma)
        assert np.std(oms[200]) <= 1.1 * np.std(oms[100])
        assert np.std(gas[200]) <= 1.1 * np.std(gas[100])
