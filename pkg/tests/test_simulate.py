"""Noise models, seeding contracts, and trace serialization."""

import math

import numpy as np
import pytest

from qubitid.models import DriveAxis, ExperimentDesign, SystemParams
from qubitid.simulate import (
    NOISELESS,
    NoisyTrace,
    SamplingPlan,
    gaussian_sigma,
    load_trace_csv,
    multi_trace,
    simulate_trace,
    write_trace_csv,
)

DESIGN = ExperimentDesign(np.pi / 2, np.pi / 2, DriveAxis.Z)
PARAMS = SystemParams(1.0, 0.1)
HALF_DESIGN = ExperimentDesign(np.pi / 2, 0.0, DriveAxis.Z)  # p = 1/2 for all t


class TestGaussianSigma:
    def test_reference_value_at_100(self):
        assert gaussian_sigma(100) == pytest.approx(0.0874, abs=1e-4)

    def test_formula_values(self):
        # sqrt(ln ln n / (2 n)), frozen from 40-digit evaluation
        assert gaussian_sigma(125) == pytest.approx(0.07935987106832320, abs=1e-14)
        assert gaussian_sigma(250) == pytest.approx(0.05845754843142151, abs=1e-14)

    def test_small_counts_rejected(self):
        for n in (0, 1, 2):
            with pytest.raises(ValueError):
                gaussian_sigma(n)

    def test_noiseless_sentinel(self):
        assert gaussian_sigma(NOISELESS) == 0.0


class TestSamplingPlan:
    def test_times_must_increase(self):
        with pytest.raises(ValueError):
            SamplingPlan(np.array([0.0, 1.0, 1.0]), 100)

    def test_bad_noise_model(self):
        with pytest.raises(ValueError):
            SamplingPlan(np.array([0.0, 1.0]), 100, "poisson")

    def test_bernoulli_rejects_infinite_repetitions(self):
        with pytest.raises(ValueError):
            SamplingPlan(np.array([0.0, 1.0]), NOISELESS, "bernoulli")

    def test_fractional_repetitions_rejected(self):
        with pytest.raises(ValueError):
            SamplingPlan(np.array([0.0, 1.0]), 3.5)


class TestSimulateTrace:
    def test_reproducible(self):
        plan = SamplingPlan(np.linspace(0, 10, 40), 100, "bernoulli", seed=123)
        a = simulate_trace(DESIGN, PARAMS, plan)
        b = simulate_trace(DESIGN, PARAMS, plan)
        assert np.array_equal(a.p_hat, b.p_hat)

    def test_bernoulli_certain_outcome(self):
        plan = SamplingPlan(np.array([0.0]), 50, "bernoulli", seed=0)
        for seed in range(20):
            plan = SamplingPlan(np.array([0.0]), 50, "bernoulli", seed=seed)
            assert simulate_trace(DESIGN, PARAMS, plan).p_hat[0] == 1.0

    def test_bernoulli_values_on_grid(self):
        plan = SamplingPlan(np.linspace(0, 10, 25), 40, "bernoulli", seed=7)
        tr = simulate_trace(DESIGN, PARAMS, plan)
        assert np.all((tr.p_hat * 40) % 1 == 0)

    def test_bernoulli_moments_at_half(self):
        vals = np.empty(10_000)
        ts = np.array([1.0])
        for seed in range(vals.size):
            plan = SamplingPlan(ts, 100, "bernoulli", seed=seed)
            vals[seed] = simulate_trace(HALF_DESIGN, PARAMS, plan).p_hat[0]
        assert abs(vals.mean() - 0.5) < 0.01
        assert abs(vals.std(ddof=1) - 0.05) < 0.15 * 0.05

    def test_gaussian_moments(self):
        vals = np.empty(10_000)
        ts = np.array([1.0])
        for seed in range(vals.size):
            plan = SamplingPlan(ts, 100, "gaussian", seed=seed)
            vals[seed] = simulate_trace(HALF_DESIGN, PARAMS, plan).p_hat[0]
        assert abs(vals.std(ddof=1) - 0.0874) < 0.05 * 0.0874

    def test_gaussian_not_clipped(self):
        # near p = 1 the gaussian model may legitimately exceed 1
        ts = np.array([0.0])
        high = [
            simulate_trace(DESIGN, PARAMS, SamplingPlan(ts, 100, "gaussian", seed=s)).p_hat[0]
            for s in range(200)
        ]
        assert max(high) > 1.0

    def test_noiseless_sentinel(self):
        plan = SamplingPlan(np.linspace(0, 10, 30), NOISELESS, "gaussian", seed=3)
        tr = simulate_trace(DESIGN, PARAMS, plan)
        from qubitid.models import probability_trace

        assert np.array_equal(tr.p_hat, probability_trace(DESIGN, PARAMS, plan.times))
        assert tr.sigma == 0.0


class TestMultiTrace:
    def test_single_series_matches_simulate_trace(self):
        plan = SamplingPlan(np.linspace(0, 5, 20), 100, "bernoulli", seed=99)
        assert np.array_equal(
            multi_trace(DESIGN, PARAMS, plan, 1)[0].p_hat,
            simulate_trace(DESIGN, PARAMS, plan).p_hat,
        )

    def test_series_are_distinct(self):
        plan = SamplingPlan(np.linspace(0, 5, 30), 100, "bernoulli", seed=5)
        traces = multi_trace(DESIGN, PARAMS, plan, 5)
        for i in range(5):
            for j in range(i + 1, 5):
                assert not np.array_equal(traces[i].p_hat, traces[j].p_hat)

    def test_prefix_stability(self):
        # the first k series do not depend on how many more are generated
        plan = SamplingPlan(np.linspace(0, 5, 10), 100, "gaussian", seed=11)
        short = multi_trace(DESIGN, PARAMS, plan, 2)
        long = multi_trace(DESIGN, PARAMS, plan, 6)
        for a, b in zip(short, long):
            assert np.array_equal(a.p_hat, b.p_hat)

    def test_bernoulli_unbiased(self):
        # E[p_hat] = p checked to three standard errors of the MC mean
        ts = np.array([0.8, 2.0])
        p_true = None
        acc = []
        for seed in range(4000):
            tr = simulate_trace(DESIGN, PARAMS, SamplingPlan(ts, 50, "bernoulli", seed=seed))
            acc.append(tr.p_hat)
        from qubitid.models import probability_trace

        p_true = probability_trace(DESIGN, PARAMS, ts)
        acc = np.asarray(acc)
        se = np.sqrt(p_true * (1 - p_true) / 50 / acc.shape[0])
        assert np.all(np.abs(acc.mean(axis=0) - p_true) < 3 * se + 1e-12)


class TestTraceCsv:
    def test_round_trip_lossless(self, tmp_path):
        plan = SamplingPlan(np.linspace(0, 17, 60), 100, "gaussian", seed=21)
        tr = simulate_trace(DESIGN, PARAMS, plan)
        path = tmp_path / "trace.csv"
        write_trace_csv(tr, path)
        back = load_trace_csv(path)
        assert np.array_equal(back.times, tr.times)
        assert np.array_equal(back.p_hat, tr.p_hat)
        assert back.n_e == tr.n_e

    def test_header_format(self, tmp_path):
        tr = NoisyTrace(np.array([0.0, 1.0]), np.array([1.0, 0.25]), 4)
        path = tmp_path / "t.csv"
        write_trace_csv(tr, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "t,p_hat,Ne"
        assert lines[1] == "0,1,4"

    def test_mixed_ne_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("t,p_hat,Ne\n0,0.5,100\n1,0.5,200\n")
        with pytest.raises(ValueError):
            load_trace_csv(path)
