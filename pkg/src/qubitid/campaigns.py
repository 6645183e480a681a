"""Canned, seeded experiment campaigns with pass/fail summaries.

Each campaign reruns one of the toolkit's reference scenarios end to end,
writes plot-ready CSV files into an output directory and checks the results
against the same thresholds the acceptance test suite uses.  Campaign seeds
are fixed so the bundles are bit-reproducible; pass ``seed`` to explore other
noise realizations.

Scenario notes
--------------
* The fast-dephasing scenario (omega = gamma = 50) samples ``t`` in
  [0, 0.06] with 1500 points for rate estimation: beyond roughly three decay
  times the trace is noise at these repetition counts, and keeping such
  samples both biases the log-inversion and breaks the repetition-budget
  scaling.  The spectral view (fig4) instead uses a long window, [0, 1.4],
  which resolves the drive frequency.
* The rate estimates in the fast-dephasing scenario carry a known
  noise-induced downward bias (the masked log amplifies asymmetrically at
  low signal-to-noise); the campaign gates track the across-series spread,
  which is what the repetition-budget claims are about.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .bayes import bayes_surface
from .fourier import analytic_spectrum, fourier_estimate, periodogram
from .models import DriveAxis, ExperimentDesign, SystemParams, coefficients, probability_trace
from .simulate import NoisyTrace, SamplingPlan, multi_trace, simulate_trace, write_trace_csv
from .timeseries import gamma_least_squares

__all__ = ["CampaignResult", "run_campaign", "CAMPAIGNS", "gamma_meta_means"]

# Master seeds, one per campaign, recorded for reproducibility.
SEEDS = {
    "fig3": 20260301,
    "fig4": 20260304,
    "fig5": 20260305,
    "fig6": 20260306,
    "fig8": 20260308,
    "fig9": 20260309,
    "fig10": 20260310,
    "table2": 20260312,
    "appendix-peak": 0,  # deterministic, no randomness
}

# Sparse-sampling scenario shared by fig3/fig8/9/10/table2.
SPARSE_T_END = 25.0
SPARSE_OMEGA = 1.0
SPARSE_GAMMA = 0.1
SPARSE_NE = 100
SPARSE_OMEGA_GRID = (0.5, 1.5, 101)
SPARSE_GAMMA_GRID = (0.001, 0.4, 81)

# Fast-dephasing scenario shared by fig4/fig5/fig6.  Rate estimation samples
# densely up to roughly 1.2 times the n_e=100 noise-crossing time of the
# decay envelope; the spectral view needs a much longer window instead.
FAST_OMEGA = 50.0
FAST_GAMMA = 50.0
FAST_TIMES = np.linspace(0.0, 0.06, 1500)
FAST_PSD_TIMES = np.linspace(0.0, 1.4, 1000)


@dataclass
class Check:
    name: str
    passed: bool
    detail: str


@dataclass
class CampaignResult:
    name: str
    seed: int
    checks: list[Check] = field(default_factory=list)
    files: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, passed: bool, detail: str) -> None:
        self.checks.append(Check(name, bool(passed), detail))

    def summary_lines(self) -> list[str]:
        lines = [f"campaign {self.name} (seed {self.seed})"]
        for c in self.checks:
            lines.append(f"  [{'PASS' if c.passed else 'FAIL'}] {c.name}: {c.detail}")
        lines.append(f"  => {'PASS' if self.passed else 'FAIL'}")
        return lines


def _write_xy_csv(path, header: str, *columns) -> None:
    cols = [np.asarray(c, dtype=float) for c in columns]
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for row in zip(*cols):
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def _finish(result: CampaignResult, out: Path) -> CampaignResult:
    path = out / "summary.txt"
    with open(path, "w") as fh:
        fh.write("\n".join(result.summary_lines()) + "\n")
        fh.write(f"# qubitid {__version__}\n")
    result.files.append(str(path))
    return result


def gamma_meta_means(
    times: np.ndarray,
    n_series: int,
    n_e: int,
    omega: float,
    gamma: float,
    n_trials: int,
    base_seed: int,
    jobs: int = 1,
) -> np.ndarray:
    """Mean-of-series rate estimates across independent meta-trials.

    Used by the repetition-budget campaigns and the acceptance suite: each
    trial simulates ``n_series`` gaussian-noise series of the z-drive
    maximum-visibility design and records the across-series mean of the
    fitted dephasing rate.
    """
    design = ExperimentDesign(math.pi / 2, math.pi / 2, DriveAxis.Z)
    params = SystemParams(omega, gamma)

    def one_trial(k: int) -> float:
        plan = SamplingPlan(times, n_e, "gaussian", seed=base_seed + k)
        traces = multi_trace(design, params, plan, n_series)
        return gamma_least_squares(traces, design, omega).mean

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return np.fromiter(pool.map(one_trial, range(n_trials)), dtype=float, count=n_trials)
    return np.fromiter(map(one_trial, range(n_trials)), dtype=float, count=n_trials)


# ---------------------------------------------------------------------------
# individual campaigns


def _sparse_design(axis: DriveAxis, theta_prep: float, theta_meas: float) -> ExperimentDesign:
    return ExperimentDesign(theta_prep, theta_meas, axis)


def run_fig3(out: Path, seed: int, jobs: int = 1) -> CampaignResult:
    """Sparse noisy trace of the slow-dephasing z drive plus its spectrum."""
    res = CampaignResult("fig3", seed)
    design = _sparse_design(DriveAxis.Z, math.pi / 2, math.pi / 2)
    params = SystemParams(SPARSE_OMEGA, SPARSE_GAMMA)
    times = np.linspace(0.0, SPARSE_T_END, 75)
    dense = np.linspace(0.0, SPARSE_T_END, 2000)

    _write_xy_csv(out / "ideal.csv", "t,p", dense, probability_trace(design, params, dense))
    trace = simulate_trace(design, params, SamplingPlan(times, SPARSE_NE, "bernoulli", seed))
    write_trace_csv(trace, out / "trace.csv")
    spec = periodogram(trace, zero_pad_factor=4)
    _write_xy_csv(out / "spectrum.csv", "omega,magnitude", spec.frequencies, spec.magnitude)
    res.files += [str(out / f) for f in ("ideal.csv", "trace.csv", "spectrum.csv")]

    peak = spec.peak_frequency()
    res.add(
        "spectrum peak within one padded bin of the drive frequency",
        abs(peak - SPARSE_OMEGA) <= spec.resolution,
        f"peak at {peak:.4f}, bin width {spec.resolution:.4f}",
    )
    p0 = float(trace.p_hat[0])
    res.add("first sample starts at certainty", p0 == 1.0, f"p_hat(0) = {p0}")
    return _finish(res, out)


def run_fig4(out: Path, seed: int, jobs: int = 1) -> CampaignResult:
    """Fast-dephasing signal on a long window and its power spectral density."""
    res = CampaignResult("fig4", seed)
    design = _sparse_design(DriveAxis.Z, math.pi / 2, math.pi / 2)
    params = SystemParams(FAST_OMEGA, FAST_GAMMA)
    times = FAST_PSD_TIMES

    noiseless = probability_trace(design, params, times)
    _write_xy_csv(out / "ideal.csv", "t,p", times, noiseless)
    trace = simulate_trace(design, params, SamplingPlan(times, 100, "gaussian", seed))
    write_trace_csv(trace, out / "trace.csv")
    spec_clean = periodogram(NoisyTrace(times, noiseless, math.inf, 0.0), zero_pad_factor=1)
    spec_noisy = periodogram(trace, zero_pad_factor=1)
    _write_xy_csv(out / "psd_ideal.csv", "omega,magnitude", spec_clean.frequencies, spec_clean.magnitude)
    _write_xy_csv(out / "psd_noisy.csv", "omega,magnitude", spec_noisy.frequencies, spec_noisy.magnitude)
    res.files += [str(out / f) for f in ("ideal.csv", "trace.csv", "psd_ideal.csv", "psd_noisy.csv")]

    peak = spec_clean.peak_frequency()
    res.add(
        "noise-free spectral peak within two bins of the drive frequency",
        abs(peak - FAST_OMEGA) <= 2 * spec_clean.resolution,
        f"peak at {peak:.2f}, bin width {spec_clean.resolution:.2f}",
    )
    sigma = trace.sigma
    res.add(
        "gaussian noise level at n_e=100",
        abs(sigma - 0.0874) <= 1e-4,
        f"sigma = {sigma:.6f}",
    )
    return _finish(res, out)


def run_fig5(out: Path, seed: int, jobs: int = 1) -> CampaignResult:
    """Running mean of the rate estimate over 1..40 series plus its meta-trial spread."""
    res = CampaignResult("fig5", seed)
    design = _sparse_design(DriveAxis.Z, math.pi / 2, math.pi / 2)
    params = SystemParams(FAST_OMEGA, FAST_GAMMA)

    plan = SamplingPlan(FAST_TIMES, 100, "gaussian", seed)
    est = gamma_least_squares(
        multi_trace(design, params, plan, 40), design, FAST_OMEGA,
        stop_window=3, stop_tol=1.0,
    )
    _write_xy_csv(
        out / "running_mean.csv", "n_series,gamma_hat,running_mean",
        np.arange(1, 41), est.per_series, est.running_means,
    )
    res.files.append(str(out / "running_mean.csv"))

    res.add(
        "sequential rule stops within 10 series",
        est.stopped_at is not None and est.stopped_at <= 10,
        f"stopped after {est.stopped_at} series (window 3, tolerance 1.0)",
    )
    means5 = gamma_meta_means(FAST_TIMES, 5, 100, FAST_OMEGA, FAST_GAMMA, 300, seed + 1, jobs)
    std5 = float(np.std(means5, ddof=1))
    _write_xy_csv(out / "mean5_distribution.csv", "gamma_mean5", means5)
    res.files.append(str(out / "mean5_distribution.csv"))
    res.add(
        "std of the 5-series mean estimate below 1.0",
        std5 < 1.0,
        f"std = {std5:.3f} over 300 meta-trials (center {np.mean(means5):.1f})",
    )
    return _finish(res, out)


def run_fig6(out: Path, seed: int, jobs: int = 1) -> CampaignResult:
    """Repetition-budget equivalence: 5x100 vs 4x125 vs 2x250 measurements."""
    res = CampaignResult("fig6", seed)
    trials = 2000
    configs = [(5, 100), (4, 125), (2, 250)]
    stds = {}
    for n_series, n_e in configs:
        # Same trial seeds for every configuration: common random numbers
        # couple the estimates and stabilize the std ratios.
        means = gamma_meta_means(
            FAST_TIMES, n_series, n_e, FAST_OMEGA, FAST_GAMMA, trials, seed, jobs
        )
        stds[(n_series, n_e)] = float(np.std(means, ddof=1))
        _write_xy_csv(out / f"means_{n_series}x{n_e}.csv", "gamma_mean", means)
        res.files.append(str(out / f"means_{n_series}x{n_e}.csv"))
    base = stds[(5, 100)]
    for n_series, n_e in configs[1:]:
        ratio = stds[(n_series, n_e)] / base
        res.add(
            f"{n_series} series at n_e={n_e} within 1.5x of 5x100 accuracy",
            ratio <= 1.5,
            f"std ratio = {ratio:.3f} ({stds[(n_series, n_e)]:.3f} vs {base:.3f}, {trials} trials)",
        )
    return _finish(res, out)


def _bayes_campaign(name: str, axis: DriveAxis, n_samples: int, out: Path, seed: int) -> CampaignResult:
    res = CampaignResult(name, seed)
    design = _sparse_design(axis, math.pi / 3, math.pi / 4)
    params = SystemParams(SPARSE_OMEGA, SPARSE_GAMMA)
    times = np.linspace(0.0, SPARSE_T_END, n_samples)

    trace = simulate_trace(design, params, SamplingPlan(times, SPARSE_NE, "bernoulli", seed))
    write_trace_csv(trace, out / "trace.csv")
    dense = np.linspace(0.0, SPARSE_T_END, 2000)
    _write_xy_csv(out / "ideal.csv", "t,p", dense, probability_trace(design, params, dense))

    surf = bayes_surface(
        trace, axis,
        np.linspace(*SPARSE_OMEGA_GRID), np.linspace(*SPARSE_GAMMA_GRID),
        refine=True,
    )
    surf.write_csv(out / "surface.csv")
    res.files += [str(out / f) for f in ("trace.csv", "ideal.csv", "surface.csv")]

    b = surf.best
    res.add(
        "frequency estimate within 0.02 of the truth",
        abs(b.omega - SPARSE_OMEGA) <= 0.02,
        f"omega_hat = {b.omega:.4f}",
    )
    res.add(
        "dephasing estimate within 0.05 of the truth",
        abs(b.gamma - SPARSE_GAMMA) <= 0.05,
        f"gamma_hat = {b.gamma:.4f}",
    )
    w_om, w_ga = surf.peak_extents()
    res.add(
        "likelihood peak narrower along frequency than along dephasing",
        w_om < w_ga,
        f"half-likelihood extents: {w_om:.4f} (omega) vs {w_ga:.4f} (gamma)",
    )
    return _finish(res, out)


def run_fig8(out: Path, seed: int, jobs: int = 1) -> CampaignResult:
    return _bayes_campaign("fig8", DriveAxis.Z, 75, out, seed)


def run_fig9(out: Path, seed: int, jobs: int = 1) -> CampaignResult:
    return _bayes_campaign("fig9", DriveAxis.X, 100, out, seed)


def run_fig10(out: Path, seed: int, jobs: int = 1) -> CampaignResult:
    return _bayes_campaign("fig10", DriveAxis.Y, 100, out, seed)


def run_table2(out: Path, seed: int, jobs: int = 1) -> CampaignResult:
    """Fitted basis coefficients and uncertainties for all three drive axes."""
    res = CampaignResult("table2", seed)
    params = SystemParams(SPARSE_OMEGA, SPARSE_GAMMA)
    rows = []
    for k, (axis, n_samples) in enumerate(
        [(DriveAxis.Z, 75), (DriveAxis.X, 100), (DriveAxis.Y, 100)]
    ):
        design = _sparse_design(axis, math.pi / 3, math.pi / 4)
        a1_act, a2_act = coefficients(design, params)
        times = np.linspace(0.0, SPARSE_T_END, n_samples)
        trace = simulate_trace(design, params, SamplingPlan(times, SPARSE_NE, "bernoulli", seed + k))
        surf = bayes_surface(
            trace, axis,
            np.linspace(*SPARSE_OMEGA_GRID), np.linspace(*SPARSE_GAMMA_GRID),
            refine=True,
        )
        u1, u2 = surf.coeff_uncertainty
        rows.append((axis.value, a1_act, surf.best.alpha1, u1, a2_act, surf.best.alpha2, u2))
        res.add(
            f"{axis.value}-drive coefficients within 3 uncertainties of the exact values",
            abs(surf.best.alpha1 - a1_act) <= 3 * u1 and abs(surf.best.alpha2 - a2_act) <= 3 * u2,
            f"a1 {surf.best.alpha1:.4f} (act {a1_act:.4f}, u {u1:.4f}); "
            f"a2 {surf.best.alpha2:.4f} (act {a2_act:.4f}, u {u2:.4f})",
        )
    path = out / "coefficients.csv"
    with open(path, "w") as fh:
        fh.write("model,alpha1_actual,alpha1_est,u1,alpha2_actual,alpha2_est,u2\n")
        for row in rows:
            fh.write(row[0] + "," + ",".join(f"{v:.17g}" for v in row[1:]) + "\n")
    res.files.append(str(path))
    return _finish(res, out)


def run_appendix_peak(out: Path, seed: int, jobs: int = 1) -> CampaignResult:
    """Closed-form spectral peak readout across dephasing rates (no noise)."""
    res = CampaignResult("appendix-peak", seed)
    grid = np.linspace(0.0, 4.0, 40001)
    annotations = []
    for gamma in (0.05, 0.1, 0.3):
        spec = analytic_spectrum(1.0, gamma, grid)
        est = fourier_estimate(spec)
        _write_xy_csv(out / f"spectrum_gamma{gamma}.csv", "omega,magnitude",
                      spec.frequencies, spec.magnitude)
        res.files.append(str(out / f"spectrum_gamma{gamma}.csv"))
        annotations.append((gamma, est.omega_star, est.peak_height, est.halfwidth,
                            est.gamma_from_width, est.omega0))
        ok = (
            est.gamma_from_width is not None
            and abs(est.gamma_from_width - gamma) <= 0.01 * gamma
            and abs(est.omega0 - 1.0) <= 1e-3
            and abs(est.peak_height - 1.0 / (2 * gamma)) <= 0.005 / (2 * gamma)
        )
        res.add(
            f"width inversion recovers gamma={gamma} within 1%",
            ok,
            f"gamma_hat = {est.gamma_from_width:.6f}, omega0 = {est.omega0:.6f}, "
            f"height = {est.peak_height:.4f}",
        )
    path = out / "peaks.csv"
    with open(path, "w") as fh:
        fh.write("gamma,omega_star,peak_height,halfwidth,gamma_from_width,omega0\n")
        for row in annotations:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")
    res.files.append(str(path))
    return _finish(res, out)


CAMPAIGNS = {
    "fig3": run_fig3,
    "fig4": run_fig4,
    "fig5": run_fig5,
    "fig6": run_fig6,
    "fig8": run_fig8,
    "fig9": run_fig9,
    "fig10": run_fig10,
    "table2": run_table2,
    "appendix-peak": run_appendix_peak,
}


def run_campaign(name: str, out_dir, seed: int | None = None, jobs: int = 1) -> CampaignResult:
    """Run one canned campaign into ``out_dir`` and return its result."""
    if name not in CAMPAIGNS:
        raise ValueError(
            f"unknown campaign {name!r}; valid ids: {', '.join(sorted(CAMPAIGNS))}"
        )
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if seed is None:
        seed = SEEDS[name]
    return CAMPAIGNS[name](out, seed, jobs)
