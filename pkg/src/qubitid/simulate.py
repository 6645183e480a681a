"""Simulated finite-repetition measurement experiments on a time grid.

A sampling plan fixes the sample times, the number of repetitions ``n_e`` per
time, the noise model and a master seed.  Two noise models are provided:

* ``"bernoulli"`` draws ``n_e`` uniform numbers per time and reports the
  fraction below the true outcome probability.  This reproduces projection
  noise faithfully, including its discreteness at small ``n_e``.
* ``"gaussian"`` adds zero-mean Gaussian noise with the large-``n_e``
  standard deviation ``sqrt(ln ln n_e / (2 n_e))``.  Gaussian estimates are
  deliberately not clipped to [0, 1]: clipping would bias downstream fits.

Randomness is stream-based: series ``s`` draws from the substream derived
from ``(master seed, s)``, so traces are bit-reproducible and series are
mutually independent and may be generated concurrently or in any order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .models import ExperimentDesign, SystemParams, probability_trace

__all__ = [
    "SamplingPlan",
    "NoisyTrace",
    "gaussian_sigma",
    "simulate_trace",
    "multi_trace",
    "write_trace_csv",
    "load_trace_csv",
]

NOISE_MODELS = ("gaussian", "bernoulli")

#: Sentinel repetition count that disables noise (gaussian model only).
NOISELESS = math.inf


@dataclass(frozen=True)
class SamplingPlan:
    """Sample times, repetitions per time, noise model and master seed."""

    times: np.ndarray
    n_e: float  # positive integer, or math.inf to disable noise (gaussian only)
    noise_model: str = "bernoulli"
    seed: int = 0

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        if times.ndim != 1 or times.size == 0:
            raise ValueError("times must be a non-empty 1-d array")
        if np.any(times < 0) or not np.all(np.isfinite(times)):
            raise ValueError("times must be finite and >= 0")
        if np.any(np.diff(times) <= 0):
            raise ValueError("times must be strictly increasing")
        object.__setattr__(self, "times", times)
        if self.noise_model not in NOISE_MODELS:
            raise ValueError(
                f"unknown noise model {self.noise_model!r}; expected one of {NOISE_MODELS}"
            )
        if self.n_e == NOISELESS:
            if self.noise_model != "gaussian":
                raise ValueError("n_e=inf (noise disabled) is only defined for the gaussian model")
        elif not (float(self.n_e).is_integer() and self.n_e >= 1):
            raise ValueError(f"n_e must be a positive integer (or inf), got {self.n_e}")
        if not (0 <= int(self.seed) < 2**64):
            raise ValueError("seed must fit in 64 bits")


@dataclass(frozen=True)
class NoisyTrace:
    """Estimated outcome probabilities on a time grid.

    ``sigma`` is the per-point standard deviation of the gaussian noise model
    and ``None`` for bernoulli traces, whose values are multiples of
    ``1/n_e`` by construction.
    """

    times: np.ndarray
    p_hat: np.ndarray
    n_e: float
    sigma: float | None = None

    @property
    def p_bar(self) -> np.ndarray:
        """The trace rescaled to [-1, 1]: 2 p_hat - 1."""
        return 2.0 * self.p_hat - 1.0

    def __len__(self) -> int:
        return self.times.size


def gaussian_sigma(n_e) -> float:
    """Large-sample standard deviation sqrt(ln ln n_e / (2 n_e)) of the estimated probability.

    Natural logarithms; ``n_e`` must be at least 3 so the iterated logarithm
    is positive.  gaussian_sigma(100) = 0.0874 to three significant figures.
    """
    if n_e == NOISELESS:
        return 0.0
    if not n_e >= 3:
        raise ValueError(f"n_e must be >= 3 for the variance formula, got {n_e}")
    return math.sqrt(math.log(math.log(n_e)) / (2.0 * n_e))


def _series_rng(seed: int, series: int) -> np.random.Generator:
    # Documented substream derivation: series s uses (master seed, s).
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(series,)))


def simulate_trace(
    design: ExperimentDesign,
    params: SystemParams,
    plan: SamplingPlan,
    series: int = 0,
) -> NoisyTrace:
    """One noisy probability trace under the plan's noise model.

    Deterministic given ``(plan.seed, series)``.  ``series`` is the index
    used by :func:`multi_trace`; a bare call leaves it at 0.
    """
    p = np.atleast_1d(probability_trace(design, params, plan.times))
    if plan.n_e == NOISELESS:
        return NoisyTrace(plan.times, p, plan.n_e, sigma=0.0)

    n_e = int(plan.n_e)
    rng = _series_rng(plan.seed, series)
    if plan.noise_model == "gaussian":
        sigma = gaussian_sigma(n_e)
        p_hat = p + rng.normal(0.0, sigma, size=p.size)
        return NoisyTrace(plan.times, p_hat, n_e, sigma=sigma)

    # One uniform block per sample time, chunked to bound memory on
    # dense grids with large repetition counts.
    p_hat = np.empty_like(p)
    chunk = max(1, int(2_000_000 // n_e))
    for lo in range(0, p.size, chunk):
        hi = min(lo + chunk, p.size)
        r = rng.random((hi - lo, n_e))
        p_hat[lo:hi] = np.count_nonzero(r <= p[lo:hi, None], axis=1) / n_e
    return NoisyTrace(plan.times, p_hat, n_e, sigma=None)


def multi_trace(
    design: ExperimentDesign,
    params: SystemParams,
    plan: SamplingPlan,
    n_series: int,
) -> list[NoisyTrace]:
    """``n_series`` independent traces with per-series derived seeds.

    Series ``s`` uses the substream ``(plan.seed, s, .)``, so
    ``multi_trace(..., 1)[0]`` is identical to ``simulate_trace`` with the
    same master seed.
    """
    if n_series < 1:
        raise ValueError("n_series must be >= 1")
    return [simulate_trace(design, params, plan, series=s) for s in range(n_series)]


def write_trace_csv(trace: NoisyTrace, path) -> None:
    """Write a trace as CSV with header ``t,p_hat,Ne``, 17 significant digits."""
    with open(path, "w") as fh:
        fh.write("t,p_hat,Ne\n")
        for t, p in zip(trace.times, trace.p_hat):
            fh.write(f"{t:.17g},{p:.17g},{trace.n_e:.17g}\n")


def load_trace_csv(path) -> NoisyTrace:
    """Read a trace written by :func:`write_trace_csv`."""
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[1] != 3:
        raise ValueError(f"{path}: expected 3 columns t,p_hat,Ne, got {data.shape[1]}")
    n_e = data[0, 2]
    if not np.all(data[:, 2] == n_e):
        raise ValueError(f"{path}: Ne column is not constant")
    if n_e != NOISELESS:
        n_e = int(n_e)
    sigma = None
    return NoisyTrace(data[:, 0], data[:, 1], n_e, sigma=sigma)
