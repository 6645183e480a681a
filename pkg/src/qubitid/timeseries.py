"""Time-series recovery of the dephasing rate for the z-axis drive.

For a z drive the rescaled trace is
``2 p(t) - 1 = cos(ti) cos(tm) + exp(-gamma t) cos(omega t) sin(ti) sin(tm)``,
so with the angles and the frequency known each sample inverts to

    z(t) = -log[ (2 p_hat(t) - 1 - cos(ti) cos(tm))
                 / (cos(omega t) sin(ti) sin(tm)) ]  =  gamma t  (noiseless).

Samples where ``cos(omega t)`` is close to zero amplify noise without bound
and samples where the log argument is non-positive carry no usable value;
both are masked out rather than clamped, which would bias the fit.  The
dephasing rate is then the slope of the regression of z on t through the
origin, optionally averaged over several independent series with a
sequential stopping rule on the running mean.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .models import DriveAxis, ExperimentDesign, SystemParams
from .simulate import NoisyTrace

__all__ = [
    "ZInversion",
    "GammaEstimate",
    "z_inversion",
    "gamma_least_squares",
    "sequential_stop",
    "truncation_time",
]

#: Default mask threshold on |cos(omega t)|; below it a sample would amplify
#: noise at least fivefold.
DEFAULT_MASK_TOL = 0.2


class EstimationError(RuntimeError):
    """Raised when an estimator has no usable samples."""


@dataclass(frozen=True)
class ZInversion:
    """Per-sample inverted decay values with a validity mask."""

    times: np.ndarray
    z: np.ndarray
    valid: np.ndarray

    @property
    def n_valid(self) -> int:
        return int(np.count_nonzero(self.valid))


@dataclass(frozen=True)
class GammaEstimate:
    """Dephasing-rate estimate aggregated over measurement series."""

    mean: float
    std: float
    n_series: int
    per_series: np.ndarray
    running_means: np.ndarray
    stopped_at: int | None = None


def z_inversion(
    trace: NoisyTrace,
    design: ExperimentDesign,
    omega_z: float,
    mask_tol: float = DEFAULT_MASK_TOL,
) -> ZInversion:
    """Invert a z-drive trace to per-sample values of gamma * t.

    A sample is valid when ``|cos(omega_z t)| > mask_tol`` and the argument
    of the logarithm is positive; invalid samples are flagged in the mask
    (their z entry is meaningless but finite-safe, never NaN by contract of
    the mask).

    Raises
    ------
    ValueError
        If the design is not a z drive or has sin(ti) sin(tm) = 0.
    EstimationError
        If no sample at all is valid.
    """
    if design.model is not DriveAxis.Z:
        raise ValueError("z inversion applies to the z-axis drive only")
    amp = math.sin(design.theta_prep) * math.sin(design.theta_meas)
    if abs(amp) <= 1e-12:
        raise ValueError("design has sin(theta_prep) sin(theta_meas) = 0; nothing to invert")
    offset = math.cos(design.theta_prep) * math.cos(design.theta_meas)

    cos_t = np.cos(omega_z * trace.times)
    with np.errstate(divide="ignore", invalid="ignore"):
        arg = (trace.p_bar - offset) / (cos_t * amp)
    valid = (np.abs(cos_t) > mask_tol) & (arg > 0.0) & np.isfinite(arg)
    z = np.zeros_like(arg)
    z[valid] = -np.log(arg[valid])
    if not np.any(valid):
        raise EstimationError("all samples invalid: cannot invert the trace")
    return ZInversion(trace.times, z, valid)


def _fit_gamma(inv: ZInversion) -> float:
    # One-parameter least squares of z = gamma * t through the origin.
    t = inv.times[inv.valid]
    z = inv.z[inv.valid]
    denom = float(np.dot(t, t))
    if denom == 0.0:
        raise EstimationError("only t = 0 samples are valid; slope undefined")
    return float(np.dot(z, t) / denom)


def gamma_least_squares(
    traces: list[NoisyTrace],
    design: ExperimentDesign,
    omega_z: float,
    mask_tol: float = DEFAULT_MASK_TOL,
    t_max: float | None = None,
    stop_window: int | None = None,
    stop_tol: float | None = None,
) -> GammaEstimate:
    """Least-squares dephasing rate from one or more z-drive series.

    Each series is inverted with :func:`z_inversion` and fitted separately;
    the returned estimate carries the mean, the across-series standard
    deviation and the running means over series, on which the sequential
    stopping rule is evaluated when ``stop_window``/``stop_tol`` are given.

    ``t_max`` drops samples beyond a cutoff time before fitting.  Beyond the
    time where the decay envelope falls under the noise floor a trace is
    effectively pure noise, so a cutoff from :func:`truncation_time` keeps
    those samples from diluting the fit.

    Series whose inversion fails entirely are skipped; if every series
    fails, :class:`EstimationError` propagates.
    """
    if not traces:
        raise ValueError("need at least one trace")
    estimates = []
    failures = 0
    for trace in traces:
        if t_max is not None:
            keep = trace.times <= t_max
            trace = NoisyTrace(trace.times[keep], trace.p_hat[keep], trace.n_e, trace.sigma)
        try:
            estimates.append(_fit_gamma(z_inversion(trace, design, omega_z, mask_tol)))
        except EstimationError:
            failures += 1
    if not estimates:
        raise EstimationError(f"all {failures} series failed to invert")
    per_series = np.asarray(estimates)
    running = np.cumsum(per_series) / np.arange(1, per_series.size + 1)
    stopped = None
    if stop_window is not None and stop_tol is not None:
        stopped = sequential_stop(running, stop_window, stop_tol)
    std = float(np.std(per_series, ddof=1)) if per_series.size > 1 else 0.0
    return GammaEstimate(
        mean=float(np.mean(per_series)),
        std=std,
        n_series=per_series.size,
        per_series=per_series,
        running_means=running,
        stopped_at=stopped,
    )


def sequential_stop(running_means, window: int, tol: float) -> int | None:
    """First series count at which the last ``window`` running means agree.

    Returns the smallest m >= window such that the running means with
    indices m-window .. m-1 span a band of total width at most ``tol``, or
    None if the sequence never settles.
    """
    if window < 2:
        raise ValueError("window must be >= 2")
    means = np.asarray(running_means, dtype=float)
    for m in range(window, means.size + 1):
        tail = means[m - window : m]
        if np.max(tail) - np.min(tail) <= tol:
            return m
    return None


def truncation_time(params: SystemParams, floor: float) -> float:
    """Time beyond which the decay envelope is below ``floor``.

    Samples past ``-ln(floor)/gamma`` are effectively pure noise and do not
    improve the estimate.  For gamma = 0 there is no decay; returns
    ``math.inf`` (no truncation).
    """
    if not 0.0 < floor < 1.0:
        raise ValueError(f"floor must be in (0, 1), got {floor}")
    if params.gamma == 0.0:
        return math.inf
    return -math.log(floor) / params.gamma
