"""Spectral estimation of the drive frequency and dephasing rate.

The magnitude spectrum of a decaying oscillation ``exp(-gamma t) sin(w0 t)``
(unit step at t = 0) is

    |F(w)| = w0 / sqrt([gamma^2 + (w0-w)^2] [gamma^2 + (w0+w)^2]),

which peaks at ``w* = sqrt(w0^2 - gamma^2)`` with height ``1/(2 gamma)``.
The dephasing rate follows from the width of the peak: with ``d`` the
distance from the peak to the upper half-maximum crossing,

    gamma = sqrt(6 g(w*, d) - 18 w*^2) / 6,
    g(w*, d) = sqrt(9 w*^4 + 12 d^2 w*^2 + 12 d^3 w* + 3 d^4),

an exact inversion of the half-maximum condition, and then
``w0 = sqrt(w*^2 + gamma^2)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .simulate import NoisyTrace

__all__ = [
    "Spectrum",
    "FourierEstimate",
    "periodogram",
    "analytic_spectrum",
    "fourier_estimate",
]

#: Relative tolerance on grid uniformity accepted by the periodogram.
UNIFORM_RTOL = 1e-9


@dataclass(frozen=True)
class Spectrum:
    """Magnitude spectrum on a uniform non-negative angular-frequency grid."""

    frequencies: np.ndarray
    magnitude: np.ndarray

    @property
    def resolution(self) -> float:
        """Bin width of the frequency grid."""
        return float(self.frequencies[1] - self.frequencies[0])

    def peak_frequency(self) -> float:
        """Frequency of the largest magnitude bin (no interpolation)."""
        return float(self.frequencies[int(np.argmax(self.magnitude))])


@dataclass(frozen=True)
class FourierEstimate:
    """Peak-shape readout of a spectrum.

    ``gamma_from_height`` assumes the magnitude is normalized like the
    continuous transform of a unit-amplitude signal (true for
    :func:`analytic_spectrum`, only approximately for measured data after the
    amplitude is divided out); ``gamma_from_width`` needs no amplitude
    calibration and is the estimate of choice.  ``halfwidth`` is the distance
    from the peak to the upper half-maximum crossing, or None when the
    crossing lies outside the grid, in which case ``gamma_from_width`` is
    None as well and ``omega0`` falls back to the height-based rate.
    """

    omega_star: float
    peak_height: float
    halfwidth: float | None
    gamma_from_height: float
    gamma_from_width: float | None
    omega0: float


def periodogram(trace: NoisyTrace, zero_pad_factor: int = 1) -> Spectrum:
    """Magnitude spectrum of a mean-subtracted trace on a uniform time grid.

    The signal is zero-padded to ``zero_pad_factor`` times its length (an
    interpolation of the same spectrum) and scaled by the sample spacing so
    magnitudes approximate the continuous transform.  Frequencies are
    angular: bin k sits at ``2 pi k / (padded length * dt)``.

    Raises
    ------
    ValueError
        If the trace has fewer than 4 samples or a non-uniform time grid;
        non-uniform sampling is supported by the likelihood estimator
        (:func:`qubitid.bayes.bayes_surface`), not here.
    """
    t = trace.times
    if t.size < 4:
        raise ValueError("periodogram needs at least 4 samples")
    dt = np.diff(t)
    if np.max(np.abs(dt - dt[0])) > UNIFORM_RTOL * dt[0]:
        raise ValueError(
            "periodogram requires a uniform time grid; "
            "use the Bayesian likelihood estimator for non-uniform sampling"
        )
    if zero_pad_factor < 1:
        raise ValueError("zero_pad_factor must be >= 1")
    step = float(dt[0])
    signal = trace.p_hat - np.mean(trace.p_hat)
    n = int(zero_pad_factor) * t.size
    mag = np.abs(np.fft.rfft(signal, n=n)) * step
    freqs = 2.0 * np.pi * np.fft.rfftfreq(n, d=step)
    return Spectrum(freqs, mag)


def analytic_spectrum(omega0: float, gamma: float, frequencies) -> Spectrum:
    """Exact magnitude spectrum of a unit-amplitude decaying sine on a grid."""
    w = np.asarray(frequencies, dtype=float)
    mag = omega0 / np.sqrt(
        (gamma**2 + (omega0 - w) ** 2) * (gamma**2 + (omega0 + w) ** 2)
    )
    return Spectrum(w, mag)


def _parabolic_peak(freqs: np.ndarray, mag: np.ndarray, i: int) -> tuple[float, float]:
    """Sub-bin peak position and height through 3 bins around index ``i``.

    Fits a parabola to the log-magnitude (a Lorentzian-like peak is much
    closer to quadratic in log scale); falls back to the raw magnitude if a
    neighbouring bin is non-positive.
    """
    step = freqs[1] - freqs[0]
    a, b, c = mag[i - 1], mag[i], mag[i + 1]
    if min(a, b, c) > 0.0:
        a, b, c = np.log(a), np.log(b), np.log(c)
        denom = a + c - 2.0 * b
        shift = 0.0 if denom == 0.0 else 0.5 * (a - c) / denom
        height = float(np.exp(b - 0.25 * (a - c) * shift))
    else:
        denom = a + c - 2.0 * b
        shift = 0.0 if denom == 0.0 else 0.5 * (a - c) / denom
        height = float(b - 0.25 * (a - c) * shift)
    return float(freqs[i] + shift * step), height


def fourier_estimate(spec: Spectrum) -> FourierEstimate:
    """Recover (omega, gamma) from the position, height and width of a spectral peak.

    The peak must be interior to the grid.  The half-maximum crossing is
    located above the peak by linear interpolation; the closed-form width
    inversion in the module docstring then gives ``gamma_from_width`` and the
    undamped frequency ``omega0``.
    """
    freqs, mag = spec.frequencies, spec.magnitude
    i = int(np.argmax(mag))
    if i == 0 or i == mag.size - 1:
        raise ValueError("spectrum maximum is on the grid boundary; no interior peak")
    omega_star, height = _parabolic_peak(freqs, mag, i)
    gamma_h = 1.0 / (2.0 * height)

    half = 0.5 * height
    halfwidth = None
    above = np.nonzero(mag[i:] < half)[0]
    if above.size:
        k = i + above[0]  # first bin below half maximum, k > i
        f_lo, f_hi = freqs[k - 1], freqs[k]
        m_lo, m_hi = mag[k - 1], mag[k]
        crossing = f_lo + (m_lo - half) * (f_hi - f_lo) / (m_lo - m_hi)
        halfwidth = float(crossing - omega_star)

    if halfwidth is None:
        gamma_w = None
        omega0 = float(np.hypot(omega_star, gamma_h))
    else:
        d = halfwidth
        g = np.sqrt(9.0 * omega_star**4 + 12.0 * d**2 * omega_star**2 + 12.0 * d**3 * omega_star + 3.0 * d**4)
        gamma_w = float(np.sqrt(6.0 * g - 18.0 * omega_star**2) / 6.0)
        omega0 = float(np.hypot(omega_star, gamma_w))
    return FourierEstimate(omega_star, height, halfwidth, gamma_h, gamma_w, omega0)
