"""Identification of drive frequency and dephasing rate of a two-level system.

The package simulates finite-repetition projective-measurement experiments on
a dephasing qubit and recovers the drive frequency ``omega`` and dephasing
rate ``gamma`` from sparse, noisy probability traces with spectral,
time-series and likelihood-based estimators.  It also classifies experiment
designs (preparation angle, measurement angle, drive axis) by which
parameters they can identify at all.
"""

from .models import (
    Branch,
    DriveAxis,
    EffectiveFrequency,
    ExperimentDesign,
    SystemParams,
    basis_functions,
    coefficients,
    effective_frequency,
    initial_bloch,
    measurement_axis,
    probability_trace,
    propagate,
)
from .oracle import build_generator, integrate
from .simulate import (
    NoisyTrace,
    SamplingPlan,
    gaussian_sigma,
    load_trace_csv,
    multi_trace,
    simulate_trace,
    write_trace_csv,
)
from .design import IdentifiabilityVerdict, Verdict, classify, visibility
from .fourier import FourierEstimate, Spectrum, analytic_spectrum, fourier_estimate, periodogram
from .timeseries import (
    GammaEstimate,
    gamma_least_squares,
    sequential_stop,
    truncation_time,
    z_inversion,
)
from .bayes import BayesPoint, LikelihoodSurface, bayes_loglik, bayes_surface

__version__ = "0.1.0"
