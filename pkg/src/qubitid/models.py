"""Closed-form dynamics of a driven qubit under pure dephasing.

The system is a two-level system whose coherences decay at rate ``gamma``
(dephasing along the z axis) while a constant drive of angular frequency
``omega`` rotates the Bloch vector about one of the three Cartesian axes.
The state is prepared along an axis at angle ``theta_prep`` from z in the
x-z plane and read out with a two-outcome projective measurement along an
axis at angle ``theta_meas``, also in the x-z plane.

All time-dependent quantities in this module are exact closed forms of the
Bloch equation, valid on every damping branch (underdamped, critically
damped, overdamped).  Every function broadcasts over ``t``; scalars in give
scalars out, arrays in give arrays out.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DriveAxis",
    "SystemParams",
    "ExperimentDesign",
    "Branch",
    "EffectiveFrequency",
    "effective_frequency",
    "initial_bloch",
    "measurement_axis",
    "propagate",
    "probability_trace",
    "basis_functions",
    "coefficients",
]

TWO_PI = 2.0 * math.pi

# Relative guard band around the critically damped line omega = gamma/2;
# inside it the analytic limits are used to avoid catastrophic cancellation.
CRITICAL_GUARD = 1e-12


class DriveAxis(enum.Enum):
    """Axis of the constant drive term; dephasing always acts along z."""

    Z = "z"  # drive parallel to the dephasing axis
    X = "x"  # drive orthogonal to the dephasing axis
    Y = "y"  # drive orthogonal to the dephasing axis

    @classmethod
    def from_string(cls, s: str) -> "DriveAxis":
        try:
            return cls(s.strip().lower())
        except ValueError:
            raise ValueError(
                f"unknown drive axis {s!r}; expected one of 'z', 'x', 'y'"
            ) from None


@dataclass(frozen=True)
class SystemParams:
    """The two unknowns to identify: drive frequency and dephasing rate.

    Both are in reciprocal time units of the (dimensionless) time axis.
    """

    omega: float
    gamma: float

    def __post_init__(self):
        if not (math.isfinite(self.omega) and self.omega >= 0.0):
            raise ValueError(f"omega must be finite and >= 0, got {self.omega}")
        if not (math.isfinite(self.gamma) and self.gamma >= 0.0):
            raise ValueError(f"gamma must be finite and >= 0, got {self.gamma}")


@dataclass(frozen=True)
class ExperimentDesign:
    """Preparation angle, measurement angle and drive axis of one experiment.

    Angles are radians, measured from the z axis within the x-z plane, and
    are stored reduced to [0, 2pi).
    """

    theta_prep: float
    theta_meas: float
    model: DriveAxis

    def __post_init__(self):
        if not (math.isfinite(self.theta_prep) and math.isfinite(self.theta_meas)):
            raise ValueError("preparation/measurement angles must be finite")
        object.__setattr__(self, "theta_prep", self.theta_prep % TWO_PI)
        object.__setattr__(self, "theta_meas", self.theta_meas % TWO_PI)
        if not isinstance(self.model, DriveAxis):
            object.__setattr__(self, "model", DriveAxis(self.model))


class Branch(enum.Enum):
    """Damping regime of the driven coherence."""

    OSCILLATORY = "oscillatory"
    CRITICAL = "critical"
    HYPERBOLIC = "hyperbolic"


@dataclass(frozen=True)
class EffectiveFrequency:
    """Branch and magnitude of the shifted frequency sqrt(|omega^2 - gamma^2/4|)."""

    branch: Branch
    magnitude: float


def _branch_split(omega, gamma):
    """Elementwise branch classification with a relative guard band.

    Returns (is_osc, is_crit, is_hyp, w) where ``w`` is the effective
    frequency magnitude sqrt(|omega^2 - gamma^2/4|), zeroed on the critical
    set.
    """
    omega = np.asarray(omega, dtype=float)
    gamma = np.asarray(gamma, dtype=float)
    disc = omega**2 - 0.25 * gamma**2
    guard = CRITICAL_GUARD * np.maximum(omega**2, 0.25 * gamma**2)
    is_crit = np.abs(disc) <= guard
    is_osc = ~is_crit & (disc > 0)
    is_hyp = ~is_crit & (disc < 0)
    w = np.sqrt(np.abs(disc))
    w = np.where(is_crit, 0.0, w)
    return is_osc, is_crit, is_hyp, w


def effective_frequency(params: SystemParams) -> EffectiveFrequency:
    """Classify (omega, gamma) by damping branch and return sqrt(|omega^2 - gamma^2/4|)."""
    is_osc, is_crit, _, w = _branch_split(params.omega, params.gamma)
    if is_crit:
        return EffectiveFrequency(Branch.CRITICAL, 0.0)
    if is_osc:
        return EffectiveFrequency(Branch.OSCILLATORY, float(w))
    return EffectiveFrequency(Branch.HYPERBOLIC, float(w))


def _damped_kernels(omega, gamma, t):
    """Envelope-damped trigonometric kernels, continued across branches.

    Returns ``(dcos, dsinc, dsin)`` where, with w the effective frequency,

    * ``dcos  = exp(-gamma t/2) * cos(w t)``  (cosh on the overdamped branch,
      1 at critical damping),
    * ``dsinc = exp(-gamma t/2) * sin(w t)/w``  (sinh(w t)/w overdamped, t at
      critical damping),
    * ``dsin  = exp(-gamma t/2) * sin(w t)``  (sinh overdamped, t at critical
      damping, matching the convention of :func:`coefficients`).

    Exponentials are combined before evaluation on the overdamped branch so
    that nothing overflows even for large ``gamma * t``.
    """
    omega = np.asarray(omega, dtype=float)
    gamma = np.asarray(gamma, dtype=float)
    t = np.asarray(t, dtype=float)
    is_osc, is_crit, is_hyp, w = _broadcast_branch(omega, gamma, t)

    dcos = np.empty(is_osc.shape, dtype=float)
    dsinc = np.empty_like(dcos)

    gb = np.broadcast_to(gamma, dcos.shape)
    tb = np.broadcast_to(t, dcos.shape)
    wb = np.broadcast_to(w, dcos.shape)
    env = np.exp(-0.5 * gb * tb)

    if np.any(is_osc):
        m = is_osc
        dcos[m] = env[m] * np.cos(wb[m] * tb[m])
        dsinc[m] = env[m] * np.sin(wb[m] * tb[m]) / wb[m]
    if np.any(is_crit):
        m = is_crit
        dcos[m] = env[m]
        dsinc[m] = env[m] * tb[m]
    if np.any(is_hyp):
        m = is_hyp
        wt = wb[m] * tb[m]
        # exp(-g t/2) cosh(w t) with w < g/2: both exponents are <= 0.
        dcos[m] = 0.5 * (
            np.exp((wb[m] - 0.5 * gb[m]) * tb[m]) + np.exp(-(wb[m] + 0.5 * gb[m]) * tb[m])
        )
        # exp(-g t/2) sinh(w t)/w via expm1 to stay accurate for tiny w t;
        # for large w t the second exponential has underflowed anyway.
        small = 2.0 * wt < 600.0
        out = np.empty(wt.shape)
        lo = np.exp(-(wb[m] + 0.5 * gb[m]) * tb[m])
        out[small] = (lo[small] * np.expm1(2.0 * wt[small])) / (2.0 * wb[m][small])
        out[~small] = np.exp((wb[m] - 0.5 * gb[m]) * tb[m])[~small] / (2.0 * wb[m][~small])
        dsinc[m] = out

    dsin = np.where(is_crit, dsinc, wb * dsinc)
    return dcos, dsinc, dsin


def _broadcast_branch(omega, gamma, t):
    is_osc, is_crit, is_hyp, w = _branch_split(omega, gamma)
    shape = np.broadcast(np.asarray(omega), np.asarray(gamma), np.asarray(t)).shape
    return (
        np.broadcast_to(is_osc, shape),
        np.broadcast_to(is_crit, shape),
        np.broadcast_to(is_hyp, shape),
        np.broadcast_to(w, shape),
    )


def initial_bloch(theta_prep: float) -> np.ndarray:
    """Bloch vector of the pure preparation at angle ``theta_prep`` in the x-z plane."""
    return np.array([math.sin(theta_prep), 0.0, math.cos(theta_prep)])


def measurement_axis(theta_meas: float) -> np.ndarray:
    """Bloch axis of the '+' measurement outcome at angle ``theta_meas`` in the x-z plane."""
    return np.array([math.sin(theta_meas), 0.0, math.cos(theta_meas)])


def propagate(design: ExperimentDesign, params: SystemParams, t) -> np.ndarray:
    """Exact Bloch vector at time(s) ``t`` for the given design and parameters.

    Parameters
    ----------
    design : ExperimentDesign
        Preparation angle and drive axis (the measurement angle is unused here).
    params : SystemParams
        Drive frequency and dephasing rate.
    t : float or array_like
        Time(s), >= 0.

    Returns
    -------
    numpy.ndarray
        Bloch components stacked on the last axis, shape ``t.shape + (3,)``.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("time must be >= 0")
    si, ci = math.sin(design.theta_prep), math.cos(design.theta_prep)
    om, ga = params.omega, params.gamma

    if design.model is DriveAxis.Z:
        envelope = np.exp(-ga * t)
        vx = envelope * np.cos(om * t) * si
        vy = envelope * np.sin(om * t) * si
        vz = np.full_like(vx, ci)
        return np.stack([vx, vy, vz], axis=-1)

    dcos, dsinc, _ = _damped_kernels(om, ga, t)
    half = 0.5 * ga
    if design.model is DriveAxis.X:
        vx = np.exp(-ga * t) * si
        vy = -om * dsinc * ci
        vz = (dcos + half * dsinc) * ci
        return np.stack([np.broadcast_to(vx, dcos.shape), vy, vz], axis=-1)

    # drive about y: the y component decouples and stays zero
    vx = (dcos - half * dsinc) * si - om * dsinc * ci
    vy = np.zeros_like(vx)
    vz = (dcos + half * dsinc) * ci + om * dsinc * si
    return np.stack([vx, vy, vz], axis=-1)


def probability_trace(design: ExperimentDesign, params: SystemParams, t):
    """Probability of the '+' measurement outcome at time(s) ``t``.

    Computed by projecting the propagated Bloch vector onto the measurement
    axis: p = (1 + v . m) / 2.  The complementary outcome has probability
    1 - p by construction.
    """
    v = propagate(design, params, t)
    sm, cm = math.sin(design.theta_meas), math.cos(design.theta_meas)
    p_bar = v[..., 0] * sm + v[..., 2] * cm
    return 0.5 * (1.0 + p_bar)


def _basis_arrays(model: DriveAxis, omega, gamma, t):
    """Basis pair (g1, g2) broadcast over array-valued omega, gamma and t."""
    omega = np.asarray(omega, dtype=float)
    gamma = np.asarray(gamma, dtype=float)
    t = np.asarray(t, dtype=float)
    if model is DriveAxis.Z:
        g2 = np.exp(-gamma * t) * np.cos(omega * t)
        return np.ones_like(g2), g2
    dcos, dsinc, dsin = _damped_kernels(omega, gamma, t)
    if model is DriveAxis.X:
        g1 = np.broadcast_to(np.exp(-gamma * t), dcos.shape).copy()
        g2 = dcos + 0.5 * gamma * dsinc
        return g1, g2
    return dcos, dsin


def basis_functions(model: DriveAxis, params: SystemParams, t):
    """The two time basis functions whose span contains the rescaled trace.

    For every design the rescaled trace ``2 p(t) - 1`` is an exact linear
    combination ``a1 g1(t) + a2 g2(t)`` with coefficients from
    :func:`coefficients`:

    * z drive:  ``g1 = 1``, ``g2 = exp(-gamma t) cos(omega t)``
    * x drive:  ``g1 = exp(-gamma t)``,
      ``g2 = exp(-gamma t/2) [cos(w t) + gamma/(2 w) sin(w t)]``
    * y drive:  ``g1 = exp(-gamma t/2) cos(w t)``,
      ``g2 = exp(-gamma t/2) sin(w t)``

    with w the effective frequency and the usual hyperbolic/critical
    continuations on the other branches.
    """
    return _basis_arrays(model, params.omega, params.gamma, t)


def coefficients(design: ExperimentDesign, params: SystemParams) -> tuple[float, float]:
    """Exact linear coefficients (a1, a2) of the basis decomposition.

    ``2 p(t) - 1 == a1 g1(t) + a2 g2(t)`` holds identically in ``t`` with
    (g1, g2) from :func:`basis_functions`.  For the z and x drives the
    coefficients depend only on the angles; for the y drive the second one
    also carries the parameters:

    ``a2 = gamma/(2 w) cos(theta_prep + theta_meas)
           + omega/w   sin(theta_prep - theta_meas)``

    (at critical damping the 1/w factors cancel against the basis convention
    and drop out).
    """
    ti, tm = design.theta_prep, design.theta_meas
    if design.model is DriveAxis.Z:
        return math.cos(ti) * math.cos(tm), math.sin(ti) * math.sin(tm)
    if design.model is DriveAxis.X:
        return math.sin(ti) * math.sin(tm), math.cos(ti) * math.cos(tm)
    eff = effective_frequency(params)
    inv = 1.0 if eff.branch is Branch.CRITICAL else 1.0 / eff.magnitude
    a1 = math.cos(ti - tm)
    a2 = 0.5 * params.gamma * inv * math.cos(ti + tm) + params.omega * inv * math.sin(ti - tm)
    return a1, a2
