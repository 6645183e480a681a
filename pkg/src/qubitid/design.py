"""Identifiability classification and visibility scoring of experiment designs.

Whether a design can recover the drive frequency, only the dephasing rate, or
nothing at all is a property of the angles and the drive axis alone:

* z drive: both parameters appear in the trace iff neither sin(theta_prep)
  nor sin(theta_meas) vanishes.  The poles are stationary states (drive and
  dephasing share the z axis) and a z-aligned measurement reads a conserved
  quantity, so either degeneracy hides the dynamics completely.
* x drive: full information iff cos(theta_prep) cos(theta_meas) != 0.  When
  that product vanishes but sin(theta_prep) sin(theta_meas) does not, the
  trace still decays at the dephasing rate but carries no frequency: the
  drive axis is orthogonal to the dephasing axis and the visible component
  commutes with the drive.  When both products vanish the trace is constant.
* y drive: always full -- no choice of angles makes all three coefficient
  amplitudes vanish simultaneously.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .models import DriveAxis, ExperimentDesign, SystemParams, coefficients

__all__ = ["Verdict", "IdentifiabilityVerdict", "classify", "visibility"]

#: Tolerance for trigonometric zero tests on the angles.
ANGLE_EPS = 1e-12


class Verdict(enum.Enum):
    FULL = "full"
    GAMMA_ONLY = "gamma_only"
    NONE = "none"


@dataclass(frozen=True)
class IdentifiabilityVerdict:
    """Verdict plus a machine-readable reason code.

    ``reason`` is one of ``"ok"``, ``"stationary-state"``,
    ``"conserved-measurement"``, ``"orthogonal-H-commuting-M"``.  ``warning``
    flags parameter-dependent coefficient degeneracies for the y drive (the
    verdict itself is design-only).
    """

    verdict: Verdict
    reason: str
    warning: str | None = None


def classify(design: ExperimentDesign, params: SystemParams | None = None) -> IdentifiabilityVerdict:
    """Classify which of (omega, gamma) the design can identify.

    For the y drive the verdict is always ``FULL``; if ``params`` is given,
    a warning is attached when one of the two basis coefficients is
    numerically zero for those parameters, since the corresponding component
    of the signal then carries no weight.
    """
    si, ci = math.sin(design.theta_prep), math.cos(design.theta_prep)
    sm, cm = math.sin(design.theta_meas), math.cos(design.theta_meas)

    if design.model is DriveAxis.Z:
        if abs(si * sm) > ANGLE_EPS:
            return IdentifiabilityVerdict(Verdict.FULL, "ok")
        if abs(si) <= ANGLE_EPS:
            return IdentifiabilityVerdict(Verdict.NONE, "stationary-state")
        return IdentifiabilityVerdict(Verdict.NONE, "conserved-measurement")

    if design.model is DriveAxis.X:
        if abs(ci * cm) > ANGLE_EPS:
            return IdentifiabilityVerdict(Verdict.FULL, "ok")
        if abs(si * sm) > ANGLE_EPS:
            return IdentifiabilityVerdict(Verdict.GAMMA_ONLY, "orthogonal-H-commuting-M")
        # Doubly degenerate corner: the trace is identically 1/2.
        if abs(sm) <= ANGLE_EPS:
            return IdentifiabilityVerdict(Verdict.NONE, "conserved-measurement")
        return IdentifiabilityVerdict(Verdict.NONE, "orthogonal-H-commuting-M")

    warning = None
    if params is not None:
        a1, a2 = coefficients(design, params)
        if abs(a1) <= ANGLE_EPS:
            warning = "cosine-coefficient-vanishes"
        elif abs(a2) <= ANGLE_EPS:
            warning = "sine-coefficient-vanishes"
    elif abs(math.cos(design.theta_prep - design.theta_meas)) <= ANGLE_EPS:
        warning = "cosine-coefficient-vanishes"
    return IdentifiabilityVerdict(Verdict.FULL, "ok", warning)


def visibility(design: ExperimentDesign) -> float:
    """Amplitude of the parameter-bearing component of the trace, in [0, 1].

    |sin sin| for the z drive, |cos cos| for the x drive (the term through
    which the frequency enters), and |cos(theta_prep - theta_meas)| -- the
    trace value at t = 0 -- for the y drive.
    """
    si, ci = math.sin(design.theta_prep), math.cos(design.theta_prep)
    sm, cm = math.sin(design.theta_meas), math.cos(design.theta_meas)
    if design.model is DriveAxis.Z:
        return abs(si * sm)
    if design.model is DriveAxis.X:
        return abs(ci * cm)
    return abs(math.cos(design.theta_prep - design.theta_meas))
