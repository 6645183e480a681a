"""Brute-force integration of the Bloch equation, used to validate the closed forms.

The dynamics of every constant-drive dephasing model is linear,
``dv/dt = G v`` with a constant 3x3 generator ``G``.  This module builds the
generator for each drive axis and integrates it with classical fixed-step
fourth-order Runge-Kutta.  It shares no code with :mod:`qubitid.models`, so
agreement between the two is a genuine cross-check.
"""

from __future__ import annotations

import numpy as np

from .models import DriveAxis, SystemParams

__all__ = ["build_generator", "rk4_step", "rk4_step_matrix", "integrate"]

DEFAULT_DT = 1e-4


def build_generator(model: DriveAxis, params: SystemParams) -> np.ndarray:
    """Constant coefficient matrix of the Bloch equation for one drive axis.

    The dephasing contributes ``-gamma`` on the x and y diagonal slots; the
    drive contributes an antisymmetric rotation block about its axis.
    """
    om, ga = params.omega, params.gamma
    if model is DriveAxis.Z:
        return np.array([[-ga, -om, 0.0], [om, -ga, 0.0], [0.0, 0.0, 0.0]])
    if model is DriveAxis.X:
        return np.array([[-ga, 0.0, 0.0], [0.0, -ga, -om], [0.0, om, 0.0]])
    return np.array([[-ga, 0.0, -om], [0.0, -ga, 0.0], [om, 0.0, 0.0]])


def rk4_step(gen: np.ndarray, v: np.ndarray, h: float) -> np.ndarray:
    """One classical Runge-Kutta step of ``dv/dt = gen @ v``."""
    k1 = gen @ v
    k2 = gen @ (v + 0.5 * h * k1)
    k3 = gen @ (v + 0.5 * h * k2)
    k4 = gen @ (v + h * k3)
    return v + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def rk4_step_matrix(gen: np.ndarray, h: float) -> np.ndarray:
    """The linear map applied by one RK4 step of ``dv/dt = gen @ v``.

    Because the generator is constant, the four stages collapse to the
    degree-4 Taylor polynomial of the matrix exponential:
    ``I + hG + (hG)^2/2 + (hG)^3/6 + (hG)^4/24``.  ``rk4_step(gen, v, h)``
    equals ``rk4_step_matrix(gen, h) @ v`` exactly (up to rounding), which is
    asserted in the test suite.
    """
    hg = h * np.asarray(gen, dtype=float)
    eye = np.eye(hg.shape[0])
    hg2 = hg @ hg
    return eye + hg + hg2 / 2.0 + (hg2 @ hg) / 6.0 + (hg2 @ hg2) / 24.0


def integrate(gen: np.ndarray, v0: np.ndarray, t_end: float, dt: float = DEFAULT_DT) -> np.ndarray:
    """Fixed-step RK4 solution of ``dv/dt = gen @ v`` from 0 to ``t_end``.

    The trajectory is advanced in whole steps of ``dt``; a final shortened
    step lands exactly on ``t_end``.  With the generator constant, the whole
    sequence of steps is the repeated application of the one-step matrix, so
    it is evaluated through :func:`numpy.linalg.matrix_power` (identical
    arithmetic, far fewer Python-level operations).

    Parameters
    ----------
    gen : (3, 3) array_like
        Constant generator, e.g. from :func:`build_generator`.
    v0 : (3,) array_like
        Initial Bloch vector.
    t_end : float
        End time, >= 0.
    dt : float
        Step size, > 0.  Default 1e-4.
    """
    gen = np.asarray(gen, dtype=float)
    v0 = np.asarray(v0, dtype=float)
    if not (np.all(np.isfinite(gen)) and np.all(np.isfinite(v0))):
        raise ValueError("generator and initial state must be finite")
    if not (np.isfinite(t_end) and t_end >= 0.0):
        raise ValueError(f"t_end must be finite and >= 0, got {t_end}")
    if not (np.isfinite(dt) and dt > 0.0):
        raise ValueError(f"dt must be finite and > 0, got {dt}")
    if t_end == 0.0:
        return v0.copy()

    n_full = int(np.floor(t_end / dt))
    remainder = t_end - n_full * dt
    if remainder <= 1e-12 * dt and n_full > 0:
        remainder = 0.0

    v = v0
    if n_full > 0:
        v = np.linalg.matrix_power(rk4_step_matrix(gen, dt), n_full) @ v
    if remainder > 0.0:
        v = rk4_step(gen, v, remainder)
    return v
