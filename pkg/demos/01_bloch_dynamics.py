"""Closed-form qubit dynamics under dephasing, checked against brute force.

The toolkit's closed forms cover three drive configurations (drive along the
dephasing axis z, or along x or y, orthogonal to it) and all three damping
branches: underdamped oscillation, critical damping, and the overdamped
regime where the effective frequency turns imaginary.  This script plots the
measurement-axis projection for each case and overlays a fixed-step RK4
integration of the same Bloch equation to show the two agree to machine
precision.

Run:  python demos/01_bloch_dynamics.py   (writes PNGs into demos/output/)
"""

import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from qubitid import (
    DriveAxis,
    ExperimentDesign,
    SystemParams,
    build_generator,
    effective_frequency,
    initial_bloch,
    integrate,
    probability_trace,
    propagate,
)

OUT = pathlib.Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

# --- three drive axes, one moderate dephasing rate -------------------------

params = SystemParams(omega=1.0, gamma=0.15)
ts = np.linspace(0.0, 25.0, 600)

fig, axes = plt.subplots(1, 3, figsize=(13, 3.6), sharey=True)
for ax, axis in zip(axes, DriveAxis):
    design = ExperimentDesign(theta_prep=np.pi / 3, theta_meas=np.pi / 4, model=axis)
    p = probability_trace(design, params, ts)
    ax.plot(ts, p, lw=1.5, label="closed form")

    # brute-force check at a few times
    check_ts = ts[::60]
    v0 = initial_bloch(design.theta_prep)
    gen = build_generator(axis, params)
    p_rk = []
    for t in check_ts:
        v = integrate(gen, v0, t, dt=1e-3)
        p_rk.append(0.5 * (1 + v[0] * np.sin(design.theta_meas) + v[2] * np.cos(design.theta_meas)))
    ax.plot(check_ts, p_rk, "o", ms=5, mfc="none", label="RK4 check")
    ax.set_title(f"drive along {axis.value}")
    ax.set_xlabel("time")
axes[0].set_ylabel("P(+ outcome)")
axes[0].legend(frameon=False)
fig.suptitle("Measurement trace for the three drive configurations (omega=1, gamma=0.15)")
fig.tight_layout()
fig.savefig(OUT / "drive_axes.png", dpi=130)
print(f"wrote {OUT / 'drive_axes.png'}")

# --- damping branches for the x drive ---------------------------------------

fig, ax = plt.subplots(figsize=(7, 4))
gamma = 1.0
for omega, label in [(1.5, "underdamped"), (0.5, "critical"), (0.2, "overdamped")]:
    p = SystemParams(omega, gamma)
    eff = effective_frequency(p)
    design = ExperimentDesign(0.25, 0.1, DriveAxis.X)
    trace = probability_trace(design, p, ts)
    ax.plot(ts, trace, label=f"omega={omega}: {eff.branch.value} (w_eff={eff.magnitude:.3f})")
ax.set_xlabel("time")
ax.set_ylabel("P(+ outcome)")
ax.legend(frameon=False)
ax.set_title("Damping branches at gamma = 1 (x drive)")
fig.tight_layout()
fig.savefig(OUT / "branches.png", dpi=130)
print(f"wrote {OUT / 'branches.png'}")

# --- the Bloch vector spirals for the z drive -------------------------------

design = ExperimentDesign(np.pi / 2, np.pi / 2, DriveAxis.Z)
v = propagate(design, SystemParams(1.0, 0.08), np.linspace(0, 40, 2000))
fig, ax = plt.subplots(figsize=(5, 5))
ax.plot(v[:, 0], v[:, 1], lw=0.8)
ax.set_xlabel("v_x")
ax.set_ylabel("v_y")
ax.set_aspect("equal")
ax.set_title("Equatorial spiral toward the dephasing axis (z drive)")
fig.tight_layout()
fig.savefig(OUT / "spiral.png", dpi=130)
print(f"wrote {OUT / 'spiral.png'}")

worst = 0.0
for axis in DriveAxis:
    d = ExperimentDesign(1.1, 0.4, axis)
    pp = SystemParams(0.8, 0.3)
    v_cf = propagate(d, pp, 7.0)
    v_rk = integrate(build_generator(axis, pp), initial_bloch(1.1), 7.0, 1e-4)
    worst = max(worst, float(np.max(np.abs(v_cf - v_rk))))
print(f"closed form vs RK4, worst component difference: {worst:.2e}")
