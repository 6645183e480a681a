"""Which experiment designs can identify which parameters.

A design is the pair of preparation and measurement angles plus the drive
axis.  For the z drive both parameters are visible only when neither angle
aligns with the dephasing axis; for the x drive an equatorial preparation or
measurement hides the drive frequency but not the dephasing rate; the y drive
always reveals both.  This script maps the verdicts and the visibility
(signal amplitude) over the full angle grid.

Run:  python demos/02_identifiability_map.py
"""

import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np
from matplotlib.colors import ListedColormap

from qubitid import DriveAxis, ExperimentDesign, Verdict, classify, visibility

OUT = pathlib.Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

angles = np.linspace(0, 2 * np.pi, 181)
code = {Verdict.NONE: 0, Verdict.GAMMA_ONLY: 1, Verdict.FULL: 2}
cmap = ListedColormap(["#b40426", "#f2c45f", "#3b4cc0"])

fig, axes = plt.subplots(2, 3, figsize=(13, 7.5), sharex=True, sharey=True)
for col, axis in enumerate(DriveAxis):
    verdicts = np.empty((angles.size, angles.size))
    vis = np.empty_like(verdicts)
    for i, ti in enumerate(angles):
        for j, tm in enumerate(angles):
            d = ExperimentDesign(ti, tm, axis)
            verdicts[i, j] = code[classify(d).verdict]
            vis[i, j] = visibility(d)
    im0 = axes[0, col].pcolormesh(angles, angles, verdicts.T, cmap=cmap, vmin=-0.5, vmax=2.5)
    im1 = axes[1, col].pcolormesh(angles, angles, vis.T, cmap="viridis", vmin=0, vmax=1)
    axes[0, col].set_title(f"drive along {axis.value}")
    axes[1, col].set_xlabel("preparation angle")
axes[0, 0].set_ylabel("measurement angle\n(verdict)")
axes[1, 0].set_ylabel("measurement angle\n(visibility)")
cbar = fig.colorbar(im0, ax=axes[0, :], ticks=[0, 1, 2], shrink=0.8)
cbar.ax.set_yticklabels(["none", "rate only", "full"])
fig.colorbar(im1, ax=axes[1, :], shrink=0.8)
fig.savefig(OUT / "identifiability_map.png", dpi=130)
print(f"wrote {OUT / 'identifiability_map.png'}")

# the degenerate lines in words
print("\nexamples:")
for axis, ti, tm in [
    (DriveAxis.Z, 0.0, np.pi / 2),
    (DriveAxis.Z, np.pi / 2, 0.0),
    (DriveAxis.X, np.pi / 2, np.pi / 3),
    (DriveAxis.X, np.pi / 2, 0.0),
    (DriveAxis.Y, 1.0, 2.0),
]:
    v = classify(ExperimentDesign(ti, tm, axis))
    print(f"  {axis.value} drive, prep={ti:.2f}, meas={tm:.2f}: "
          f"{v.verdict.value:10s} ({v.reason})")
