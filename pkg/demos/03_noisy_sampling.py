"""Finite-repetition sampling noise and what it does to the spectrum.

Estimating an outcome probability from n_e repetitions gives a value on the
1/n_e grid with binomial spread; the large-n_e gaussian surrogate has
standard deviation sqrt(ln ln n_e / (2 n_e)), about 0.0874 at n_e = 100.
This script draws a sparse noisy trace of a slowly dephasing qubit, compares
the two noise models, and shows that the drive frequency still stands out in
the periodogram of only 75 noisy samples.

Run:  python demos/03_noisy_sampling.py
"""

import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from qubitid import (
    DriveAxis,
    ExperimentDesign,
    SamplingPlan,
    SystemParams,
    gaussian_sigma,
    periodogram,
    probability_trace,
    simulate_trace,
)

OUT = pathlib.Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

design = ExperimentDesign(np.pi / 2, np.pi / 2, DriveAxis.Z)
params = SystemParams(omega=1.0, gamma=0.1)
times = np.linspace(0.0, 25.0, 75)
dense = np.linspace(0.0, 25.0, 1500)

trace = simulate_trace(design, params, SamplingPlan(times, 100, "bernoulli", seed=7))
spec = periodogram(trace, zero_pad_factor=8)

fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(11, 3.8))
ax1.plot(dense, probability_trace(design, params, dense), lw=1, label="ideal")
ax1.plot(times, trace.p_hat, ".", ms=5, label="n_e=100 estimates")
ax1.set_xlabel("time")
ax1.set_ylabel("P(+ outcome)")
ax1.legend(frameon=False)
ax1.set_title("Sparse noisy sampling (75 points)")
ax2.plot(spec.frequencies, spec.magnitude, lw=1)
ax2.axvline(params.omega, color="k", ls=":", lw=1)
ax2.set_xlim(0, 4)
ax2.set_xlabel("angular frequency")
ax2.set_ylabel("|spectrum|")
ax2.set_title(f"Periodogram peak at {spec.peak_frequency():.3f} (drive at 1.0)")
fig.tight_layout()
fig.savefig(OUT / "sparse_trace_spectrum.png", dpi=130)
print(f"wrote {OUT / 'sparse_trace_spectrum.png'}")

# --- the two noise models side by side --------------------------------------

fig, axes = plt.subplots(1, 2, figsize=(11, 3.8), sharey=True)
for ax, noise in zip(axes, ("bernoulli", "gaussian")):
    tr = simulate_trace(design, params, SamplingPlan(times, 100, noise, seed=11))
    ax.plot(dense, probability_trace(design, params, dense), lw=1, color="C0")
    ax.plot(times, tr.p_hat, ".", ms=5, color="C1")
    ax.set_title(f"{noise} noise model")
    ax.set_xlabel("time")
axes[0].set_ylabel("P(+ outcome)")
fig.suptitle(f"n_e = 100: gaussian surrogate sigma = {gaussian_sigma(100):.4f}")
fig.tight_layout()
fig.savefig(OUT / "noise_models.png", dpi=130)
print(f"wrote {OUT / 'noise_models.png'}")

# binomial discreteness: all estimates live on the 1/n_e grid
tr = simulate_trace(design, params, SamplingPlan(times, 20, "bernoulli", seed=3))
print("bernoulli estimates at n_e=20 are multiples of 0.05:",
      np.all((tr.p_hat * 20) % 1 == 0))
