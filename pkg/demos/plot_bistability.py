"""
Optical bistability in a finite array
=====================================

Within the uniform-mode picture each atom sees the incident drive plus the
field scattered by all others. The self-consistent excitation solves a cubic
with up to three real roots. We find where three roots exist, check which
are stable, and show the hysteresis loop an adiabatic sweep traces out.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from atomarray.meanfield import DriveParams, bistability_scan, bistability_window, hysteresis_sweep, steady_states
from atomarray.modes import lattice_mode_params

# %%
# Which array sizes are bistable?
# -------------------------------
# Scan atom number and detuning for two lattice constants. A small change
# of spacing moves the array across the threshold.

for a in (0.16, 0.17):
    report = bistability_scan(a, [4, 9, 16, 25, 36])
    print(f"a = {a}: first bistable N = {report.critical_N}")

# %%
# Steady-state curves
# -------------------
# Stable roots are drawn solid and the unstable middle root dashed.

mode = lattice_mode_params(0.16, 6, "eigen_overlap")
R_values = np.linspace(0.05, 8, 600)
fig, ax = plt.subplots(figsize=(5, 3.5))
for R in R_values:
    for br in steady_states(DriveParams(R, 0.0), mode):
        ax.plot(R, br.rho_ee, ".", ms=1.5, color="C0" if br.stable else "C3")
lo, hi = bistability_window(mode, 0.0)
ax.axvspan(lo, hi, color="0.9")

# %%
# Hysteresis
# ----------
# Sweeping the drive up and then down through the window, each step
# starting from the last steady state, lands on different branches.

R_sweep = np.linspace(0.9 * lo, 1.1 * hi, 40)
up, down = hysteresis_sweep(mode, 0.0, R_sweep)
ax.plot(R_sweep, up, "k>", ms=3, label="sweep up")
ax.plot(R_sweep, down, "k<", ms=3, mfc="none", label="sweep down")
ax.set(xlabel=r"$R/\gamma$", ylabel=r"$\rho_{ee}$", title="N = 36, a = 0.16 λ")
ax.legend()
fig.tight_layout()
fig.savefig("bistability.png", dpi=120)
