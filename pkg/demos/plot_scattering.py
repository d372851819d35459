"""
Scattered light and its scaling with atom number
================================================

On the cooperative branch the coherently scattered rate grows with N. We
cross-check the closed-form rate against a direct flux integral of the
radiated field, then fit the power law ``n_c ~ N^(1 + alpha)``.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from atomarray import oracles
from atomarray.geometry import build_square_array
from atomarray.meanfield import DriveParams, steady_states
from atomarray.modes import lattice_mode_params
from atomarray.observables import coherent_rate_uniform, general_rate, intensity_scaling_fit

# %%
# Flux through a distant sphere
# -----------------------------

rng = np.random.default_rng(0)
geom = build_square_array(3, 0.2)
coh = 0.3 * (rng.normal(size=9) + 1j * rng.normal(size=9))
print(f"closed form {general_rate(coh, geom):.6f}, far-field flux {oracles.far_field_rate(coh, geom):.6f}")

# %%
# Power-law fit
# -------------

N_vals, rates = [], []
for n in (4, 6, 9, 12, 16, 20, 25, 30, 36):
    mode = lattice_mode_params(0.16, n, "eigen_overlap")
    coop = steady_states(DriveParams(0.1, 0.0), mode)[0]
    N_vals.append(n * n)
    rates.append(coherent_rate_uniform(n * n, mode.gamma_tilde, coop.rho_ge))
fit = intensity_scaling_fit(N_vals, rates)
print(f"alpha = {fit.alpha:.3f}")

fig, ax = plt.subplots(figsize=(5, 3.5))
ax.loglog(N_vals, rates, "o")
ax.loglog(N_vals, fit.prefactor * np.asarray(N_vals, float) ** fit.exponent, "k--",
          label=rf"$N^{{{fit.exponent:.2f}}}$")
ax.set(xlabel="N", ylabel=r"$n_c/\gamma$")
ax.legend()
fig.tight_layout()
fig.savefig("scattering.png", dpi=120)
