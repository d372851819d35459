"""
Cooperative resonance fluorescence
==================================

When the collective width dominates the single-atom width, the array
behaves like one large spin. Mean field predicts a sharp transition at
``beta = 2R / gamma_tilde = 1``, where the spin stops pointing down and the
array turns from a mirror into a partial transmitter. The exact solution on
the Dicke manifold rounds the transition off at finite N.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from atomarray.crf import crf_branches, dicke_steady_state, mean_field_s_z
from atomarray.observables import quantum_transmission, transmission

gt = 50.0
betas = np.linspace(0.05, 3.0, 60)

fig, (ax_z, ax_t) = plt.subplots(1, 2, figsize=(9, 3.5))
ax_z.plot(betas, mean_field_s_z(betas), "k", label="mean field")
mf_t = [transmission(0.5 * crf_branches(b * gt / 2, gt)[0].state.s_minus, b * gt / 2, gt,
                     drop_gamma=True).T_coh for b in betas]
ax_t.plot(betas, mf_t, "k", label="mean field")

# %%
# Exact steady states for a few atom numbers. The sparse nullspace solve on
# the (N+1)^2 density-matrix entries takes well under a second here.

for N in (10, 25, 50, 80):
    states = [dicke_steady_state(N, b * gt / 2, gt) for b in betas]
    ax_z.plot(betas, [s.observables().s_z for s in states], label=f"N = {N}")
    ax_t.plot(betas, [quantum_transmission(s, b * gt / 2, gt, drop_gamma=True).T_coh
                      for s, b in zip(states, betas)], label=f"N = {N}")

ax_z.set(xlabel=r"$\beta$", ylabel=r"$\langle s_z\rangle$")
ax_t.set(xlabel=r"$\beta$", ylabel=r"$|t|^2$")
ax_t.legend(fontsize=8)
fig.tight_layout()
fig.savefig("crf_transition.png", dpi=120)
