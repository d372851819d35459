"""Cross-method validation suite behind ``atomarray oracle``.

Each check pairs a production code path with an independent route from
:mod:`atomarray.oracles` (or a second algorithm) and reports pass/fail.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import crf, oracles
from .geometry import DisorderSpec, build_square_array, sample_disorder
from .kernel import dipole_kernel, interaction_matrix
from .meanfield import DriveParams, full_ode_steady_state, steady_states
from .modes import eigenmodes, uniform_mode_params
from .observables import general_rate


@dataclass
class CheckResult:
    name: str
    passed: bool
    value: float
    tolerance: float


def check_kernel(n_points=100, seed=1):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_points):
        r = rng.normal(size=3)
        r *= rng.uniform(0.05, 2.0) / np.linalg.norm(r)
        e = rng.normal(size=3) + 1j * rng.normal(size=3)
        e /= np.linalg.norm(e)
        a = dipole_kernel(r, e)
        worst = max(worst, abs(a - oracles.kernel_finite_difference(r, e)) / abs(a))
    return CheckResult("kernel_finite_difference", worst < 1e-6, worst, 1e-6)


def check_trace_identity(n_geoms=5, n_side=10, seed=2):
    geom = build_square_array(n_side, 0.16)
    spec = DisorderSpec(0.2, n_geoms, seed)
    worst, min_width = 0.0, np.inf
    for i in range(n_geoms):
        modes = eigenmodes(interaction_matrix(sample_disorder(geom, spec, i)))
        n = geom.n_atoms
        worst = max(worst, abs(modes.linewidths.sum() - n) / n)
        min_width = min(min_width, modes.linewidths.min())
    ok = worst < 1e-8 and min_width > 0
    return CheckResult("trace_identity_and_passivity", ok, worst, 1e-8)


def check_stability_agreement():
    total = bad = 0
    for a in (0.16, 0.17):
        for n in (2, 3, 4, 5, 6):
            mode = uniform_mode_params(build_square_array(n, a), "eigen_overlap")
            for Delta in np.linspace(-2, 2, 11) * mode.gamma_tilde:
                for R in np.linspace(0.1, 20, 60):
                    for br in steady_states(DriveParams(R, Delta), mode):
                        total += 1
                        bad += br.stable != br.gradient_stable
    return CheckResult("gradient_vs_jacobian_stability", bad == 0, bad / max(total, 1), 0.0)


def check_dicke_generator():
    worst = 0.0
    for N in (1, 2, 3, 4):
        A = crf.dicke_liouvillian(N, 0.37, 1.3).toarray()
        B = oracles.dicke_liouvillian_bruteforce(N, 0.37, 1.3)
        worst = max(worst, np.abs(A - B).max())
    return CheckResult("dicke_generator_bruteforce", worst < 1e-12, worst, 1e-12)


def check_steady_state_methods(N=10):
    worst = 0.0
    for beta in (0.3, 1.0, 2.5):
        a = crf.dicke_steady_state(N, beta / 2, 1.0, "nullspace").observables().as_array()
        b = crf.dicke_steady_state(N, beta / 2, 1.0, "propagation").observables().as_array()
        worst = max(worst, np.abs(a - b).max())
    return CheckResult("nullspace_vs_propagation", worst < 1e-8, worst, 1e-8)


def check_far_field(seed=3):
    rng = np.random.default_rng(seed)
    geom = build_square_array(3, 0.2)
    coh = 0.3 * (rng.normal(size=9) + 1j * rng.normal(size=9))
    a = general_rate(coh, geom)
    b = oracles.far_field_rate(coh, geom)
    rel = abs(a - b) / abs(b)
    return CheckResult("coherent_rate_far_field", rel < 0.01, rel, 0.01)


def check_uniform_ansatz():
    geom = build_square_array(4, 0.17)
    mode = uniform_mode_params(geom, "site_averaged")
    drive = DriveParams(0.1 * mode.gamma_tilde, 0.0)
    predicted = steady_states(drive, mode)[0].rho_ee
    _, ree, ok = full_ode_steady_state(geom, drive)
    rel = abs(ree.mean() - predicted) / predicted
    return CheckResult("uniform_ansatz_vs_full_ode", ok and rel < 0.1, rel, 0.1)


CHECKS = (
    check_kernel,
    check_trace_identity,
    check_stability_agreement,
    check_dicke_generator,
    check_steady_state_methods,
    check_far_field,
    check_uniform_ansatz,
)


def run_all():
    return [check() for check in CHECKS]
