"""Scattered photon rates, transmission/reflection, and N-scaling fits."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError
from .kernel import interaction_matrix

PHYS_TOL = 1e-10


@dataclass(frozen=True)
class ScatterRates:
    n_c: float
    n_inc_1: float
    n_inc_2: float

    @property
    def total(self):
        return self.n_c + self.n_inc_1 + self.n_inc_2


@dataclass(frozen=True)
class TransmissionResult:
    """Coherent amplitudes with ``t = 1 + r``; ``T_inc`` is the incoherent share."""

    r: complex
    T_inc: float = 0.0

    @property
    def t(self):
        return 1.0 + self.r

    @property
    def T_coh(self):
        return abs(self.t) ** 2

    @property
    def R_coh(self):
        return abs(self.r) ** 2


def coherent_rate_uniform(N, gamma_tilde, rho_ge, gamma=1.0):
    """``2 N (gamma + gamma_tilde) |rho_ge|^2`` for a phase-uniform state."""
    if abs(rho_ge) > 0.5 + PHYS_TOL:
        raise InvalidArgumentError(f"|rho_ge| = {abs(rho_ge)} exceeds 1/2")
    return 2.0 * N * (gamma + gamma_tilde) * abs(rho_ge) ** 2


def general_rate(coherences, geom, gamma=1.0, H=None):
    """Coherent photon rate for arbitrary per-atom coherences ``<sigma_j^->``.

    ``2 gamma sum_j |rho_j|^2 + 2 sum_{j != l} Im[G_jl] conj(rho_j) rho_l``,
    written compactly as ``2 rho^dagger Im(H) rho``.
    """
    rho = np.asarray(coherences, dtype=complex).ravel()
    if rho.size != geom.n_atoms:
        raise InvalidArgumentError(f"expected {geom.n_atoms} coherences, got {rho.size}")
    if H is None:
        H = interaction_matrix(geom, gamma)
    return float(2.0 * np.real(rho.conj() @ (H.imag @ rho)))


def incoherent_rates_uniform(N, gamma_tilde, rho_ee, rho_ge, pair_correlation=None, gamma=1.0):
    """Single-atom and many-atom incoherent rates of a phase-uniform state.

    ``pair_correlation`` is ``<sigma_j^+ sigma_l^->`` for ``j != l``; when
    None the state is taken as factorized and the many-atom term vanishes.
    """
    if not -PHYS_TOL <= rho_ee <= 1 + PHYS_TOL:
        raise InvalidArgumentError(f"rho_ee = {rho_ee} outside [0, 1]")
    coh2 = abs(rho_ge) ** 2
    if coh2 > rho_ee + PHYS_TOL:
        raise InvalidArgumentError("|rho_ge|^2 > rho_ee violates Cauchy-Schwarz")
    n1 = 2.0 * N * gamma * (rho_ee - coh2)
    if pair_correlation is None:
        return n1, 0.0
    pc = complex(pair_correlation)
    if abs(pc.imag) > 1e-8 * max(1.0, abs(pc)):
        raise InvalidArgumentError("pair correlation of a uniform state must be real")
    n2 = 2.0 * N * (gamma + gamma_tilde) * (pc.real - coh2)
    return n1, n2


def scatter_rates_uniform(N, gamma_tilde, rho_ee, rho_ge, pair_correlation=None, gamma=1.0):
    n1, n2 = incoherent_rates_uniform(N, gamma_tilde, rho_ee, rho_ge, pair_correlation, gamma)
    return ScatterRates(coherent_rate_uniform(N, gamma_tilde, rho_ge, gamma), n1, n2)


def dicke_pair_moments(state):
    """``(rho_ee, rho_ge, <sigma_j^+ sigma_l^->)`` of a permutation-symmetric state."""
    obs = state.observables()
    N = state.N
    rho_ee = 0.5 * (1.0 + obs.s_z)
    rho_ge = 0.5 * obs.s_minus
    # <S_+ S_-> = N rho_ee + N (N - 1) <sigma_j^+ sigma_l^->
    total = obs.sp_sm * N**2 / 4.0
    pair = (total - N * rho_ee) / (N * (N - 1)) if N > 1 else abs(rho_ge) ** 2
    return rho_ee, rho_ge, pair


def _linewidth(gamma, gamma_tilde, drop_gamma):
    return gamma_tilde if drop_gamma else gamma + gamma_tilde


def transmission(rho_ge, R, gamma_tilde, gamma=1.0, drop_gamma=False):
    """Reflection ``r = i (gamma + gamma_tilde) rho_ge / R`` and ``t = 1 + r``.

    ``drop_gamma`` neglects the single-atom width next to ``gamma_tilde``.
    """
    if not R > 0:
        raise InvalidArgumentError("transmission is undefined for R <= 0")
    r = 1j * _linewidth(gamma, gamma_tilde, drop_gamma) * complex(rho_ge) / R
    return TransmissionResult(r)


def quantum_transmission(state, R, gamma_tilde, gamma=1.0, drop_gamma=False):
    """Coherent amplitudes from ``<s_->`` plus the incoherent share.

    ``T_inc = ((gamma + gamma_tilde) / 2R)^2 (<s_+ s_-> - |<s_+>|^2)``.
    """
    if not R > 0:
        raise InvalidArgumentError("transmission is undefined for R <= 0")
    obs = state.observables()
    width = _linewidth(gamma, gamma_tilde, drop_gamma)
    r = 1j * width * 0.5 * obs.s_minus / R
    return TransmissionResult(r, float((width / (2.0 * R)) ** 2 * obs.fluctuation))


def lli_coherence(R, Delta, mode, gamma=1.0):
    """Linear-response uniform coherence ``-R / (Delta + omega_tilde + i(gamma + gamma_tilde))``."""
    return -R / complex(Delta + mode.omega_tilde, gamma + mode.gamma_tilde)


@dataclass(frozen=True)
class ScalingFit:
    exponent: float
    prefactor: float
    residual: float

    @property
    def alpha(self):
        return self.exponent - 1.0


def intensity_scaling_fit(N_values, rates, fit_range=None):
    """Least-squares slope of ``log n`` against ``log N``.

    ``fit_range = (N_min, N_max)`` restricts the points used.
    """
    N_values = np.asarray(N_values, dtype=float)
    rates = np.asarray(rates, dtype=float)
    if fit_range is not None:
        keep = (N_values >= fit_range[0]) & (N_values <= fit_range[1])
        N_values, rates = N_values[keep], rates[keep]
    if N_values.size < 4:
        raise InvalidArgumentError("need at least 4 points to fit")
    if np.any(rates <= 0):
        raise InvalidArgumentError("rates must be positive")
    x, y = np.log(N_values), np.log(rates)
    (slope, icpt), res, *_ = np.polyfit(x, y, 1, full=True)
    rms = float(np.sqrt(res[0] / x.size)) if res.size else 0.0
    return ScalingFit(float(slope), float(np.exp(icpt)), rms)


OBSERVABLES_CSV_COLUMNS = [
    "context", "N", "R", "beta", "T_coh", "R_coh", "T_inc", "n_c", "n_inc_1", "n_inc_2", "alpha",
]
