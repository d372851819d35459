"""Uniform-ansatz steady states, bistability, and the per-atom ODE oracle.

With every atom equally driven and a phase-uniform response, the effective
Rabi frequency is ``R_eff = R + kappa * rho_ge`` with
``kappa = omega_tilde + i gamma_tilde``. Its squared modulus ``X`` solves a
cubic; up to three real roots exist, the middle one unstable.

All rates are in units of gamma unless ``gamma`` is passed explicitly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .errors import InvalidArgumentError, NumericalError, StiffnessError
from .geometry import build_square_array
from .kernel import interaction_matrix
from .modes import uniform_mode_params

REAL_ROOT_TOL = 1e-9
MARGINAL_TOL = 1e-6


@dataclass(frozen=True)
class DriveParams:
    """Incident Rabi frequency ``R`` (real, >= 0) and detuning ``Delta``."""

    R: float
    Delta: float = 0.0

    def __post_init__(self):
        if not (np.isreal(self.R) and self.R >= 0):
            raise InvalidArgumentError(f"R must be real and >= 0, got {self.R}")


@dataclass(frozen=True)
class JacobianVerdict:
    stable: bool | None
    eigenvalues: np.ndarray
    marginal: bool


@dataclass(frozen=True)
class SteadyStateBranch:
    """One root of the uniform steady-state problem.

    ``stable`` is the Jacobian verdict (None when marginal);
    ``gradient_stable`` is the sign test on ``d|R|^2 / dX``.
    """

    X: float
    R_eff: complex
    rho_ge: complex
    rho_ee: float
    stable: bool | None
    gradient_stable: bool
    residual: float
    marginal: bool = False
    jacobian_eigenvalues: np.ndarray = field(default=None, repr=False)
    stability_method: str = "jacobian"

    @property
    def s_z(self):
        return 2.0 * self.rho_ee - 1.0


def cooperativity(drive, mode, gamma=1.0):
    """``C = (omega_tilde + i gamma_tilde) / (2 (Delta + i gamma))``."""
    return mode.kappa / (2.0 * complex(drive.Delta, gamma))


def _pw(drive, mode, gamma):
    D = drive.Delta**2 + gamma**2
    # 2 C D = kappa (Delta - i gamma)
    w = mode.kappa * complex(drive.Delta, -gamma)
    return D, w, D + w


def cubic_coefficients(drive, mode, gamma=1.0):
    """Monic coefficients ``[1, c2, c1, c0]`` of the cubic in ``X = |R_eff|^2``.

    Obtained from ``R^2 (D + 2X)^2 = X |D + 2X + 2CD|^2`` with
    ``D = Delta^2 + gamma^2``.
    """
    D, _, p = _pw(drive, mode, gamma)
    R2 = float(drive.R) ** 2
    return np.array([1.0, p.real - R2, abs(p) ** 2 / 4.0 - D * R2, -R2 * D**2 / 4.0])


def drive_of_X(X, drive, mode, gamma=1.0):
    """``|R|^2`` that produces a given ``X``; the inverse map of the cubic."""
    D, _, p = _pw(drive, mode, gamma)
    X = np.asarray(X, dtype=float)
    return X * np.abs(p + 2 * X) ** 2 / (D + 2 * X) ** 2


def _gradient_numerator(X, D, p):
    # d|R|^2/dX = B(X) / (D + 2X)^3
    return 8 * X**3 + 12 * D * X**2 + (8 * p.real * D - 2 * abs(p) ** 2) * X + abs(p) ** 2 * D


def _polish(coef, x):
    for _ in range(6):
        f = ((x + coef[1]) * x + coef[2]) * x + coef[3]
        df = (3 * x + 2 * coef[1]) * x + coef[2]
        if df == 0:
            break
        step = f / df
        x -= step
        if abs(step) <= 1e-16 * max(1.0, abs(x)):
            break
    return x


def uniform_jacobian(rho_ge, rho_ee, drive, mode, gamma=1.0):
    """Jacobian of the uniform system in ``(Re rho_ge, Im rho_ge, rho_ee)``."""
    kappa = mode.kappa
    s = 2.0 * rho_ee - 1.0
    E = drive.R + kappa * rho_ge
    a = complex(-gamma, drive.Delta) - 1j * kappa * s
    dq_dw = -2j * E
    u, v = rho_ge.real, rho_ge.imag
    gt = mode.gamma_tilde
    return np.array([
        [a.real, -a.imag, dq_dw.real],
        [a.imag, a.real, dq_dw.imag],
        [-4 * gt * u, 2 * drive.R - 4 * gt * v, -2 * gamma],
    ])


def uniform_rhs(drive, mode, gamma=1.0):
    """Right-hand side of the uniform three-variable ODE."""
    kappa = mode.kappa

    def rhs(t, y):
        q = complex(y[0], y[1])
        E = drive.R + kappa * q
        dq = complex(-gamma, drive.Delta) * q - 1j * (2 * y[2] - 1) * E
        dw = -2 * gamma * y[2] + 2 * (E.conjugate() * q).imag
        return [dq.real, dq.imag, dw]

    return rhs


def jacobian_stability(branch, drive, mode, gamma=1.0):
    """Linear stability of a fixed point of the uniform ODE.

    Stable iff every eigenvalue has negative real part; a largest real part
    within ``MARGINAL_TOL`` is reported as marginal with ``stable=None``.
    """
    if branch.residual > 1e-8 * max(1.0, drive.R):
        raise InvalidArgumentError(f"branch residual {branch.residual:.3e} too large")
    J = uniform_jacobian(branch.rho_ge, branch.rho_ee, drive, mode, gamma)
    ev = np.linalg.eigvals(J)
    top = ev.real.max()
    if abs(top) < MARGINAL_TOL * gamma:
        return JacobianVerdict(None, ev, True)
    return JacobianVerdict(bool(top < 0), ev, False)


def steady_states(drive, mode, gamma=1.0):
    """All physical roots, sorted by ``X``, with both stability verdicts."""
    coef = cubic_coefficients(drive, mode, gamma)
    D, w, p = _pw(drive, mode, gamma)
    scale = max(1.0, float(drive.R) ** 2)
    raw = np.roots(coef)
    xs = []
    for z in raw:
        if abs(z.imag) < REAL_ROOT_TOL * (1 + abs(z.real)) * scale:
            x = _polish(coef, float(z.real))
            if x < 0 and x > -1e-12 * scale:
                x = 0.0
            if x >= 0:
                xs.append(x)
    if not xs:
        raise NumericalError(f"no non-negative root for {drive}, {mode}")
    xs.sort()
    merged = [xs[0]]
    for x in xs[1:]:
        if abs(x - merged[-1]) > 1e-12 * max(1.0, x):
            merged.append(x)
    near_double = len(merged) < len(xs)
    branches = []
    for x in merged:
        den = D + 2 * x
        R_eff = drive.R / (1 + w / den)
        X_eff = abs(R_eff) ** 2
        residual = abs(drive.R - R_eff * (1 + w / (D + 2 * X_eff)))
        rho_ge = R_eff * complex(-drive.Delta, gamma) / den
        rho_ee = x / den
        grad = _gradient_numerator(x, D, p) / den**3
        grad_marginal = abs(grad) < MARGINAL_TOL * max(1.0, abs(p) ** 2 / D**2)
        br = SteadyStateBranch(x, R_eff, rho_ge, rho_ee, None, bool(grad > 0), residual)
        verdict = jacobian_stability(br, drive, mode, gamma)
        branches.append(SteadyStateBranch(
            X=x, R_eff=R_eff, rho_ge=rho_ge, rho_ee=rho_ee,
            stable=verdict.stable, gradient_stable=bool(grad > 0), residual=residual,
            marginal=verdict.marginal or grad_marginal or near_double,
            jacobian_eigenvalues=verdict.eigenvalues,
        ))
    return branches


def bistability_window(mode, Delta, gamma=1.0):
    """Range ``(R_lo, R_hi)`` of incident amplitudes with three roots, or None.

    Three roots exist exactly when the map ``X -> |R|^2`` has a local
    maximum and minimum on ``X > 0``.
    """
    drive = DriveParams(0.0, Delta)
    D, _, p = _pw(drive, mode, gamma)
    crit = np.roots([8.0, 12 * D, 8 * p.real * D - 2 * abs(p) ** 2, abs(p) ** 2 * D])
    xs = sorted(z.real for z in crit if abs(z.imag) < REAL_ROOT_TOL * (1 + abs(z.real)) and z.real > 0)
    if len(xs) < 2:
        return None
    hi, lo = np.sqrt(drive_of_X(np.array(xs[:2]), drive, mode, gamma))
    if not hi > lo:
        return None
    return float(lo), float(hi)


@dataclass
class BistabilityEntry:
    N: int
    Delta: float
    mode: object
    window: tuple | None
    R_hits: np.ndarray

    @property
    def bistable(self):
        return self.window is not None


@dataclass
class BistabilityReport:
    a: float
    entries: list

    def for_N(self, N):
        return [e for e in self.entries if e.N == N]

    def bistable_detunings(self, N):
        return [e.Delta for e in self.for_N(N) if e.bistable]

    @property
    def critical_N(self):
        hits = sorted({e.N for e in self.entries if e.bistable})
        return hits[0] if hits else None

    def common_detunings(self, N_values):
        """Detunings at which every listed ``N`` has a three-root window."""
        sets = [set(self.bistable_detunings(N)) for N in N_values]
        return sorted(set.intersection(*sets)) if sets else []


def default_detuning_grid(gamma_tilde, n=81):
    """Symmetric grid over ``[-2 gamma_tilde, 2 gamma_tilde]``; odd ``n`` keeps 0."""
    return np.linspace(-2.0, 2.0, n) * gamma_tilde


def bistability_scan(a, N_list, Delta_grid=None, R_grid=None, method="eigen_overlap",
                     modes=None, dipole=None, gamma=1.0):
    """Locate three-root windows over ``(N, Delta)``.

    ``Delta_grid`` is absolute (units of gamma); each ``N`` only uses the
    detunings with ``|Delta| <= 2 gamma_tilde(N)``. When omitted the grid
    spans the largest ``gamma_tilde`` over the scan. ``modes`` may map
    ``N`` to precomputed (e.g. disorder-averaged) parameters.
    """
    if len(N_list) == 0:
        raise InvalidArgumentError("N_list must be non-empty")
    params = {}
    for N in N_list:
        if modes is not None and N in modes:
            params[N] = modes[N]
            continue
        n_side = int(round(np.sqrt(N)))
        if n_side * n_side != N:
            raise InvalidArgumentError(f"N={N} is not a perfect square")
        geom = build_square_array(n_side, a) if dipole is None else build_square_array(n_side, a, dipole)
        params[N] = uniform_mode_params(geom, method, gamma)
    if Delta_grid is None:
        Delta_grid = default_detuning_grid(max(p.gamma_tilde for p in params.values()))
    Delta_grid = np.asarray(Delta_grid, dtype=float)
    R_grid = np.asarray([] if R_grid is None else R_grid, dtype=float)
    entries = []
    for N in N_list:
        mode = params[N]
        for Delta in Delta_grid:
            if abs(Delta) > 2 * abs(mode.gamma_tilde) + 1e-12:
                continue
            window = bistability_window(mode, Delta, gamma)
            hits = R_grid[(R_grid >= window[0]) & (R_grid <= window[1])] if window else R_grid[:0]
            entries.append(BistabilityEntry(N, float(Delta), mode, window, hits))
    return BistabilityReport(a, entries)


MEANFIELD_CSV_COLUMNS = [
    "a_over_lambda", "N", "Delta", "R", "branch_index", "X", "re_Reff", "im_Reff",
    "re_rho_ge", "im_rho_ge", "rho_ee", "s_z", "stable",
]


# --- time evolution -------------------------------------------------------

@dataclass
class Trajectory:
    t: np.ndarray
    rho_ge: np.ndarray
    rho_ee: np.ndarray

    @property
    def final_rho_ge(self):
        return self.rho_ge[-1]

    @property
    def final_rho_ee(self):
        return self.rho_ee[-1]


def _solve(rhs, t_end, y0, rtol, atol, t_eval=None):
    sol = solve_ivp(rhs, (0.0, t_end), y0, method="DOP853", rtol=rtol, atol=atol, t_eval=t_eval)
    if sol.status < 0:
        raise StiffnessError(f"integration failed ({sol.message}); loosen rtol/atol or shorten t_end")
    return sol


def full_ode_rhs(geom, drive, gamma=1.0):
    """Per-atom semiclassical equations, state ``[Re rho_ge, Im rho_ge, rho_ee]``."""
    coupling = interaction_matrix(geom, gamma)
    np.fill_diagonal(coupling, 0.0)
    n = geom.n_atoms
    decay = complex(-gamma, drive.Delta)

    def rhs(t, y):
        q = y[:n] + 1j * y[n:2 * n]
        w = y[2 * n:]
        E = drive.R + coupling @ q
        dq = decay * q - 1j * (2 * w - 1) * E
        dw = -2 * gamma * w + 2 * (E.conj() * q).imag
        return np.concatenate([dq.real, dq.imag, dw])

    return rhs


def _initial_full(n, initial):
    if initial is None:
        return np.zeros(3 * n)
    q, w = initial
    q = np.broadcast_to(np.asarray(q, dtype=complex), (n,))
    w = np.broadcast_to(np.asarray(w, dtype=float), (n,))
    if np.any(w < 0) or np.any(w > 1):
        raise InvalidArgumentError("initial rho_ee must lie in [0, 1]")
    return np.concatenate([q.real, q.imag, w])


def integrate_full_ode(geom, drive, t_end, initial=None, rtol=1e-9, atol=1e-12, n_out=201, gamma=1.0):
    """Integrate the coupled N-atom equations from ``initial = (rho_ge, rho_ee)``.

    Atoms start in the ground state when ``initial`` is None.
    """
    if not t_end > 0:
        raise InvalidArgumentError("t_end must be positive")
    n = geom.n_atoms
    y0 = _initial_full(n, initial)
    sol = _solve(full_ode_rhs(geom, drive, gamma), t_end, y0, rtol, atol,
                 np.linspace(0.0, t_end, n_out))
    y = sol.y.T
    return Trajectory(sol.t, y[:, :n] + 1j * y[:, n:2 * n], y[:, 2 * n:])


def relax_to_steady_state(rhs, y0, tol=1e-8, chunk=20.0, max_time=5000.0, rtol=1e-9, atol=1e-12):
    """Integrate in chunks until ``|dy/dt| < tol``; returns ``(y, t, converged)``."""
    y = np.asarray(y0, dtype=float)
    t = 0.0
    while t < max_time:
        if np.linalg.norm(rhs(t, y)) < tol:
            return y, t, True
        y = _solve(rhs, chunk, y, rtol, atol).y[:, -1]
        t += chunk
    return y, t, bool(np.linalg.norm(rhs(t, y)) < tol)


def full_ode_steady_state(geom, drive, initial=None, tol=1e-8, chunk=20.0, max_time=5000.0, gamma=1.0):
    """Relax the N-atom system; returns ``(rho_ge, rho_ee, converged)`` per atom."""
    n = geom.n_atoms
    y, _, ok = relax_to_steady_state(full_ode_rhs(geom, drive, gamma), _initial_full(n, initial),
                                     tol, chunk, max_time)
    return y[:n] + 1j * y[n:2 * n], y[2 * n:], ok


def integrate_uniform_ode(drive, mode, t_end, initial=(0.0, 0.0), rtol=1e-9, atol=1e-12,
                          n_out=201, gamma=1.0):
    """Integrate the uniform-ansatz equations (one representative atom)."""
    q, w = initial
    sol = _solve(uniform_rhs(drive, mode, gamma), t_end, [complex(q).real, complex(q).imag, float(w)],
                 rtol, atol, np.linspace(0.0, t_end, n_out))
    return Trajectory(sol.t, sol.y[0] + 1j * sol.y[1], sol.y[2])


def uniform_ode_steady_state(drive, mode, initial=(0.0, 0.0), tol=1e-8, chunk=20.0,
                             max_time=5000.0, gamma=1.0):
    q, w = initial
    y, _, ok = relax_to_steady_state(uniform_rhs(drive, mode, gamma),
                                     [complex(q).real, complex(q).imag, float(w)], tol, chunk, max_time)
    return complex(y[0], y[1]), float(y[2]), ok


def hysteresis_sweep(mode, Delta, R_values, gamma=1.0, tol=1e-8):
    """Adiabatic up- and down-sweeps of the uniform ODE over ``R_values``.

    Each point starts from the previous point's steady state. Returns the
    ``rho_ee`` arrays for the upward and downward passes (aligned with
    ``R_values``).
    """
    R_values = np.asarray(R_values, dtype=float)
    state = (0.0, 0.0)
    up = []
    for R in R_values:
        q, w, _ = uniform_ode_steady_state(DriveParams(R, Delta), mode, state, tol, gamma=gamma)
        state = (q, w)
        up.append(w)
    down = []
    for R in R_values[::-1]:
        q, w, _ = uniform_ode_steady_state(DriveParams(R, Delta), mode, state, tol, gamma=gamma)
        state = (q, w)
        down.append(w)
    return np.array(up), np.array(down[::-1])
