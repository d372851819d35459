"""Cooperative resonance fluorescence of the phase-uniform mode.

Two levels of description:

* the pseudospin-conserving mean-field equations for the scaled collective
  spin ``s_z = 2<S_z>/N`` and ``s_- = 2<S_->/N``;
* the collective-spin master equation on the ``S = N/2`` Dicke manifold,
  driven by ``2 R S_x`` and decaying collectively through ``S_-``.

Spin conventions: ``s_- = s_x - i s_y`` and ``s_+ = conj(s_-)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.integrate import solve_ivp

from .errors import DomainError, InvalidArgumentError, NumericalError, StiffnessError

DEFAULT_MAX_N = 120
AGREEMENT_TOL = 1e-8


@dataclass(frozen=True)
class SpinState:
    s_z: float
    s_minus: complex
    radius: float = 1.0

    def __post_init__(self):
        if not 0 < self.radius <= 1:
            raise InvalidArgumentError(f"radius must lie in (0, 1], got {self.radius}")
        if self.s_z**2 + abs(self.s_minus) ** 2 > self.radius**2 + 1e-10:
            raise InvalidArgumentError("state lies outside the Bloch sphere of the given radius")

    @property
    def s_x(self):
        return self.s_minus.real

    @property
    def s_y(self):
        return -self.s_minus.imag

    @property
    def norm2(self):
        return self.s_z**2 + abs(self.s_minus) ** 2


@dataclass(frozen=True)
class CrfBranch:
    """Mean-field stationary state and the detuning that makes it one."""

    state: SpinState
    branch: int
    Delta: float
    beta: float


def crf_branches(R, gamma_tilde, omega_tilde=0.0, s=1.0):
    """Stationary pseudospin states at the collective resonance ``Delta = s_z omega_tilde``.

    For ``beta = 2R/gamma_tilde <= s`` the single branch-1 state
    ``s_- = i beta``, ``s_z = -sqrt(s^2 - beta^2)`` is returned. Above, the
    two saturated branch-2 states ``s_z = 0``,
    ``s_- = i s^2/beta +/- sqrt(s^2 - s^4/beta^2)`` are returned (``+`` first).
    """
    if gamma_tilde == 0:
        raise DomainError("gamma_tilde must be non-zero")
    if R < 0 or gamma_tilde < 0:
        raise InvalidArgumentError("R and gamma_tilde must be non-negative")
    beta = 2.0 * R / gamma_tilde
    if beta <= s:
        sz = -np.sqrt(s * s - beta * beta)
        return [CrfBranch(SpinState(sz, 1j * beta, s), 1, sz * omega_tilde, beta)]
    root = np.sqrt(s * s - s**4 / beta**2)
    out = []
    for sign in (1.0, -1.0):
        out.append(CrfBranch(SpinState(0.0, complex(sign * root, s * s / beta), s), 2, 0.0, beta))
    return out


def mean_field_s_z(beta, s=1.0):
    """``s_z`` on the stable mean-field branch as a function of ``beta``."""
    beta = np.asarray(beta, dtype=float)
    return np.where(beta <= s, -np.sqrt(np.clip(s * s - beta**2, 0, None)), 0.0)


def crf_rhs(R, omega_tilde, gamma_tilde, Delta):
    kappa = complex(omega_tilde, gamma_tilde)

    def rhs(t, y):
        sm = complex(y[0], y[1])
        sz = y[2]
        dsm = 1j * Delta * sm - 1j * sz * (2 * R + kappa * sm)
        dsz = (1j * R * (sm.conjugate() - sm)).real - gamma_tilde * abs(sm) ** 2
        return [dsm.real, dsm.imag, dsz]

    return rhs


@dataclass
class SpinTrajectory:
    t: np.ndarray
    s_minus: np.ndarray
    s_z: np.ndarray

    @property
    def norm2(self):
        return self.s_z**2 + np.abs(self.s_minus) ** 2

    @property
    def max_drift(self):
        return float(np.max(np.abs(self.norm2 - self.norm2[0])))


def integrate_crf_ode(R, omega_tilde, gamma_tilde, Delta, initial, t_end, n_out=1001,
                      rtol=1e-12, atol=1e-13, drift_tol=1e-6):
    """Integrate the pseudospin equations and monitor ``s_z^2 + |s_-|^2``.

    Raises :class:`NumericalError` if the conserved radius drifts by more
    than ``drift_tol`` at any output time.
    """
    if not t_end > 0:
        raise InvalidArgumentError("t_end must be positive")
    y0 = [initial.s_minus.real, initial.s_minus.imag, initial.s_z]
    sol = solve_ivp(crf_rhs(R, omega_tilde, gamma_tilde, Delta), (0.0, t_end), y0,
                    method="DOP853", rtol=rtol, atol=atol, t_eval=np.linspace(0.0, t_end, n_out))
    if sol.status < 0:
        raise StiffnessError(sol.message)
    traj = SpinTrajectory(sol.t, sol.y[0] + 1j * sol.y[1], sol.y[2])
    if traj.max_drift > drift_tol:
        raise NumericalError(f"pseudospin radius drifted by {traj.max_drift:.3e}")
    return traj


# --- collective-spin master equation -------------------------------------

def dicke_operators(N):
    """Sparse ``S_+, S_-, S_z`` on the ``S = N/2`` manifold.

    Basis index ``i`` corresponds to ``m = i - N/2``.
    """
    if N < 1:
        raise InvalidArgumentError("N must be >= 1")
    S = N / 2.0
    m = np.arange(N + 1) - S
    ladder = np.sqrt(S * (S + 1) - m[:-1] * (m[:-1] + 1))
    s_plus = sp.diags(ladder, -1, shape=(N + 1, N + 1), format="csr", dtype=complex)
    s_minus = s_plus.T.tocsr()
    s_z = sp.diags(m, 0, format="csr", dtype=complex)
    return s_plus, s_minus, s_z


def dicke_liouvillian(N, R, gamma_tilde, decay_prefactor=None, detuning=0.0):
    """Sparse generator acting on row-major ``vec(rho)``.

    ``d rho/dt = i[2R S_x + detuning S_z, rho]
    + c (2 S_- rho S_+ - S_+ S_- rho - rho S_+ S_-)``.

    The default ``c = gamma_tilde / N`` makes the large-N mean field coincide
    with the pseudospin equations; pass ``decay_prefactor`` to override.
    ``detuning`` is an exploratory extension and is zero at collective
    resonance.
    """
    if gamma_tilde < 0:
        raise InvalidArgumentError("gamma_tilde must be >= 0")
    c = gamma_tilde / N if decay_prefactor is None else decay_prefactor
    s_plus, s_minus, s_z = dicke_operators(N)
    eye = sp.identity(N + 1, dtype=complex, format="csr")
    H = R * (s_plus + s_minus) + detuning * s_z
    sps = (s_plus @ s_minus).tocsr()
    L = 1j * (sp.kron(H, eye) - sp.kron(eye, H.T))
    L = L + c * (2 * sp.kron(s_minus, s_plus.T) - sp.kron(sps, eye) - sp.kron(eye, sps.T))
    return L.tocsr()


@dataclass(frozen=True)
class CrfObservables:
    s_z: float
    s_x: float
    s_y: float
    sp_sm: float
    sz2: float

    @property
    def coherent(self):
        """``|<s_+>|^2``."""
        return self.s_x**2 + self.s_y**2

    @property
    def fluctuation(self):
        """``<s_+ s_-> - |<s_+>|^2``."""
        return self.sp_sm - self.coherent

    @property
    def s_minus(self):
        return complex(self.s_x, -self.s_y)

    def as_array(self):
        return np.array([self.s_z, self.s_x, self.s_y, self.sp_sm, self.sz2])


@dataclass
class DickeState:
    rho: np.ndarray
    N: int

    def expect(self, op):
        op = op.toarray() if sp.issparse(op) else op
        return complex(np.trace(op @ self.rho))

    def observables(self):
        s_plus, s_minus, s_z = dicke_operators(self.N)
        n = self.N
        sz = 2 * self.expect(s_z).real / n
        sm = 2 * self.expect(s_minus) / n
        sp_sm = 4 * self.expect(s_plus @ s_minus).real / n**2
        sz2 = 4 * self.expect(s_z @ s_z).real / n**2
        return CrfObservables(sz, sm.real, -sm.imag, sp_sm, sz2)

    def invariant_errors(self):
        """``(|tr - 1|, hermiticity defect, -min eigenvalue)``."""
        herm = np.max(np.abs(self.rho - self.rho.conj().T))
        evals = np.linalg.eigvalsh(0.5 * (self.rho + self.rho.conj().T))
        return abs(np.trace(self.rho) - 1.0), float(herm), float(-min(evals.min(), 0.0))

    def check_invariants(self, trace_tol=1e-10, herm_tol=1e-10, pos_tol=1e-8):
        tr, herm, neg = self.invariant_errors()
        if tr > trace_tol or herm > herm_tol or neg > pos_tol:
            raise NumericalError(f"invalid density matrix: trace err {tr:.2e}, "
                                 f"hermiticity {herm:.2e}, negativity {neg:.2e}")


def casimir_sp_sm_plus_sz2(N, s_z):
    """``<s_+ s_-> + <s_z^2>`` implied by ``S^2 = S(S+1)`` on the Dicke manifold."""
    return 1.0 + 2.0 / N + 2.0 * s_z / N


def _trace_row(d):
    row = np.zeros(d * d, dtype=complex)
    row[:: d + 1] = 1.0
    return row


def _nullspace(L, d, backend):
    rhs = np.zeros(d * d, dtype=complex)
    rhs[0] = 1.0
    if backend == "dense":
        A = L.toarray()
        A[0, :] = _trace_row(d)
        return np.linalg.solve(A, rhs)
    A = L.tolil()
    A[0, :] = _trace_row(d)
    return spla.spsolve(A.tocsc(), rhs)


def _propagate(L, d, t_end, n_steps):
    # Backward Euler: L-stable, so large steps damp every decaying mode and
    # leave the stationary state untouched.
    h = t_end / n_steps
    lu = spla.splu((sp.identity(d * d, dtype=complex, format="csc") - h * L).tocsc())
    x = np.zeros(d * d, dtype=complex)
    x[0] = 1.0  # all atoms in the ground state
    for _ in range(n_steps):
        x = lu.solve(x)
    return x / np.sum(x[:: d + 1])


def dicke_steady_state(N, R, gamma_tilde, method="nullspace", backend="sparse",
                       max_N=DEFAULT_MAX_N, decay_prefactor=None, t_end=None, n_steps=400,
                       residual_tol=1e-8):
    """Stationary density matrix of the collective master equation.

    Parameters
    ----------
    method : {"nullspace", "propagation", "both"}
        ``nullspace`` solves ``L vec(rho) = 0`` with the trace condition in
        place of the first row. ``propagation`` time-steps from the ground
        state to ``t_end`` (default ``50 N / gamma_tilde``) and checks
        ``|L vec(rho)|``. ``both`` runs the two and raises
        :class:`NumericalError` if any observable differs by more than 1e-8.
    backend : {"sparse", "dense"}
        Linear-algebra backend for the nullspace solve.
    """
    if N > max_N:
        raise InvalidArgumentError(f"N={N} exceeds max_N={max_N}")
    if gamma_tilde <= 0:
        raise InvalidArgumentError("gamma_tilde must be positive")
    if method not in ("nullspace", "propagation", "both"):
        raise InvalidArgumentError(f"unknown method {method!r}")
    d = N + 1
    L = dicke_liouvillian(N, R, gamma_tilde, decay_prefactor)
    states = {}
    if method in ("nullspace", "both"):
        states["nullspace"] = DickeState(_nullspace(L, d, backend).reshape(d, d), N)
    if method in ("propagation", "both"):
        if t_end is None:
            t_end = 50.0 * N / gamma_tilde
        x = _propagate(L, d, t_end, n_steps)
        res = np.linalg.norm(L @ x)
        if res > residual_tol * max(1.0, gamma_tilde):
            raise NumericalError(f"propagation not stationary: |L rho| = {res:.3e}")
        states["propagation"] = DickeState(x.reshape(d, d), N)
    if method == "both":
        a = states["nullspace"].observables().as_array()
        b = states["propagation"].observables().as_array()
        gap = np.max(np.abs(a - b))
        if gap > AGREEMENT_TOL:
            raise NumericalError(f"nullspace and propagation disagree by {gap:.3e}")
        return states["nullspace"]
    return states[method]


CRF_CSV_COLUMNS = ["N", "R_over_gamma_tilde", "s_z", "s_x", "s_y", "coh_sp_sm", "fluct_sp_sm", "method"]
