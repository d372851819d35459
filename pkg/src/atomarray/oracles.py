"""Independent numerical routes used to validate the closed-form code paths.

Nothing here calls into :mod:`atomarray.kernel` or :mod:`atomarray.crf`;
each oracle rebuilds its quantity from first principles so that agreement
is meaningful.
"""

from __future__ import annotations

import itertools

import numpy as np


def _scalar_green(x, k):
    r = np.linalg.norm(x)
    return np.exp(1j * k * r) / (4 * np.pi * r)


# 4th-order central first-derivative stencil.
_D1 = ((-2, 1.0 / 12), (-1, -8.0 / 12), (1, 8.0 / 12), (2, -1.0 / 12))
# 4th-order central second-derivative stencil.
_D2 = ((-2, -1.0 / 12), (-1, 16.0 / 12), (0, -30.0 / 12), (1, 16.0 / 12), (2, -1.0 / 12))


def kernel_finite_difference(r, dipole, wavelength=1.0, rel_step=1e-3):
    """``xi e_d^* [d_nu d_mu - delta_nu_mu Laplacian] (e^{ikr}/4 pi r) e_d`` by finite differences.

    Every derivative, including the Laplacian, is taken numerically with
    4th-order stencils; ``xi = 6 pi / k^3`` puts the result in units of gamma.
    """
    r = np.asarray(r, dtype=float)
    e = np.asarray(dipole, dtype=complex)
    k = 2 * np.pi / wavelength
    h = rel_step * min(np.linalg.norm(r), wavelength)
    eye = np.eye(3)
    hess = np.zeros((3, 3), dtype=complex)
    for nu in range(3):
        hess[nu, nu] = sum(c * _scalar_green(r + s * h * eye[nu], k) for s, c in _D2) / h**2
        for mu in range(nu + 1, 3):
            val = 0.0
            for (s1, c1), (s2, c2) in itertools.product(_D1, _D1):
                val += c1 * c2 * _scalar_green(r + s1 * h * eye[nu] + s2 * h * eye[mu], k)
            hess[nu, mu] = hess[mu, nu] = val / h**2
    G = hess - np.trace(hess) * eye
    xi = 6 * np.pi / k**3
    return xi * (e.conj() @ G @ e)


def dipole_field(x, sources, moments, k):
    """Total field at points ``x`` radiated by point dipoles (Jackson form).

    ``E = k^2 (n x p) x n e^{ikd}/d + [3 n (n.p) - p](1/d^3 - ik/d^2) e^{ikd}``
    with ``n`` the unit vector from the source to ``x``.
    """
    x = np.atleast_2d(x)
    E = np.zeros(x.shape, dtype=complex)
    for src, p in zip(sources, moments):
        sep = x - src
        d = np.linalg.norm(sep, axis=1)[:, None]
        n = sep / d
        n_dot_p = (n @ p)[:, None]
        far = p - n * n_dot_p  # (n x p) x n
        near = 3 * n * n_dot_p - p
        phase = np.exp(1j * k * d)
        E += k**2 * far * phase / d + near * (1 / d**3 - 1j * k / d**2) * phase
    return E


def far_field_rate(coherences, geom, gamma=1.0, radius=100.0, n_theta=64, n_phi=128, wavelength=1.0):
    """Coherent photon rate from the flux of ``|E|^2`` through a sphere.

    Gauss-Legendre in ``cos(theta)`` times the periodic trapezoid rule in
    ``phi``. Normalised so that a single dipole with ``|rho| = 1`` emits
    ``2 gamma``.
    """
    k = 2 * np.pi / wavelength
    rho = np.asarray(coherences, dtype=complex)
    moments = rho[:, None] * np.asarray(geom.dipole)[None, :]
    mu, w_mu = np.polynomial.legendre.leggauss(n_theta)
    phi = 2 * np.pi * np.arange(n_phi) / n_phi
    MU, PHI = np.meshgrid(mu, phi, indexing="ij")
    ST = np.sqrt(1 - MU**2)
    pts = radius * np.column_stack([(ST * np.cos(PHI)).ravel(), (ST * np.sin(PHI)).ravel(), MU.ravel()])
    E = dipole_field(pts, geom.positions, moments, k)
    intensity = np.sum(np.abs(E) ** 2, axis=1).reshape(MU.shape) * radius**2
    integral = np.sum(w_mu[:, None] * intensity) * (2 * np.pi / n_phi)
    return float(2 * gamma * 3 / (8 * np.pi * k**4) * integral)


# --- brute-force collective master equation -------------------------------

def _qubit_ops(N):
    sm = np.array([[0, 1], [0, 0]], dtype=complex)  # |g><e| with basis (g, e)
    eye = np.eye(2)
    ops = []
    for j in range(N):
        mats = [sm if i == j else eye for i in range(N)]
        out = mats[0]
        for m in mats[1:]:
            out = np.kron(out, m)
        ops.append(out)
    return ops


def dicke_projector(N):
    """Columns: symmetric Dicke states ``|S=N/2, m>`` for ``m = -N/2 .. N/2`` in the 2^N space."""
    dim = 2**N
    cols = []
    for n_exc in range(N + 1):
        v = np.zeros(dim, dtype=complex)
        for idx in range(dim):
            if bin(idx).count("1") == n_exc:
                v[idx] = 1.0
        cols.append(v / np.linalg.norm(v))
    return np.column_stack(cols)


def dicke_liouvillian_bruteforce(N, R, gamma_tilde, decay_prefactor=None):
    """Generator on the Dicke block built from explicit N-qubit operators.

    Collective operators are summed over qubits in the full tensor-product
    space, projected onto the symmetric subspace, and the superoperator is
    assembled column by column by applying the master equation to matrix
    units. Practical for ``N <= 6``.
    """
    c = gamma_tilde / N if decay_prefactor is None else decay_prefactor
    P = dicke_projector(N)
    S_minus = sum(_qubit_ops(N))
    Sm = P.conj().T @ S_minus @ P
    Sp = Sm.conj().T
    Sx = 0.5 * (Sp + Sm)
    d = N + 1
    L = np.zeros((d * d, d * d), dtype=complex)
    for a, b in itertools.product(range(d), range(d)):
        E = np.zeros((d, d), dtype=complex)
        E[a, b] = 1.0
        out = 1j * (2 * R * Sx @ E - E @ (2 * R * Sx))
        out += c * (2 * Sm @ E @ Sp - Sp @ Sm @ E - E @ Sp @ Sm)
        L[:, a * d + b] = out.ravel()
    return L
