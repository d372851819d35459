"""Free-space dipole radiation kernel and the atom-atom interaction matrix.

Rates are in units of the single-atom linewidth gamma and lengths in units
of lambda, so the coupling prefactor xi = 6 pi gamma / k^3 is folded into
the closed form and never appears explicitly.
"""

from __future__ import annotations

import csv
import io

import numpy as np

from .errors import CoincidentAtomsError, DomainError, InvalidArgumentError

# Atoms closer than this (in lambda) are treated as coincident.
COINCIDENCE_TOL = 1e-12


def wavenumber(wavelength=1.0):
    return 2.0 * np.pi / wavelength


def dipole_kernel(r, dipole, wavelength=1.0):
    """Projected radiation kernel ``xi * e_d^* . G(r) . e_d`` in units of gamma.

    Parameters
    ----------
    r : array_like, shape (..., 3)
        Separation vector(s); must be non-zero.
    dipole : array_like, shape (3,)
        Unit dipole orientation (complex components allowed).
    wavelength : float
        Resonance wavelength in the same length unit as ``r``.

    Returns
    -------
    complex or ndarray of complex
        Kernel value(s) with the trailing axis of ``r`` removed.
    """
    r = np.asarray(r, dtype=float)
    if r.shape[-1] != 3:
        raise InvalidArgumentError(f"r must have trailing dimension 3, got {r.shape}")
    e = np.asarray(dipole, dtype=complex)
    dist = np.linalg.norm(r, axis=-1)
    if np.any(dist <= COINCIDENCE_TOL * wavelength):
        raise DomainError("dipole kernel is undefined at r = 0")
    kr = wavenumber(wavelength) * dist
    rhat = r / dist[..., None]
    ee = np.vdot(e, e).real
    er = (rhat @ e.conj()) * (rhat @ e)
    inv = 1.0 / kr
    trans = 1.0 + 1j * inv - inv**2
    longi = -1.0 - 3j * inv + 3.0 * inv**2
    val = 1.5 * np.exp(1j * kr) * inv * (trans * ee + longi * er)
    return val[()] if np.ndim(val) == 0 else val


def interaction_matrix(geom, gamma=1.0):
    """Complex-symmetric matrix ``H`` with ``H_jj = i gamma``.

    Off-diagonal entries are ``dipole_kernel(r_j - r_l)``. Raises
    :class:`CoincidentAtomsError` naming the first coincident pair.
    """
    pos = geom.positions
    n = pos.shape[0]
    diff = pos[:, None, :] - pos[None, :, :]
    dist = np.linalg.norm(diff, axis=-1)
    np.fill_diagonal(dist, np.inf)
    if n > 1 and dist.min() <= COINCIDENCE_TOL:
        j, l = np.unravel_index(np.argmin(dist), dist.shape)
        raise CoincidentAtomsError(min(j, l), max(j, l))
    # Placeholder separation on the diagonal; overwritten below.
    diff[np.arange(n), np.arange(n)] = (1.0, 0.0, 0.0)
    H = gamma * dipole_kernel(diff, geom.dipole)
    H = 0.5 * (H + H.T)
    np.fill_diagonal(H, 1j * gamma)
    return H


def matrix_to_csv(H, path=None):
    """Debug dump of ``H`` as ``j,l,re,im`` rows."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["j", "l", "re", "im"])
    for (j, l), val in np.ndenumerate(H):
        writer.writerow([j, l, f"{val.real:.17g}", f"{val.imag:.17g}"])
    if path is None:
        return buf.getvalue()
    with open(path, "w", newline="") as fh:
        fh.write(buf.getvalue())
    return None
