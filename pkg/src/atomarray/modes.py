"""Low-light-intensity collective eigenmodes and the phase-uniform mode.

The phase-uniform mode is summarised by its collective line shift
``omega_tilde`` and the self-interaction linewidth ``gamma_tilde`` (total
linewidth ``gamma + gamma_tilde``). Two estimators are provided:

``site_averaged``
    Rayleigh quotient of ``H - i gamma`` with the uniform vector, i.e. the
    kernel sum felt by an atom averaged over all sites.
``eigen_overlap``
    Eigenvalue (minus ``i gamma``) of the eigenmode with the largest
    overlap with the uniform vector.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError, NumericalError
from .geometry import build_square_array, min_pair_distance, sample_disorder
from .kernel import COINCIDENCE_TOL, interaction_matrix, wavenumber

METHODS = ("site_averaged", "eigen_overlap")


@dataclass(frozen=True)
class UniformModeParams:
    """Collective shift and self-interaction linewidth, units of gamma."""

    omega_tilde: float
    gamma_tilde: float
    n_atoms: int
    method: str = "site_averaged"
    overlap: float = 1.0

    @property
    def kappa(self):
        """Complex self-interaction ``omega_tilde + i gamma_tilde``."""
        return complex(self.omega_tilde, self.gamma_tilde)


@dataclass(frozen=True)
class ModeSpectrum:
    """Eigen-decomposition of an interaction matrix.

    ``eigenvectors[:, j]`` belongs to ``eigenvalues[j] = delta_j + i upsilon_j``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    uniform_overlap: np.ndarray

    @property
    def shifts(self):
        return self.eigenvalues.real

    @property
    def linewidths(self):
        return self.eigenvalues.imag

    @property
    def uniform_index(self):
        return int(np.argmax(self.uniform_overlap))


@dataclass(frozen=True)
class DisorderedModeStats:
    omega_tilde: float
    gamma_tilde: float
    stderr_omega: float
    stderr_gamma: float
    n_samples: int
    eta: float
    method: str
    omega_samples: np.ndarray
    gamma_samples: np.ndarray
    overlap_samples: np.ndarray
    n_resampled: int = 0

    def as_params(self, n_atoms):
        """Ensemble means packaged for the mean-field solvers."""
        return UniformModeParams(self.omega_tilde, self.gamma_tilde, n_atoms, self.method,
                                 float(np.mean(self.overlap_samples)))


def eigenmodes(H):
    """Full eigen-decomposition with overlaps against the uniform vector."""
    H = np.asarray(H, dtype=complex)
    n = H.shape[0]
    try:
        vals, vecs = np.linalg.eig(H)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(
            f"eigensolver failed for {n}x{n} matrix (condition number {np.linalg.cond(H):.3e})"
        ) from exc
    norms = np.sum(np.abs(vecs) ** 2, axis=0)
    overlap = np.abs(vecs.sum(axis=0)) ** 2 / (norms * n)
    return ModeSpectrum(vals, vecs, overlap)


def uniform_mode_params(geom, method="site_averaged", gamma=1.0, H=None):
    """Shift and linewidth of the phase-uniform mode of ``geom``.

    ``H`` may be passed to reuse an already assembled interaction matrix.
    """
    if method not in METHODS:
        raise InvalidArgumentError(f"method must be one of {METHODS}, got {method!r}")
    n = geom.n_atoms
    if n == 1:
        return UniformModeParams(0.0, 0.0, 1, method, 1.0)
    if H is None:
        H = interaction_matrix(geom, gamma)
    if method == "site_averaged":
        val = (H.sum() - 1j * gamma * n) / n
        overlap = 1.0
    else:
        spec = eigenmodes(H)
        idx = spec.uniform_index
        val = spec.eigenvalues[idx] - 1j * gamma
        overlap = float(spec.uniform_overlap[idx])
    return UniformModeParams(float(val.real), float(val.imag), n, method, overlap)


def lattice_mode_params(a, n_side, method="site_averaged", dipole=None):
    """Convenience wrapper for a clean square lattice."""
    geom = build_square_array(n_side, a) if dipole is None else build_square_array(n_side, a, dipole)
    return uniform_mode_params(geom, method)


def infinite_lattice_linewidth(a, gamma=1.0, wavelength=1.0):
    """Total uniform-mode linewidth ``3 pi gamma / (k a)^2`` of an infinite array."""
    k = wavenumber(wavelength)
    return 3.0 * np.pi * gamma / (k * a) ** 2


def extrapolate_linewidth(a, n_sides, order=1, dipole=None):
    """Extrapolate the site-averaged ``gamma + gamma_tilde`` to ``n_side -> inf``.

    Richardson-style least-squares fit in powers of ``1 / n_side`` (edge
    corrections scale with the perimeter-to-area ratio); the intercept is
    the infinite-lattice estimate.

    Returns
    -------
    estimate : float
    n_sides : ndarray
    linewidths : ndarray
        ``gamma + gamma_tilde`` at each size.
    """
    n_sides = np.asarray(sorted(set(int(n) for n in n_sides)))
    if len(n_sides) < order + 2:
        raise InvalidArgumentError("need at least order + 2 distinct sizes")
    widths = np.array(
        [1.0 + lattice_mode_params(a, n, "site_averaged", dipole).gamma_tilde for n in n_sides]
    )
    coef = np.polyfit(1.0 / n_sides, widths, order)
    return float(coef[-1]), n_sides, widths


def _realization(geom, spec, index, method):
    attempt = 0
    while True:
        sample = sample_disorder(geom, spec, index, attempt)
        if min_pair_distance(sample) > COINCIDENCE_TOL:
            return uniform_mode_params(sample, method), attempt
        attempt += 1


def disorder_average(geom, spec, method="site_averaged", n_workers=1):
    """Ensemble mean and standard error of the uniform-mode parameters.

    Realizations with coincident atoms are redrawn; the number of redraws
    is reported as ``n_resampled``.
    """
    if spec.n_samples < 2:
        raise InvalidArgumentError("disorder averaging needs n_samples >= 2")
    if spec.eta == 0:
        clean = uniform_mode_params(geom, method)
        results = [(clean, 0)] * spec.n_samples
    elif n_workers > 1:
        with ThreadPoolExecutor(n_workers) as pool:
            results = list(pool.map(lambda i: _realization(geom, spec, i, method), range(spec.n_samples)))
    else:
        results = [_realization(geom, spec, i, method) for i in range(spec.n_samples)]
    om = np.array([p.omega_tilde for p, _ in results])
    gt = np.array([p.gamma_tilde for p, _ in results])
    ov = np.array([p.overlap for p, _ in results])
    n = spec.n_samples
    return DisorderedModeStats(
        omega_tilde=float(om.mean()),
        gamma_tilde=float(gt.mean()),
        stderr_omega=float(om.std(ddof=1) / np.sqrt(n)),
        stderr_gamma=float(gt.std(ddof=1) / np.sqrt(n)),
        n_samples=n,
        eta=spec.eta,
        method=method,
        omega_samples=om,
        gamma_samples=gt,
        overlap_samples=ov,
        n_resampled=sum(r for _, r in results),
    )


MODES_CSV_COLUMNS = [
    "N", "a_over_lambda", "eta_over_a", "omega_tilde", "gamma_tilde",
    "stderr_omega", "stderr_gamma", "method", "n_samples",
]
