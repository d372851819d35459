"""Square-lattice atom arrays and Gaussian positional disorder.

Lengths are in units of the resonance wavelength (lambda = 1).
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InvalidArgumentError

X_HAT = np.array([1.0, 0.0, 0.0], dtype=complex)
Y_HAT = np.array([0.0, 1.0, 0.0], dtype=complex)
SIGMA_PLUS = np.array([1.0, 1.0j, 0.0], dtype=complex) / np.sqrt(2.0)


def _unit(vec):
    vec = np.asarray(vec, dtype=complex).reshape(3)
    norm = np.sqrt(np.vdot(vec, vec).real)
    if norm == 0.0:
        raise InvalidArgumentError("dipole orientation must be non-zero")
    return vec / norm


@dataclass(frozen=True)
class ArrayGeometry:
    """Atom positions plus the shared dipole orientation.

    Parameters
    ----------
    positions : ndarray, shape (N, 3)
        Atom positions in units of lambda.
    lattice_constant : float
        Lattice spacing ``a`` in units of lambda.
    n_side : int
        Atoms per lattice side; ``N = n_side**2``.
    dipole : ndarray, shape (3,)
        Complex unit vector ``e_d``.
    """

    positions: np.ndarray
    lattice_constant: float
    n_side: int
    dipole: np.ndarray = field(default_factory=lambda: X_HAT.copy())

    def __post_init__(self):
        pos = np.array(self.positions, dtype=float)
        if pos.ndim != 2 or pos.shape[1] != 3:
            raise InvalidArgumentError(f"positions must have shape (N, 3), got {pos.shape}")
        if pos.shape[0] != self.n_side**2:
            raise InvalidArgumentError(
                f"expected {self.n_side**2} positions for n_side={self.n_side}, got {pos.shape[0]}"
            )
        pos.setflags(write=False)
        dip = _unit(self.dipole)
        dip.setflags(write=False)
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "dipole", dip)

    @property
    def n_atoms(self):
        return self.positions.shape[0]

    def to_csv(self, path=None):
        """Write ``atom_index,x,y,z`` rows (17 significant digits).

        Returns the CSV text when ``path`` is None.
        """
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["atom_index", "x", "y", "z"])
        for j, (x, y, z) in enumerate(self.positions):
            writer.writerow([j, f"{x:.17g}", f"{y:.17g}", f"{z:.17g}"])
        text = buf.getvalue()
        if path is None:
            return text
        with open(path, "w", newline="") as fh:
            fh.write(text)
        return None

    @classmethod
    def from_csv(cls, source, lattice_constant, n_side, dipole=X_HAT):
        """Inverse of :meth:`to_csv`; ``source`` is a path or CSV text."""
        if "\n" in str(source):
            text = str(source)
        else:
            with open(source) as fh:
                text = fh.read()
        rows = list(csv.DictReader(io.StringIO(text)))
        rows.sort(key=lambda row: int(row["atom_index"]))
        pos = np.array([[float(r["x"]), float(r["y"]), float(r["z"])] for r in rows])
        return cls(pos, lattice_constant, n_side, dipole)


@dataclass(frozen=True)
class DisorderSpec:
    """Gaussian position fluctuations around each lattice site.

    ``eta`` is the rms width in units of the lattice constant. With
    ``convention="per_axis"`` each displaced Cartesian component has
    standard deviation ``eta * a``; with ``"total"`` the rms length of the
    whole displacement vector is ``eta * a``. ``dims`` selects in-plane (2)
    or full 3D displacements.
    """

    eta: float
    n_samples: int = 100
    seed: int = 0
    convention: str = "per_axis"
    dims: int = 2

    def __post_init__(self):
        if not self.eta >= 0:
            raise InvalidArgumentError(f"eta must be >= 0, got {self.eta}")
        if self.n_samples < 1:
            raise InvalidArgumentError(f"n_samples must be >= 1, got {self.n_samples}")
        if self.convention not in ("per_axis", "total"):
            raise InvalidArgumentError(f"unknown disorder convention {self.convention!r}")
        if self.dims not in (2, 3):
            raise InvalidArgumentError(f"dims must be 2 or 3, got {self.dims}")


def build_square_array(n_side, a, dipole=X_HAT):
    """Centered ``n_side x n_side`` square lattice in the z = 0 plane."""
    if int(n_side) != n_side or n_side < 1:
        raise InvalidArgumentError(f"n_side must be a positive integer, got {n_side}")
    if not a > 0:
        raise InvalidArgumentError(f"lattice constant must be positive, got {a}")
    n_side = int(n_side)
    line = (np.arange(n_side) - (n_side - 1) / 2.0) * a
    xx, yy = np.meshgrid(line, line, indexing="ij")
    pos = np.column_stack([xx.ravel(), yy.ravel(), np.zeros(n_side * n_side)])
    return ArrayGeometry(pos, float(a), n_side, dipole)


def displacement_std(spec, a):
    """Per-component standard deviation implied by ``spec`` for spacing ``a``."""
    width = spec.eta * a
    if spec.convention == "total":
        width /= np.sqrt(spec.dims)
    return width


def _generator(seed, sample_index, attempt=0):
    # Philox is counter-based: each (seed, sample, attempt) key is an independent stream.
    ss = np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, int(sample_index), int(attempt)])
    return np.random.Generator(np.random.Philox(ss))


def sample_disorder(geom, spec, sample_index, attempt=0):
    """Return one disordered realization of ``geom``.

    Atom ``j`` always consumes row ``j`` of the drawn block, so a realization
    is a pure function of ``(spec.seed, sample_index, attempt)``.
    """
    if spec.eta == 0:
        return geom
    if sample_index < 0:
        raise InvalidArgumentError(f"sample_index must be >= 0, got {sample_index}")
    rng = _generator(spec.seed, sample_index, attempt)
    shift = rng.standard_normal((geom.n_atoms, spec.dims)) * displacement_std(spec, geom.lattice_constant)
    pos = geom.positions.copy()
    pos[:, : spec.dims] += shift
    return replace(geom, positions=pos)


def min_pair_distance(geom):
    """Smallest interatomic distance (``inf`` for a single atom)."""
    if geom.n_atoms < 2:
        return np.inf
    diff = geom.positions[:, None, :] - geom.positions[None, :, :]
    dist = np.linalg.norm(diff, axis=-1)
    np.fill_diagonal(dist, np.inf)
    return float(dist.min())
