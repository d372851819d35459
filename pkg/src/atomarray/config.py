"""Run configuration: INI file sections, overrides, validation, hashing."""

from __future__ import annotations

import configparser
import hashlib
import io
import os
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .errors import ConfigError
from .geometry import SIGMA_PLUS, X_HAT, Y_HAT

THREADS_ENV = "ATOMARRAY_THREADS"

DIPOLES = {"x": X_HAT, "y": Y_HAT, "sigma_plus": SIGMA_PLUS}


@dataclass
class LatticeConfig:
    a_over_lambda: list = field(default_factory=lambda: [0.17, 0.16])
    n_side: list = field(default_factory=lambda: [2, 3, 4, 5, 6])
    dipole: str = "x"


@dataclass
class DriveConfig:
    delta: list = field(default_factory=lambda: [0.0])
    r_min: float = 0.05
    r_max: float = 20.0
    r_count: int = 400
    r_spacing: str = "linear"


@dataclass
class ModesConfig:
    a_over_lambda: list = field(default_factory=lambda: [0.05, 0.08, 0.10, 0.16])
    n_side_max: int = 10
    method: str = "eigen_overlap"


@dataclass
class DisorderConfig:
    a_over_lambda: float = 0.16
    n_side: int = 6
    eta_over_a: list = field(default_factory=lambda: [0.0, 0.1, 0.2, 0.3])
    n_samples: int = 100
    seed: int = 20240917
    convention: str = "per_axis"
    dims: int = 2


@dataclass
class QuantumConfig:
    n_atoms: list = field(default_factory=lambda: [25, 50, 80])
    r_min: float = 0.025
    r_max: float = 2.0
    r_count: int = 80
    gamma_tilde: float = 50.0
    drop_gamma: bool = True
    max_n: int = 120


@dataclass
class RunSection:
    output_dir: str = "out"
    threads: int = 1


@dataclass
class RunConfig:
    lattice: LatticeConfig = field(default_factory=LatticeConfig)
    drive: DriveConfig = field(default_factory=DriveConfig)
    modes: ModesConfig = field(default_factory=ModesConfig)
    disorder: DisorderConfig = field(default_factory=DisorderConfig)
    quantum: QuantumConfig = field(default_factory=QuantumConfig)
    run: RunSection = field(default_factory=RunSection)

    # -- derived quantities ------------------------------------------------
    def r_grid(self):
        d = self.drive
        if d.r_spacing == "log":
            return np.geomspace(d.r_min, d.r_max, d.r_count)
        return np.linspace(d.r_min, d.r_max, d.r_count)

    def quantum_r_grid(self):
        q = self.quantum
        return np.linspace(q.r_min, q.r_max, q.r_count)

    def dipole_vector(self):
        return parse_dipole(self.lattice.dipole)

    # -- serialisation -----------------------------------------------------
    def to_ini(self, include_run=True):
        parser = configparser.ConfigParser()
        for sec in fields(self):
            if sec.name == "run" and not include_run:
                continue
            values = getattr(self, sec.name)
            parser[sec.name] = {f.name: _format(getattr(values, f.name)) for f in fields(values)}
        buf = io.StringIO()
        parser.write(buf)
        return buf.getvalue()

    def digest(self):
        """Hash of every setting that can change results (``[run]`` excluded)."""
        return hashlib.sha256(self.to_ini(include_run=False).encode()).hexdigest()[:16]

    def validate(self):
        for name in ("a_over_lambda", "n_side"):
            if not getattr(self.lattice, name):
                raise ConfigError(f"lattice.{name}", "must be non-empty")
        if any(a <= 0 for a in self.lattice.a_over_lambda):
            raise ConfigError("lattice.a_over_lambda", "values must be positive")
        if any(n < 1 for n in self.lattice.n_side):
            raise ConfigError("lattice.n_side", "values must be >= 1")
        try:
            parse_dipole(self.lattice.dipole)
        except ValueError as exc:
            raise ConfigError("lattice.dipole", str(exc)) from None
        if not self.drive.delta:
            raise ConfigError("drive.delta", "must be non-empty")
        if self.drive.r_count < 1:
            raise ConfigError("drive.r_count", "must be >= 1")
        if self.drive.r_spacing not in ("linear", "log"):
            raise ConfigError("drive.r_spacing", "must be 'linear' or 'log'")
        if self.drive.r_spacing == "log" and self.drive.r_min <= 0:
            raise ConfigError("drive.r_min", "log spacing needs r_min > 0")
        if self.drive.r_max < self.drive.r_min or self.drive.r_min < 0:
            raise ConfigError("drive.r_max", "need 0 <= r_min <= r_max")
        if not self.modes.a_over_lambda or any(a <= 0 for a in self.modes.a_over_lambda):
            raise ConfigError("modes.a_over_lambda", "must be non-empty and positive")
        if self.modes.n_side_max < 1:
            raise ConfigError("modes.n_side_max", "must be >= 1")
        if self.modes.method not in ("site_averaged", "eigen_overlap"):
            raise ConfigError("modes.method", "must be 'site_averaged' or 'eigen_overlap'")
        dis = self.disorder
        if dis.a_over_lambda <= 0:
            raise ConfigError("disorder.a_over_lambda", "must be positive")
        if not dis.eta_over_a or any(e < 0 for e in dis.eta_over_a):
            raise ConfigError("disorder.eta_over_a", "must be non-empty and >= 0")
        if dis.n_samples < 2:
            raise ConfigError("disorder.n_samples", "must be >= 2")
        if dis.convention not in ("per_axis", "total"):
            raise ConfigError("disorder.convention", "must be 'per_axis' or 'total'")
        if dis.dims not in (2, 3):
            raise ConfigError("disorder.dims", "must be 2 or 3")
        q = self.quantum
        if not q.n_atoms or any(n < 1 or n > q.max_n for n in q.n_atoms):
            raise ConfigError("quantum.n_atoms", f"values must lie in [1, {q.max_n}]")
        if q.r_count < 1 or q.r_min <= 0 or q.r_max < q.r_min:
            raise ConfigError("quantum.r_min", "need 0 < r_min <= r_max and r_count >= 1")
        if q.gamma_tilde <= 0:
            raise ConfigError("quantum.gamma_tilde", "must be positive")
        if self.run.threads < 1:
            raise ConfigError("run.threads", "must be >= 1")
        return self


def parse_dipole(text):
    text = str(text).strip()
    if text in DIPOLES:
        return DIPOLES[text]
    try:
        vec = np.array([complex(p.replace(" ", "")) for p in text.split(",")])
    except ValueError:
        raise ValueError(f"unknown dipole {text!r}") from None
    if vec.shape != (3,) or np.linalg.norm(vec) == 0:
        raise ValueError(f"dipole must be 3 non-zero components, got {text!r}")
    return vec / np.linalg.norm(vec)


def _format(value):
    if isinstance(value, (list, tuple)):
        return ", ".join(_format(v) for v in value)
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _coerce(template, raw, path):
    raw = raw.strip()
    try:
        if isinstance(template, bool):
            low = raw.lower()
            if low not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(raw)
            return low in ("true", "1", "yes")
        if isinstance(template, int):
            return int(raw)
        if isinstance(template, float):
            return float(raw)
        if isinstance(template, list):
            elem = template[0] if template else 0.0
            items = [s for s in raw.split(",") if s.strip()]
            return [_coerce(elem, s, path) for s in items]
    except ValueError:
        raise ConfigError(path, f"cannot parse {raw!r} as {type(template).__name__}") from None
    return raw


def _apply(cfg, section, key, raw):
    path = f"{section}.{key}"
    if not hasattr(cfg, section):
        raise ConfigError(path, "unknown section")
    sec = getattr(cfg, section)
    if key not in {f.name for f in fields(sec)}:
        raise ConfigError(path, "unknown key")
    setattr(sec, key, _coerce(getattr(sec, key), raw, path))


def default_threads():
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        raise ConfigError(THREADS_ENV, f"not an integer: {raw!r}") from None


def load_config(path=None, overrides=()):
    """Defaults, then the INI file at ``path``, then ``section.key=value`` overrides."""
    cfg = RunConfig()
    cfg.run.threads = default_threads()
    if path is not None:
        parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
        try:
            with open(path) as fh:
                parser.read_file(fh)
        except (OSError, configparser.Error) as exc:
            raise ConfigError(str(path), str(exc)) from None
        for section in parser.sections():
            for key, raw in parser[section].items():
                _apply(cfg, section, key, raw)
    for item in overrides:
        if "=" not in item or "." not in item.split("=", 1)[0]:
            raise ConfigError(item, "override must look like section.key=value")
        lhs, raw = item.split("=", 1)
        section, key = lhs.strip().split(".", 1)
        _apply(cfg, section, key, raw)
    return cfg.validate()


def config_dict(cfg):
    return asdict(cfg)
