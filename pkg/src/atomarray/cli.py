"""Command-line entry point: ``atomarray <command> [options]``.

Commands write CSV files into ``run.output_dir``. Every file starts with a
``#`` comment carrying the package version and a hash of the resolved
configuration, followed by a header row; failed grid points keep their row
with the message in the trailing ``error`` column.

Exit codes: 0 success, 2 configuration error, 3 validation failure.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .config import load_config
from .crf import CRF_CSV_COLUMNS, crf_branches, dicke_steady_state
from .errors import AtomArrayError, ConfigError
from .geometry import DisorderSpec, build_square_array
from .meanfield import MEANFIELD_CSV_COLUMNS, DriveParams, bistability_window, steady_states
from .modes import MODES_CSV_COLUMNS, disorder_average, uniform_mode_params
from .observables import (
    OBSERVABLES_CSV_COLUMNS,
    dicke_pair_moments,
    intensity_scaling_fit,
    quantum_transmission,
    scatter_rates_uniform,
    transmission,
)
from . import validation

log = logging.getLogger("atomarray")

EXIT_OK, EXIT_CONFIG, EXIT_VALIDATION = 0, 2, 3
BISTABILITY_COLUMNS = ["a_over_lambda", "N", "eta_over_a", "Delta", "omega_tilde", "gamma_tilde",
                       "R_low", "R_high", "bistable"]


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    return str(value)


def write_csv(path, columns, rows, cfg, command):
    """Write ``rows`` (dicts) under a provenance comment and header row."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(f"# atomarray {__version__} command={command} config_sha256={cfg.digest()}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(row.get(c)) for c in columns])
    log.info("wrote %s (%d rows)", path, len(rows))
    return path


def _pmap(fn, items, threads):
    items = list(items)
    if threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(threads) as pool:
        return list(pool.map(fn, items))


def _guarded(base, fn):
    try:
        return fn()
    except (AtomArrayError, ArithmeticError, np.linalg.LinAlgError) as exc:
        return [dict(base, error=f"{type(exc).__name__}: {exc}")]


def _branch_rows(base, drive, mode):
    rows = []
    for i, br in enumerate(steady_states(drive, mode)):
        rows.append(dict(
            base, branch_index=i, X=br.X, re_Reff=br.R_eff.real, im_Reff=br.R_eff.imag,
            re_rho_ge=br.rho_ge.real, im_rho_ge=br.rho_ge.imag, rho_ee=br.rho_ee, s_z=br.s_z,
            stable=br.stable,
        ))
    return rows


def _meanfield_rows(a, N, mode, deltas, r_grid, extra=None):
    rows = []
    for Delta in deltas:
        for R in r_grid:
            base = dict(extra or {}, a_over_lambda=a, N=N, Delta=float(Delta), R=float(R))
            rows.extend(_guarded(base, lambda: _branch_rows(base, DriveParams(float(R), float(Delta)), mode)))
    return rows


def _bistability_row(a, N, eta, Delta, mode):
    window = bistability_window(mode, Delta)
    return dict(a_over_lambda=a, N=N, eta_over_a=eta, Delta=float(Delta), omega_tilde=mode.omega_tilde,
                gamma_tilde=mode.gamma_tilde, R_low=window[0] if window else None,
                R_high=window[1] if window else None, bistable=window is not None)


# --- commands ---------------------------------------------------------------

def cmd_modes(cfg):
    """Uniform-mode shift and width against atom number."""
    dipole = cfg.dipole_vector()
    method = cfg.modes.method
    items = [(a, n) for a in cfg.modes.a_over_lambda for n in range(1, cfg.modes.n_side_max + 1)]

    def work(item):
        a, n = item
        base = dict(N=n * n, a_over_lambda=a, eta_over_a=0.0, method=method, n_samples=1)
        p = uniform_mode_params(build_square_array(n, a, dipole), method)
        return dict(base, omega_tilde=p.omega_tilde, gamma_tilde=p.gamma_tilde, stderr_omega=0.0,
                    stderr_gamma=0.0)

    rows = _pmap(lambda it: _guarded(dict(N=it[1] ** 2, a_over_lambda=it[0]), lambda: [work(it)])[0],
                 items, cfg.run.threads)
    out = Path(cfg.run.output_dir)
    return [write_csv(out / "modes.csv", MODES_CSV_COLUMNS + ["error"], rows, cfg, "modes")]


def cmd_fig1(cfg):
    """Mean-field steady states and bistability windows for ordered arrays."""
    dipole = cfg.dipole_vector()
    method = cfg.modes.method
    r_grid = cfg.r_grid()
    items = [(a, n) for a in cfg.lattice.a_over_lambda for n in cfg.lattice.n_side]

    def work(item):
        a, n = item
        mode = uniform_mode_params(build_square_array(n, a, dipole), method)
        rows = _meanfield_rows(a, n * n, mode, cfg.drive.delta, r_grid)
        bist = [_bistability_row(a, n * n, 0.0, D, mode) for D in cfg.drive.delta]
        return rows, bist

    results = _pmap(work, items, cfg.run.threads)
    out = Path(cfg.run.output_dir)
    rows = [r for res, _ in results for r in res]
    bist = [b for _, res in results for b in res]
    return [
        write_csv(out / "fig1.csv", MEANFIELD_CSV_COLUMNS + ["error"], rows, cfg, "fig1"),
        write_csv(out / "fig1_bistability.csv", BISTABILITY_COLUMNS, bist, cfg, "fig1"),
    ]


def cmd_fig2(cfg):
    """Disorder-averaged modes and the resulting mean-field branches."""
    dis = cfg.disorder
    geom = build_square_array(dis.n_side, dis.a_over_lambda, cfg.dipole_vector())
    N = geom.n_atoms
    r_grid = cfg.r_grid()
    stats_rows, rows, bist = [], [], []
    for eta in dis.eta_over_a:
        spec = DisorderSpec(eta, dis.n_samples, dis.seed, dis.convention, dis.dims)
        stats = disorder_average(geom, spec, cfg.modes.method, cfg.run.threads)
        mode = stats.as_params(N)
        stats_rows.append(dict(N=N, a_over_lambda=dis.a_over_lambda, eta_over_a=eta,
                               omega_tilde=stats.omega_tilde, gamma_tilde=stats.gamma_tilde,
                               stderr_omega=stats.stderr_omega, stderr_gamma=stats.stderr_gamma,
                               method=stats.method, n_samples=stats.n_samples))
        extra = dict(eta_over_a=eta, omega_tilde=stats.omega_tilde, gamma_tilde=stats.gamma_tilde,
                     stderr_omega=stats.stderr_omega, stderr_gamma=stats.stderr_gamma)
        rows.extend(_meanfield_rows(dis.a_over_lambda, N, mode, cfg.drive.delta, r_grid, extra))
        bist.extend(_bistability_row(dis.a_over_lambda, N, eta, D, mode) for D in cfg.drive.delta)
    out = Path(cfg.run.output_dir)
    cols = ["eta_over_a", "omega_tilde", "gamma_tilde", "stderr_omega", "stderr_gamma"]
    return [
        write_csv(out / "fig2_modes.csv", MODES_CSV_COLUMNS, stats_rows, cfg, "fig2"),
        write_csv(out / "fig2.csv", cols + MEANFIELD_CSV_COLUMNS + ["error"], rows, cfg, "fig2"),
        write_csv(out / "fig2_bistability.csv", BISTABILITY_COLUMNS, bist, cfg, "fig2"),
    ]


def _fig3_point(N, x, q):
    gt = q.gamma_tilde
    gamma = 0.0 if q.drop_gamma else 1.0
    R = x * gt
    beta = 2 * x
    mf = crf_branches(R, gt)[0].state
    mf_t = transmission(0.5 * mf.s_minus, R, gt, drop_gamma=q.drop_gamma)
    mf_rates = scatter_rates_uniform(N, gt, 0.5 * (1 + mf.s_z), 0.5 * mf.s_minus, gamma=gamma)
    state = dicke_steady_state(N, R, gt, "nullspace", max_N=q.max_n)
    state.check_invariants()
    obs = state.observables()
    qt = quantum_transmission(state, R, gt, drop_gamma=q.drop_gamma)
    ree, rge, pair = dicke_pair_moments(state)
    q_rates = scatter_rates_uniform(N, gt, ree, rge, pair, gamma=gamma)
    crf_rows = [
        dict(N=N, R_over_gamma_tilde=x, s_z=mf.s_z, s_x=mf.s_x, s_y=mf.s_y,
             coh_sp_sm=abs(mf.s_minus) ** 2, fluct_sp_sm=0.0, method="mean_field"),
        dict(N=N, R_over_gamma_tilde=x, s_z=obs.s_z, s_x=obs.s_x, s_y=obs.s_y,
             coh_sp_sm=obs.coherent, fluct_sp_sm=obs.fluctuation, method="quantum_nullspace"),
    ]
    obs_rows = [
        dict(context="mean_field", N=N, R=R, beta=beta, T_coh=mf_t.T_coh, R_coh=mf_t.R_coh,
             T_inc=mf_t.T_inc, n_c=mf_rates.n_c, n_inc_1=mf_rates.n_inc_1, n_inc_2=mf_rates.n_inc_2),
        dict(context="quantum", N=N, R=R, beta=beta, T_coh=qt.T_coh, R_coh=qt.R_coh, T_inc=qt.T_inc,
             n_c=q_rates.n_c, n_inc_1=q_rates.n_inc_1, n_inc_2=q_rates.n_inc_2),
    ]
    return crf_rows, obs_rows


def cmd_fig3(cfg):
    """Cooperative-resonance-fluorescence mean field against the exact Dicke solution."""
    q = cfg.quantum
    items = [(N, float(x)) for N in q.n_atoms for x in cfg.quantum_r_grid()]

    def work(item):
        N, x = item
        try:
            return _fig3_point(N, x, q)
        except (AtomArrayError, ArithmeticError, np.linalg.LinAlgError) as exc:
            err = f"{type(exc).__name__}: {exc}"
            return ([dict(N=N, R_over_gamma_tilde=x, error=err)],
                    [dict(context="quantum", N=N, R=x * q.gamma_tilde, beta=2 * x, error=err)])

    results = _pmap(work, items, cfg.run.threads)
    out = Path(cfg.run.output_dir)
    crf_rows = [r for a, _ in results for r in a]
    obs_rows = [r for _, b in results for r in b]
    return [
        write_csv(out / "fig3.csv", CRF_CSV_COLUMNS + ["error"], crf_rows, cfg, "fig3"),
        write_csv(out / "fig3_transmission.csv", OBSERVABLES_CSV_COLUMNS + ["error"], obs_rows, cfg, "fig3"),
    ]


def cmd_sweep(cfg):
    """Mean-field sweep over the lattice grid plus cooperative-branch observables.

    ``alpha`` is filled when at least four atom numbers share ``(a, Delta, R)``.
    """
    dipole = cfg.dipole_vector()
    method = cfg.modes.method
    r_grid = cfg.r_grid()
    items = [(a, n) for a in cfg.lattice.a_over_lambda for n in cfg.lattice.n_side]
    modes = dict(zip(items, _pmap(lambda it: uniform_mode_params(build_square_array(it[1], it[0], dipole),
                                                                 method), items, cfg.run.threads)))
    rows, obs_rows = [], []
    for (a, n), mode in modes.items():
        N = n * n
        rows.extend(_meanfield_rows(a, N, mode, cfg.drive.delta, r_grid))
        for Delta in cfg.drive.delta:
            for R in r_grid:
                base = dict(context=f"sweep:a={a:g}:Delta={Delta:g}", N=N, R=float(R), beta=None)
                try:
                    if R <= 0:
                        raise ConfigError("drive.r_min", "observables need R > 0")
                    br = next(b for b in steady_states(DriveParams(float(R), float(Delta)), mode) if b.stable)
                    t = transmission(br.rho_ge, R, mode.gamma_tilde)
                    rates = scatter_rates_uniform(N, mode.gamma_tilde, br.rho_ee, br.rho_ge)
                    obs_rows.append(dict(base, T_coh=t.T_coh, R_coh=t.R_coh, T_inc=0.0, n_c=rates.n_c,
                                         n_inc_1=rates.n_inc_1, n_inc_2=rates.n_inc_2))
                except (AtomArrayError, StopIteration) as exc:
                    obs_rows.append(dict(base, error=f"{type(exc).__name__}: {exc}"))
    groups = {}
    for row in obs_rows:
        if row.get("n_c"):
            groups.setdefault((row["context"], row["R"]), []).append(row)
    for group in groups.values():
        if len(group) >= 4:
            fit = intensity_scaling_fit([g["N"] for g in group], [g["n_c"] for g in group])
            for g in group:
                g["alpha"] = fit.alpha
    out = Path(cfg.run.output_dir)
    return [
        write_csv(out / "sweep.csv", MEANFIELD_CSV_COLUMNS + ["error"], rows, cfg, "sweep"),
        write_csv(out / "sweep_observables.csv", OBSERVABLES_CSV_COLUMNS + ["error"], obs_rows, cfg, "sweep"),
    ]


def cmd_oracle(cfg):
    """Run the cross-method validation checks."""
    results = validation.run_all()
    rows = [dict(check=r.name, passed=r.passed, value=r.value, tolerance=r.tolerance) for r in results]
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name}  value={r.value:.3e}  tol={r.tolerance:.1e}")
    path = write_csv(Path(cfg.run.output_dir) / "oracle.csv", ["check", "passed", "value", "tolerance"],
                     rows, cfg, "oracle")
    return [path], all(r.passed for r in results)


COMMANDS = {
    "modes": cmd_modes,
    "fig1": cmd_fig1,
    "fig2": cmd_fig2,
    "fig3": cmd_fig3,
    "sweep": cmd_sweep,
    "oracle": cmd_oracle,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="atomarray", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        p = sub.add_parser(name, help=(fn.__doc__ or name).splitlines()[0])
        p.add_argument("-c", "--config", help="INI configuration file")
        p.add_argument("-s", "--set", action="append", default=[], metavar="SECTION.KEY=VALUE",
                       help="override one configuration key (repeatable)")
        p.add_argument("-o", "--output-dir", help="overrides run.output_dir")
        p.add_argument("-j", "--threads", help="overrides run.threads")
        p.add_argument("--print-config", action="store_true", help="print the resolved configuration and exit")
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    overrides = list(args.set)
    if args.output_dir is not None:
        overrides.append(f"run.output_dir={args.output_dir}")
    if args.threads is not None:
        overrides.append(f"run.threads={args.threads}")
    try:
        cfg = load_config(args.config, overrides)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.print_config:
        sys.stdout.write(cfg.to_ini())
        return EXIT_OK
    result = COMMANDS[args.command](cfg)
    if args.command == "oracle":
        _, ok = result
        return EXIT_OK if ok else EXIT_VALIDATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
