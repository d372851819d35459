import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from atomarray.errors import InvalidArgumentError
from atomarray.geometry import build_square_array
from atomarray.meanfield import (
    DriveParams,
    bistability_scan,
    bistability_window,
    cooperativity,
    cubic_coefficients,
    drive_of_X,
    full_ode_steady_state,
    hysteresis_sweep,
    integrate_full_ode,
    steady_states,
    uniform_ode_steady_state,
    uniform_rhs,
)
from atomarray.modes import UniformModeParams, lattice_mode_params

NO_COUPLING = UniformModeParams(0.0, 0.0, 1, "site_averaged", 1.0)


@pytest.fixture(scope="module")
def bistable_mode():
    return lattice_mode_params(0.16, 5, "eigen_overlap")


def test_drive_must_be_non_negative():
    with pytest.raises(InvalidArgumentError):
        DriveParams(-1.0)


@pytest.mark.parametrize("R, Delta", [(0.3, 0.0), (2.0, 1.5), (10.0, -3.0)])
def test_independent_atom_is_saturated_two_level_system(R, Delta):
    (br,) = steady_states(DriveParams(R, Delta), NO_COUPLING)
    D = Delta**2 + 1
    assert br.X == pytest.approx(R**2)
    assert br.rho_ee == pytest.approx(R**2 / (D + 2 * R**2))
    assert br.rho_ge == pytest.approx(R * complex(-Delta, 1) / (D + 2 * R**2))
    assert br.stable is True


def test_cooperativity_definition():
    mode = UniformModeParams(3.0, 4.0, 9, "site_averaged", 1.0)
    assert cooperativity(DriveParams(1.0, 2.0), mode) == pytest.approx(complex(3, 4) / (2 * complex(2, 1)))


@settings(max_examples=60, deadline=None)
@given(st.floats(0.01, 30), st.floats(-15, 15), st.floats(-10, 10), st.floats(0, 15))
def test_roots_satisfy_self_consistency(R, Delta, om, gt):
    mode = UniformModeParams(om, gt, 25, "site_averaged", 1.0)
    drive = DriveParams(R, Delta)
    branches = steady_states(drive, mode)
    assert 1 <= len(branches) <= 3
    for br in branches:
        assert br.residual < 1e-8 * max(1, R)
        # R_eff = R + kappa rho_ge
        assert br.R_eff == pytest.approx(R + mode.kappa * br.rho_ge, rel=1e-8, abs=1e-12)
        assert 0 <= br.rho_ee <= 0.5
        assert abs(br.rho_ge) ** 2 <= br.rho_ee + 1e-12
        assert drive_of_X(br.X, drive, mode) == pytest.approx(R**2, rel=1e-7)
        if not br.marginal:
            assert br.stable == br.gradient_stable


def test_roots_are_fixed_points_of_uniform_ode(bistable_mode):
    lo, hi = bistability_window(bistable_mode, 0.0)
    drive = DriveParams(0.5 * (lo + hi), 0.0)
    rhs = uniform_rhs(drive, bistable_mode)
    branches = steady_states(drive, bistable_mode)
    assert [b.stable for b in branches] == [True, False, True]
    for br in branches:
        y = [br.rho_ge.real, br.rho_ge.imag, br.rho_ee]
        assert np.linalg.norm(rhs(0, y)) < 1e-10


def test_window_edges_are_fold_points(bistable_mode):
    lo, hi = bistability_window(bistable_mode, 0.0)
    assert len(steady_states(DriveParams(0.999 * lo), bistable_mode)) == 1
    assert len(steady_states(DriveParams(1.001 * lo), bistable_mode)) == 3
    assert len(steady_states(DriveParams(0.999 * hi), bistable_mode)) == 3
    assert len(steady_states(DriveParams(1.001 * hi), bistable_mode)) == 1


def test_cubic_is_monic():
    c = cubic_coefficients(DriveParams(1.0, 0.5), NO_COUPLING)
    assert c[0] == 1.0 and c.shape == (4,)


def test_small_arrays_have_no_window():
    assert bistability_window(lattice_mode_params(0.16, 3, "eigen_overlap"), 0.0) is None


def test_bistability_scan_report():
    rep = bistability_scan(0.16, [9, 16, 25])
    assert rep.critical_N == 16
    assert not rep.bistable_detunings(9)
    assert 0.0 in rep.common_detunings([16, 25])
    with pytest.raises(InvalidArgumentError):
        bistability_scan(0.16, [10])


def test_uniform_ode_relaxes_to_cubic_root():
    mode = lattice_mode_params(0.17, 4)
    drive = DriveParams(2.0, 1.0)
    q, w, ok = uniform_ode_steady_state(drive, mode)
    (br,) = steady_states(drive, mode)
    assert ok
    assert w == pytest.approx(br.rho_ee, abs=1e-7)
    assert q == pytest.approx(br.rho_ge, abs=1e-7)


def test_hysteresis_has_two_branches(bistable_mode):
    lo, hi = bistability_window(bistable_mode, 0.0)
    R = np.linspace(0.8 * lo, 1.2 * hi, 25)
    up, down = hysteresis_sweep(bistable_mode, 0.0, R)
    inside = (R > lo) & (R < hi)
    assert np.all(up[inside] < down[inside] - 1e-3)
    np.testing.assert_allclose(up[~inside], down[~inside], atol=1e-6)


def test_full_ode_single_atom_reduces_to_bloch_equations():
    g = build_square_array(1, 0.2)
    drive = DriveParams(0.7, 0.3)
    q, w, ok = full_ode_steady_state(g, drive)
    (br,) = steady_states(drive, NO_COUPLING)
    assert ok
    assert w[0] == pytest.approx(br.rho_ee, abs=1e-8)


def test_full_ode_trajectory_shape():
    traj = integrate_full_ode(build_square_array(2, 0.2), DriveParams(0.5), t_end=2.0, n_out=11)
    assert traj.rho_ge.shape == (11, 4)
    assert traj.final_rho_ee.shape == (4,)
    with pytest.raises(InvalidArgumentError):
        integrate_full_ode(build_square_array(2, 0.2), DriveParams(0.5), t_end=0.0)
