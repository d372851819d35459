import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from atomarray import oracles
from atomarray.crf import (
    SpinState,
    casimir_sp_sm_plus_sz2,
    crf_branches,
    dicke_liouvillian,
    dicke_operators,
    dicke_steady_state,
    integrate_crf_ode,
    mean_field_s_z,
)
from atomarray.errors import DomainError, InvalidArgumentError


def test_spin_state_validation():
    s = SpinState(-0.6, 0.8j)
    assert s.s_x == 0.0 and s.s_y == pytest.approx(-0.8)
    assert s.norm2 == pytest.approx(1.0)
    with pytest.raises(InvalidArgumentError):
        SpinState(-0.9, 0.9)


@pytest.mark.parametrize("beta", [0.0, 0.3, 0.8, 1.0])
def test_branch_one(beta):
    (br,) = crf_branches(beta / 2, 1.0)
    assert br.branch == 1
    assert br.state.s_minus == pytest.approx(1j * beta)
    assert br.state.s_z == pytest.approx(-np.sqrt(1 - beta**2))
    assert br.state.norm2 == pytest.approx(1.0)


@pytest.mark.parametrize("beta", [1.2, 2.0, 5.0])
def test_branch_two(beta):
    plus, minus = crf_branches(beta, 2.0)
    for br in (plus, minus):
        assert br.branch == 2 and br.state.s_z == 0.0
        assert br.state.norm2 == pytest.approx(1.0)
        assert br.state.s_minus.imag == pytest.approx(1 / beta)
    assert plus.state.s_x > 0 > minus.state.s_x


def test_branches_reject_zero_width():
    with pytest.raises(DomainError):
        crf_branches(1.0, 0.0)


def test_mean_field_s_z_is_continuous_at_transition():
    b = np.array([0.5, 1.0 - 1e-12, 1.0, 1.5])
    np.testing.assert_allclose(mean_field_s_z(b), [-np.sqrt(0.75), 0, 0, 0], atol=2e-6)


def test_mean_field_states_are_fixed_points():
    for beta in (0.4, 0.9):
        st_ = crf_branches(beta * 3.0 / 2, 3.0, omega_tilde=2.0)[0]
        traj = integrate_crf_ode(beta * 1.5, 2.0, 3.0, st_.Delta, st_.state, t_end=20.0, n_out=5)
        assert abs(traj.s_minus[-1] - st_.state.s_minus) < 1e-8
        assert abs(traj.s_z[-1] - st_.state.s_z) < 1e-8


def test_integration_rejects_bad_time():
    with pytest.raises(InvalidArgumentError):
        integrate_crf_ode(1.0, 0.0, 1.0, 0.0, SpinState(-1.0, 0j), 0.0)


def test_dicke_operators_commutator():
    sp_, sm, sz = dicke_operators(6)
    comm = (sp_ @ sm - sm @ sp_).toarray()
    np.testing.assert_allclose(comm, 2 * sz.toarray(), atol=1e-12)


@pytest.mark.parametrize("N", [1, 2, 3, 4])
def test_liouvillian_matches_qubit_construction(N):
    A = dicke_liouvillian(N, 0.61, 2.3).toarray()
    B = oracles.dicke_liouvillian_bruteforce(N, 0.61, 2.3)
    np.testing.assert_allclose(A, B, atol=1e-12)


def test_liouvillian_preserves_trace():
    N = 5
    L = dicke_liouvillian(N, 0.4, 1.0).toarray()
    tr = np.zeros((N + 1) ** 2)
    tr[:: N + 2] = 1
    np.testing.assert_allclose(tr @ L, 0, atol=1e-12)


@pytest.mark.parametrize("R, gt", [(0.2, 1.0), (1.5, 0.7)])
def test_single_atom_steady_state_is_bloch_solution(R, gt):
    s = dicke_steady_state(1, R, gt).observables()
    ree = R**2 / (gt**2 + 2 * R**2)
    assert s.s_z == pytest.approx(2 * ree - 1, abs=1e-12)


@settings(max_examples=15, deadline=None)
@given(st.integers(2, 30), st.floats(0.01, 3.0))
def test_steady_state_invariants(N, beta):
    state = dicke_steady_state(N, beta / 2, 1.0)
    state.check_invariants()
    obs = state.observables()
    assert abs(obs.s_x) < 1e-10
    assert obs.sp_sm + obs.sz2 == pytest.approx(casimir_sp_sm_plus_sz2(N, obs.s_z), abs=1e-10)


def test_dense_and_sparse_backends_agree():
    a = dicke_steady_state(12, 0.6, 1.0, backend="dense").observables().as_array()
    b = dicke_steady_state(12, 0.6, 1.0, backend="sparse").observables().as_array()
    np.testing.assert_allclose(a, b, atol=1e-12)


def test_both_methods_check_agreement():
    dicke_steady_state(8, 0.4, 1.0, method="both")


def test_steady_state_argument_checks():
    with pytest.raises(InvalidArgumentError):
        dicke_steady_state(200, 0.5, 1.0)
    with pytest.raises(InvalidArgumentError):
        dicke_steady_state(4, 0.5, 0.0)
    with pytest.raises(InvalidArgumentError):
        dicke_steady_state(4, 0.5, 1.0, method="magic")


def test_undriven_steady_state_is_dark():
    state = dicke_steady_state(7, 0.0, 1.0)
    assert state.observables().s_z == pytest.approx(-1.0, abs=1e-12)


def test_strong_drive_approaches_maximally_mixed_state():
    N = 12
    state = dicke_steady_state(N, 10.0, 1.0)  # beta = 20
    assert state.observables().s_z == pytest.approx(0.0, abs=1e-3)
    np.testing.assert_allclose(np.diag(state.rho).real, 1 / (N + 1), atol=2e-3)


def test_quantum_state_breaks_mean_field_conservation():
    # |<s_+>|^2 + <s_z>^2 equals 1 at beta -> 0 but not in the quantum steady state.
    obs = dicke_steady_state(50, 0.75, 1.0).observables()
    assert abs(obs.coherent + obs.s_z**2 - 1.0) > 10 * 1e-8


@pytest.mark.parametrize("N", [2, 5, 12, 20])
def test_liouvillian_spectrum_is_dissipative(N):
    ev = np.linalg.eigvals(dicke_liouvillian(N, 0.35, 1.0).toarray())
    assert np.min(np.abs(ev)) < 1e-9
    assert ev.real.max() < 1e-9


def test_perturbed_saturated_branch_oscillates():
    # Branch 2 is neutrally stable: small perturbations orbit instead of decaying.
    gt, beta = 1.0, 2.0
    fixed = crf_branches(beta * gt / 2, gt)[0].state
    sz0 = -0.05
    init = SpinState(sz0, fixed.s_minus * np.sqrt(1 - sz0**2))
    traj = integrate_crf_ode(beta * gt / 2, 0.0, gt, 0.0, init, t_end=200.0, n_out=4001)
    dev0 = abs(sz0)
    late = traj.s_z[len(traj.t) // 2:]
    assert np.max(np.abs(traj.s_z)) < 20 * dev0
    assert np.max(np.abs(late)) > 0.5 * dev0
    crossings = np.count_nonzero(np.diff(np.sign(late - late.mean())))
    assert crossings >= 4
