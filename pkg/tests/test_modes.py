import numpy as np
import pytest

from atomarray.errors import InvalidArgumentError
from atomarray.geometry import DisorderSpec, build_square_array
from atomarray.kernel import interaction_matrix
from atomarray.modes import (
    disorder_average,
    eigenmodes,
    extrapolate_linewidth,
    infinite_lattice_linewidth,
    lattice_mode_params,
    uniform_mode_params,
)

# eigen_overlap gamma_tilde for n_side = 2..6, frozen from a reference run.
EIGEN_GT_016 = [2.4357209550305026, 5.0121416434137416, 6.8464549197791582, 7.8196955169046696,
                8.222299678881628]


def test_site_averaged_is_mean_row_sum():
    g = build_square_array(3, 0.2)
    H = interaction_matrix(g)
    p = uniform_mode_params(g, "site_averaged", H=H)
    expected = (H.sum() - 9j) / 9
    assert complex(p.omega_tilde, p.gamma_tilde) == pytest.approx(expected, rel=1e-14)
    assert p.kappa == pytest.approx(expected)


def test_single_atom_has_no_collective_terms():
    p = uniform_mode_params(build_square_array(1, 0.1), "eigen_overlap")
    assert (p.omega_tilde, p.gamma_tilde) == (0.0, 0.0)


def test_two_atoms_match_closed_form():
    # For N = 2 the symmetric pair mode is exactly uniform: both methods agree.
    g = build_square_array(2, 0.3)
    a = uniform_mode_params(g, "site_averaged")
    b = uniform_mode_params(g, "eigen_overlap")
    assert b.overlap == pytest.approx(1.0)
    assert a.gamma_tilde == pytest.approx(b.gamma_tilde, rel=1e-10)
    assert a.omega_tilde == pytest.approx(b.omega_tilde, rel=1e-10)


def test_unknown_method():
    with pytest.raises(InvalidArgumentError):
        uniform_mode_params(build_square_array(2, 0.1), "nope")


def test_eigenmode_trace_identity(rng):
    H = interaction_matrix(build_square_array(5, 0.15))
    spec = eigenmodes(H)
    assert spec.linewidths.sum() == pytest.approx(25.0, rel=1e-12)
    assert spec.shifts.sum() == pytest.approx(np.trace(H).real, abs=1e-9)
    assert np.all(spec.linewidths > 0)
    assert 0 < spec.uniform_overlap[spec.uniform_index] <= 1


@pytest.mark.parametrize("n, expected", list(zip(range(2, 7), EIGEN_GT_016)))
def test_eigen_overlap_linewidths_frozen(n, expected):
    assert lattice_mode_params(0.16, n, "eigen_overlap").gamma_tilde == pytest.approx(expected, rel=1e-9)


def test_eigen_overlap_linewidth_grows_and_saturates():
    widths = [lattice_mode_params(0.17, n, "eigen_overlap").gamma_tilde for n in range(2, 9)]
    assert np.all(np.diff(widths) > 0)
    assert widths[-1] - widths[-2] < 0.1 * (widths[1] - widths[0])


def test_methods_converge_at_large_N():
    # The two estimators approach each other as edge effects shrink.
    gaps = []
    for n in (6, 12, 20):
        a = lattice_mode_params(0.16, n, "site_averaged").gamma_tilde
        b = lattice_mode_params(0.16, n, "eigen_overlap").gamma_tilde
        gaps.append(abs(a - b) / b)
    assert gaps[-1] < 0.1
    assert gaps[-1] < gaps[0]


def test_infinite_lattice_formula():
    assert infinite_lattice_linewidth(0.16) == pytest.approx(3 * np.pi / (2 * np.pi * 0.16) ** 2)


def test_extrapolation_needs_enough_sizes():
    with pytest.raises(InvalidArgumentError):
        extrapolate_linewidth(0.16, [10, 12], order=1)


def test_disorder_average_is_deterministic():
    g = build_square_array(4, 0.16)
    spec = DisorderSpec(0.2, n_samples=6, seed=3)
    a = disorder_average(g, spec, "eigen_overlap")
    b = disorder_average(g, spec, "eigen_overlap", n_workers=3)
    np.testing.assert_array_equal(a.gamma_samples, b.gamma_samples)
    assert a.stderr_gamma > 0
    assert a.as_params(16).gamma_tilde == a.gamma_tilde


def test_disorder_average_without_disorder():
    g = build_square_array(3, 0.16)
    s = disorder_average(g, DisorderSpec(0.0, n_samples=3), "site_averaged")
    assert s.stderr_gamma == 0.0
    assert s.gamma_tilde == uniform_mode_params(g).gamma_tilde


def test_disorder_average_needs_two_samples():
    with pytest.raises(InvalidArgumentError):
        disorder_average(build_square_array(2, 0.2), DisorderSpec(0.1, n_samples=1))
