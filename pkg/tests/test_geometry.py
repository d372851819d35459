import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from atomarray.errors import InvalidArgumentError
from atomarray.geometry import (
    SIGMA_PLUS,
    X_HAT,
    ArrayGeometry,
    DisorderSpec,
    build_square_array,
    displacement_std,
    min_pair_distance,
    sample_disorder,
)


def test_square_array_is_centered_with_lattice_spacing():
    g = build_square_array(3, 0.2)
    assert g.n_atoms == 9
    np.testing.assert_allclose(g.positions.mean(axis=0), 0.0, atol=1e-15)
    assert min_pair_distance(g) == pytest.approx(0.2)
    np.testing.assert_array_equal(g.positions[:, 2], 0.0)


def test_positions_are_read_only():
    g = build_square_array(2, 0.1)
    with pytest.raises(ValueError):
        g.positions[0, 0] = 1.0


def test_dipole_is_normalized():
    g = build_square_array(2, 0.1, dipole=[2.0, 0, 0])
    np.testing.assert_allclose(g.dipole, X_HAT)
    assert np.linalg.norm(SIGMA_PLUS) == pytest.approx(1.0)


@pytest.mark.parametrize("n_side, a", [(0, 0.1), (2, 0.0), (2, -1.0)])
def test_bad_lattice_arguments(n_side, a):
    with pytest.raises(InvalidArgumentError):
        build_square_array(n_side, a)


def test_csv_round_trip():
    g = build_square_array(3, 0.17)
    text = g.to_csv()
    assert text.splitlines()[0] == "atom_index,x,y,z"
    back = ArrayGeometry.from_csv(text, 0.17, 3)
    np.testing.assert_array_equal(back.positions, g.positions)


def test_zero_disorder_returns_clean_lattice():
    g = build_square_array(3, 0.16)
    assert sample_disorder(g, DisorderSpec(0.0), 5) is g


def test_disorder_is_reproducible_and_stays_in_plane():
    g = build_square_array(4, 0.16)
    spec = DisorderSpec(0.2, seed=7)
    a = sample_disorder(g, spec, 3)
    b = sample_disorder(g, spec, 3)
    c = sample_disorder(g, spec, 4)
    np.testing.assert_array_equal(a.positions, b.positions)
    assert not np.array_equal(a.positions, c.positions)
    np.testing.assert_array_equal(a.positions[:, 2], 0.0)


def test_displacement_statistics_match_convention():
    g = build_square_array(30, 1.0)
    for convention, expected in (("per_axis", 0.1), ("total", 0.1 / np.sqrt(2))):
        spec = DisorderSpec(0.1, seed=1, convention=convention)
        assert displacement_std(spec, 1.0) == pytest.approx(expected)
        d = sample_disorder(g, spec, 0).positions - g.positions
        assert d[:, :2].std() == pytest.approx(expected, rel=0.06)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 6), st.floats(0.05, 1.0))
def test_square_array_spacing_property(n, a):
    g = build_square_array(n, a)
    if n > 1:
        assert min_pair_distance(g) == pytest.approx(a)
    assert g.positions.shape == (n * n, 3)
