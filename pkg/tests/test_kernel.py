import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from atomarray import oracles
from atomarray.errors import CoincidentAtomsError, DomainError, InvalidArgumentError
from atomarray.geometry import SIGMA_PLUS, X_HAT, ArrayGeometry, build_square_array
from atomarray.kernel import dipole_kernel, interaction_matrix, matrix_to_csv

# Finite-difference oracle values, computed once and frozen.
FROZEN = [
    ((0.16, 0.0, 0.0), X_HAT, 4.08844242889154 + 0.9025156430454082j),
    ((0.0, 0.16, 0.0), X_HAT, -1.2447260635278246 + 0.8085449561428265j),
    ((0.3, 0.4, 0.0), SIGMA_PLUS, -0.26292106549907224 + 0.07599088775949432j),
    ((1.0, 0.0, 0.5), X_HAT, 0.06470214336661544 + 0.001560647302917351j),
]


@pytest.mark.parametrize("r, e, expected", FROZEN)
def test_kernel_matches_frozen_oracle(r, e, expected):
    assert dipole_kernel(r, e) == pytest.approx(expected, rel=1e-7)


def test_kernel_short_distance_limit():
    # Near field: e^{ikr}/kr * 1.5 * (-1/kr^2) (1 - 3 cos^2) dominates.
    r = 1e-3
    kr = 2 * np.pi * r
    val = dipole_kernel([0.0, r, 0.0], X_HAT)
    assert val.real == pytest.approx(-1.5 / kr**3, rel=1e-4)


def test_kernel_imaginary_part_tends_to_gamma():
    # Im G -> gamma as r -> 0 for any dipole orientation.
    for e in (X_HAT, SIGMA_PLUS):
        assert dipole_kernel([1e-4, 0, 0], e).imag == pytest.approx(1.0, rel=1e-6)


def test_kernel_is_vectorized():
    r = np.array([[0.1, 0, 0], [0, 0.2, 0], [0.3, 0.3, 0]])
    vals = dipole_kernel(r, X_HAT)
    assert vals.shape == (3,)
    for row, v in zip(r, vals):
        assert dipole_kernel(row, X_HAT) == pytest.approx(v, rel=1e-14)


def test_kernel_rejects_origin_and_bad_shape():
    with pytest.raises(DomainError):
        dipole_kernel([0.0, 0.0, 0.0], X_HAT)
    with pytest.raises(InvalidArgumentError):
        dipole_kernel([1.0, 0.0], X_HAT)


@settings(max_examples=40, deadline=None)
@given(st.tuples(*[st.floats(-2, 2)] * 3).filter(lambda v: np.linalg.norm(v) > 0.05))
def test_kernel_agrees_with_finite_differences(r):
    r = np.array(r)
    assert dipole_kernel(r, SIGMA_PLUS) == pytest.approx(oracles.kernel_finite_difference(r, SIGMA_PLUS),
                                                        rel=1e-6)


def test_kernel_is_even_in_separation(rng):
    r = rng.normal(size=(20, 3))
    np.testing.assert_allclose(dipole_kernel(r, SIGMA_PLUS), dipole_kernel(-r, SIGMA_PLUS), rtol=1e-14)


def test_interaction_matrix_structure():
    g = build_square_array(3, 0.2)
    H = interaction_matrix(g)
    np.testing.assert_array_equal(np.diag(H), 1j)
    np.testing.assert_allclose(H, H.T, rtol=0, atol=0)
    assert H[0, 1] == pytest.approx(dipole_kernel(g.positions[0] - g.positions[1], X_HAT))


def test_coincident_atoms_are_reported():
    pos = np.array([[0.0, 0, 0], [0.5, 0, 0], [0.5, 0, 0], [0.0, 0.5, 0]])
    g = ArrayGeometry(pos, 0.5, 2, X_HAT)
    with pytest.raises(CoincidentAtomsError) as err:
        interaction_matrix(g)
    assert err.value.pair == (1, 2)


def test_matrix_csv_dump():
    H = interaction_matrix(build_square_array(2, 0.2))
    lines = matrix_to_csv(H).splitlines()
    assert lines[0] == "j,l,re,im"
    assert len(lines) == 17
