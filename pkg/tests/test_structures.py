import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from acxkit.core import (STANDARD, Ball, ConstantStructure, DeformationData, DeformationStructure,
                         Polydisc, TransportedStructure, AffineMap, c1_deviation, c2_distance,
                         deformation_from_matrix, matrix_from_deformation, validate_structure)
from acxkit.core.structures import conjugating_map, intertwining_frame
from acxkit.errors import EllipticityError, RegionError

from conftest import random_deformation
from oracles import fd_jacobian, real4


def test_standard_validates_to_zero():
    rep = validate_structure(STANDARD, Polydisc((0, 0), (0.5, 0.5)), 5)
    assert rep.max_residual == 0 and rep.passed


def test_identity_matrix_residual_is_four():
    # Frobenius norm of I^2 + I = 2 I
    rep = validate_structure(ConstantStructure(np.eye(4)), Ball(), 3, derivatives=False)
    assert rep.max_residual == pytest.approx(4.0)
    assert not rep.passed


def test_deformation_validates():
    d = DeformationData.from_tables({"z2": 0.3}, radius=1.0)
    rep = validate_structure(DeformationStructure(d), Polydisc((0, 0), (0.7, 0.7)), 9)
    assert rep.max_residual <= 1e-10


def test_ellipticity_rejected():
    with pytest.raises(EllipticityError):
        DeformationData.from_tables({"z1": 0.8})


def test_constant_term_rejected():
    with pytest.raises(ValueError):
        DeformationData.from_tables({"1": 0.1})


def test_outside_validity_ball():
    d = DeformationData.from_tables({"z1": 0.1}, radius=0.5)
    with pytest.raises(RegionError):
        matrix_from_deformation(d, np.array([0.6, 0]))


@settings(max_examples=40, deadline=None)
@given(st.complex_numbers(max_magnitude=0.9), st.complex_numbers(max_magnitude=0.9))
def test_matrix_deformation_round_trip(a1, a2):
    # a constant-coefficient check: the 2x2 blocks only depend on the values A_j(z)
    d = DeformationData.from_tables({"z1": a1 / 2, "z2": a2 / 2}, radius=1.0, kappa=0.99)
    z = np.array([1.0, 1.0]) / np.sqrt(2) * 0.99
    M = matrix_from_deformation(d, z)
    assert np.allclose(M @ M, -np.eye(4), atol=1e-10)
    A = deformation_from_matrix(M)
    assert np.allclose(A, d.values(z), atol=1e-10)


def test_holomorphic_disc_condition(rng):
    """A linear map with f_zetabar = A conj(f_zeta) intertwines J_st and J."""
    d = random_deformation(rng, size=0.1)
    z = np.array([0.2 - 0.1j, 0.15 + 0.3j])
    A = d.values(z)
    a = rng.normal(size=2) + 1j * rng.normal(size=2)
    b = A * np.conj(a)
    dx, dy = a + b, 1j * (a - b)       # df(d/dx), df(d/dy)
    J = DeformationStructure(d)(z)
    assert np.allclose(J @ real4(dx), real4(dy), atol=1e-13)


def test_exact_jacobian_against_differences(rng):
    d = random_deformation(rng)
    J = DeformationStructure(d)
    z = np.array([0.3 + 0.1j, -0.2 + 0.2j])
    D = fd_jacobian(lambda x: J(x[0::2] + 1j * x[1::2]), real4(z), h=1e-6)
    assert np.allclose(np.moveaxis(J.jacobian(z), 0, -1), D, atol=1e-8)


def test_transported_structure_squares_to_minus_one(rng):
    J = DeformationStructure(random_deformation(rng))
    T = AffineMap(rng.normal(size=(4, 4)), (0.1, 0.2))
    Jt = TransportedStructure(J, T)
    w = T(np.array([[0.1, 0.2j], [0.3, -0.1]]))
    M = Jt(w)
    assert np.allclose(M @ M, -np.eye(4), atol=1e-10)


def test_transported_magnitude_bound():
    """Dilation by tau scales a linear coefficient c z1 to c sqrt(tau) w1."""
    c = 0.2
    d = DeformationData.from_tables({"z1": c})
    tau = 1e-2
    Jt = TransportedStructure(DeformationStructure(d), AffineMap.dilation(tau))
    s0, _ = c1_deviation(Jt, Polydisc((0, 0), (1.0, 1.0)), 5)
    assert s0 <= 0.1 * abs(c) * 2.1  # |J - J_st| ~ 2 |A| for small A
    assert s0 > 0


def test_c2_distance_zero_for_equal():
    assert c2_distance(STANDARD, STANDARD, Ball(), 3) == 0.0


def test_intertwining_frame(rng):
    J = DeformationStructure(random_deformation(rng, size=0.15))
    M = J(np.array([0.2, 0.1j]))
    B = intertwining_frame(M)
    assert np.allclose(np.linalg.inv(B) @ M @ B, STANDARD.M, atol=1e-12)
    T = conjugating_map(M, (0.2, 0.1j))
    assert np.allclose(T(np.array([0.2, 0.1j])), 0)
