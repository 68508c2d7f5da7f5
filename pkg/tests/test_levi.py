import numpy as np
import pytest

from acxkit.core import (STANDARD, Ball, DeformationData, DeformationStructure,
                         PolynomialDefiningFunction, is_strictly_psh, levi_form, levi_matrix)

from conftest import random_defining_function, random_deformation
from oracles import levi_circulation


def sphere():
    return PolynomialDefiningFunction.from_table({"z1*z1b": 1.0, "z2*z2b": 1.0})


def test_sphere_standard_value():
    assert levi_form(sphere(), STANDARD, np.zeros(2), np.array([1.0, 0])) == pytest.approx(4.0)


def test_pluriharmonic_is_flat():
    r = PolynomialDefiningFunction.from_table({"z2": 2.0})
    assert levi_form(r, STANDARD, np.array([0.1, 0.2j]), np.array([0.3, 1j])) == pytest.approx(0, abs=1e-14)


def test_levi_is_quadratic_in_vector(rng):
    r = random_defining_function(rng)
    J = DeformationStructure(random_deformation(rng))
    p = np.array([0.1 - 0.05j, 0.2j])
    X = np.array([0.3 + 0.2j, -0.4 + 0.1j])
    base = levi_form(r, J, p, X)
    for t in (-2, -1, 0.5, 3):
        assert levi_form(r, J, p, t * X) == pytest.approx(t * t * base, rel=1e-12)


def test_matches_circulation_oracle(rng):
    for _ in range(5):
        r = random_defining_function(rng)
        J = DeformationStructure(random_deformation(rng))
        p = 0.3 * (rng.normal(size=2) + 1j * rng.normal(size=2)) / 2
        X = rng.normal(size=2) + 1j * rng.normal(size=2)
        want = levi_circulation(r.gradient, J, p, X)
        assert levi_form(r, J, p, X) == pytest.approx(want, rel=1e-8)


def test_exact_and_difference_methods_agree(rng):
    r = random_defining_function(rng)
    J = DeformationStructure(random_deformation(rng))
    p = np.array([0.1, -0.2j])
    a = levi_matrix(r, J, p, method="exact")
    b = levi_matrix(r, J, p, method="fd")
    assert np.allclose(a, b, atol=1e-5)


def test_psh_checks():
    r = PolynomialDefiningFunction.from_table({"z2": 1.0})
    assert not is_strictly_psh(r, STANDARD, Ball((0, 0), 0.5), 3).verdict
    d = DeformationData.from_tables({"z1": 0.05})
    rep = is_strictly_psh(sphere(), DeformationStructure(d), Ball((0, 0), 0.5), 5)
    assert rep.verdict
    assert rep.min_eigenvalue > 0
