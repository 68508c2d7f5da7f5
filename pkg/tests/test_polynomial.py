import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from acxkit.core import ComplexPolynomial, PolynomialDefiningFunction, parse_monomial
from acxkit.core.polynomial import format_monomial

from oracles import fd_jacobian, real4


def test_parse_monomial():
    assert parse_monomial("z1^2*z2b") == (2, 0, 0, 1)
    assert parse_monomial("z1*z1b") == (1, 1, 0, 0)
    assert parse_monomial("1") == (0, 0, 0, 0)
    with pytest.raises(ValueError):
        parse_monomial("z3")


@given(st.tuples(*[st.integers(0, 3)] * 4))
def test_format_parse_round_trip(exps):
    assert parse_monomial(format_monomial(exps)) == exps


def test_degree_cap():
    with pytest.raises(ValueError, match="degree 5"):
        ComplexPolynomial.from_table({"z1^3*z2^2": 1.0})


def test_evaluation_matches_closed_form():
    P = ComplexPolynomial.from_table({"z1^2*z2b": [0.5, -1], "z1*z1b": 2, "z2": [0, 1]})
    z = np.array([[0.3 + 0.1j, -0.2 + 0.7j], [1j, 2.0]])
    z1, z2 = z[:, 0], z[:, 1]
    want = (0.5 - 1j) * z1 ** 2 * np.conj(z2) + 2 * abs(z1) ** 2 + 1j * z2
    assert np.allclose(P(z), want, atol=1e-15)


def test_wirtinger_derivative():
    P = ComplexPolynomial.from_table({"z1^2*z1b": 1.0})
    z = np.array([0.4 - 0.3j, 0.1])
    assert np.isclose(P.wirtinger(0)(z), 2 * z[0] * np.conj(z[0]))
    assert np.isclose(P.wirtinger(1)(z), z[0] ** 2)


def test_gradient_and_hessian_against_differences(rng):
    from conftest import random_defining_function
    r = random_defining_function(rng)
    z = np.array([0.2 - 0.1j, -0.3 + 0.25j])
    f = lambda x: r(x[0::2] + 1j * x[1::2])  # noqa: E731
    g = fd_jacobian(f, real4(z), h=1e-6)
    assert np.allclose(r.gradient(z), g, atol=1e-8)
    H = fd_jacobian(lambda x: r.gradient(x[0::2] + 1j * x[1::2]), real4(z), h=1e-6)
    assert np.allclose(r.hessian(z), H, atol=1e-7)
    assert np.allclose(r.hessian(z), r.hessian(z).T)


def test_defining_function_is_real_part():
    r = PolynomialDefiningFunction.from_table({"z2": 2.0, "z1*z1b": 1.0})
    z = np.array([0.5j, -0.25 + 3j])
    assert np.isclose(r(z), -0.5 + 0.25)
