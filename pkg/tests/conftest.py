import numpy as np
import pytest

from acxkit.core import ComplexPolynomial, parse_monomial, DeformationData, PolynomialDefiningFunction

# monomials without constant term, degree <= 3, used for random deformations
DEFORM_MONOMIALS = ["z1", "z1b", "z2", "z2b", "z1^2", "z1*z2b", "z2b^2", "z1b*z2", "z1*z1b*z2"]
# real-valued polynomial defining functions: Re of a random table plus |z|^2
R_MONOMIALS = ["z2", "z1^2", "z1*z2", "z1^2*z2b", "z1*z1b*z2", "z1^3", "z2^2*z1b", "z1^2*z1b^2"]


def random_deformation(rng, size=0.08, radius=1.0, terms=3):
    def table():
        keys = rng.choice(DEFORM_MONOMIALS, size=terms, replace=False)
        return {k: list(size * rng.normal(size=2)) for k in keys}
    A1, A2 = table(), table()
    bound = sum(np.hypot(*c) * radius ** sum(parse_monomial(k)) for t in (A1, A2) for k, c in t.items())
    if bound > 0.45:
        # keep the structure well inside the ellipticity bound
        A1, A2 = ({k: [x * 0.45 / bound for x in c] for k, c in t.items()} for t in (A1, A2))
    return DeformationData.from_tables(A1, A2, radius=radius)


def random_defining_function(rng, size=0.3):
    table = {k: list(size * rng.normal(size=2)) for k in R_MONOMIALS}
    table["z1*z1b"] = 1.0
    table["z2*z2b"] = 1.0
    return PolynomialDefiningFunction(ComplexPolynomial.from_table(table))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
