"""Complex polynomials in z1, z1bar, z2, z2bar.

A monomial is indexed by ``(a1, b1, a2, b2)`` meaning
``z1**a1 * conj(z1)**b1 * z2**a2 * conj(z2)**b2``. Text keys such as
``"z1"``, ``"z1^2*z2b"`` or ``"1"`` are accepted wherever coefficient tables
are read from configuration documents.
"""
import re

import numpy as np

MAX_DEGREE = 4

_FACTOR = re.compile(r"^(z1b|z2b|z1|z2)(?:\^(\d+))?$")
_SLOT = {"z1": 0, "z1b": 1, "z2": 2, "z2b": 3}
_NAMES = ("z1", "z1b", "z2", "z2b")


def parse_monomial(key):
    """Parse ``"z1^2*z2b"`` into the exponent tuple ``(2, 0, 0, 1)``."""
    text = key.replace(" ", "")
    exps = [0, 0, 0, 0]
    if text in ("1", ""):
        return tuple(exps)
    for factor in text.split("*"):
        m = _FACTOR.match(factor)
        if m is None:
            raise ValueError(f"bad monomial factor {factor!r} in {key!r}")
        exps[_SLOT[m.group(1)]] += int(m.group(2) or 1)
    return tuple(exps)


def format_monomial(exps):
    parts = []
    for name, e in zip(_NAMES, exps):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts) or "1"


def _coerce_coeff(value):
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ValueError(f"complex coefficient must be [re, im], got {value!r}")
        return complex(float(value[0]), float(value[1]))
    return complex(value)


class ComplexPolynomial:
    """Sparse polynomial in ``(z1, z1bar, z2, z2bar)`` with complex coefficients."""

    def __init__(self, terms=None, max_degree=MAX_DEGREE):
        self.terms = {}
        for exps, coeff in (terms or {}).items():
            if isinstance(exps, str):
                exps = parse_monomial(exps)
            exps = tuple(int(e) for e in exps)
            if len(exps) != 4 or min(exps) < 0:
                raise ValueError(f"bad exponent tuple {exps!r}")
            if max_degree is not None and sum(exps) > max_degree:
                raise ValueError(
                    f"monomial {format_monomial(exps)} has degree {sum(exps)} > cap {max_degree}")
            c = _coerce_coeff(coeff)
            if not np.isfinite(c):
                raise ValueError("coefficients must be finite")
            if c != 0:
                self.terms[exps] = self.terms.get(exps, 0) + c
        self.max_degree = max_degree
        self._cache = {}

    @classmethod
    def from_table(cls, table, max_degree=MAX_DEGREE):
        """Build from a ``{"monomial": coeff}`` mapping (coeff may be ``[re, im]``)."""
        return cls({parse_monomial(k): v for k, v in table.items()}, max_degree=max_degree)

    def to_table(self):
        return {format_monomial(e): [c.real, c.imag] for e, c in sorted(self.terms.items())}

    @property
    def degree(self):
        return max((sum(e) for e in self.terms), default=0)

    @property
    def is_zero(self):
        return not self.terms

    def constant_term(self):
        return self.terms.get((0, 0, 0, 0), 0j)

    def coefficient_bound(self, radius):
        """Upper bound of ``|P|`` on the closed ball of the given radius."""
        return float(sum(abs(c) * radius ** sum(e) for e, c in self.terms.items()))

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros(z.shape[:-1], dtype=complex)
        if not self.terms:
            return out
        base = (z[..., 0], np.conj(z[..., 0]), z[..., 1], np.conj(z[..., 1]))
        powers = [[np.ones_like(b)] for b in base]
        top = max(max(e) for e in self.terms)
        for slot in range(4):
            for _ in range(top):
                powers[slot].append(powers[slot][-1] * base[slot])
        for e, c in self.terms.items():
            out = out + c * powers[0][e[0]] * powers[1][e[1]] * powers[2][e[2]] * powers[3][e[3]]
        return out

    def wirtinger(self, slot):
        """Derivative with respect to z1, z1bar, z2 or z2bar (slot 0..3)."""
        key = ("w", slot)
        if key not in self._cache:
            terms = {}
            for e, c in self.terms.items():
                if e[slot]:
                    f = list(e)
                    f[slot] -= 1
                    terms[tuple(f)] = terms.get(tuple(f), 0) + c * e[slot]
            self._cache[key] = ComplexPolynomial(terms, max_degree=None)
        return self._cache[key]

    def real_partial(self, i):
        """Derivative along the real coordinate ``i`` of ``(x1, y1, x2, y2)``."""
        key = ("r", i)
        if key not in self._cache:
            k, imag = divmod(i, 2)
            dz, dzb = self.wirtinger(2 * k), self.wirtinger(2 * k + 1)
            if imag:
                terms = _combine(dz.terms, 1j, dzb.terms, -1j)
            else:
                terms = _combine(dz.terms, 1, dzb.terms, 1)
            self._cache[key] = ComplexPolynomial(terms, max_degree=None)
        return self._cache[key]

    def scaled(self, factor):
        return ComplexPolynomial({e: factor * c for e, c in self.terms.items()},
                                 max_degree=self.max_degree)

    def substitute_scaling(self, s1, s2):
        """The polynomial ``z -> P(s1 z1, s2 z2)`` for real scale factors."""
        terms = {e: c * s1 ** (e[0] + e[1]) * s2 ** (e[2] + e[3]) for e, c in self.terms.items()}
        return ComplexPolynomial(terms, max_degree=self.max_degree)

    def __add__(self, other):
        return ComplexPolynomial(_combine(self.terms, 1, other.terms, 1), max_degree=None)

    def __eq__(self, other):
        return isinstance(other, ComplexPolynomial) and self.terms == other.terms

    def __repr__(self):
        body = " + ".join(f"({c:.6g})*{format_monomial(e)}" for e, c in sorted(self.terms.items()))
        return f"ComplexPolynomial({body or '0'})"


def _combine(a, ca, b, cb):
    out = {}
    for e, c in a.items():
        out[e] = out.get(e, 0) + ca * c
    for e, c in b.items():
        out[e] = out.get(e, 0) + cb * c
    return {e: c for e, c in out.items() if c != 0}
