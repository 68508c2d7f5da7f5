"""Real defining functions with gradient and Hessian access.

Derivatives are taken in the real coordinates ``(x1, y1, x2, y2)``.
Polynomial functions ``r = Re P`` are differentiated exactly; callables fall
back to centered finite differences.
"""
import numpy as np

from .._validation import as_points, check_matrix, to_complex
from .polynomial import ComplexPolynomial

_EYE4 = np.eye(4)


class DefiningFunction:
    """Base class. Subclasses implement ``__call__``, ``gradient`` and ``hessian``."""

    exact = False

    def value(self, z):
        return self(z)

    def hessian_fd(self, z, h=1e-4):
        """Hessian from centered differences of the gradient (used as an oracle)."""
        z = as_points(z)
        cols = []
        for k in range(4):
            dz = to_complex(h * _EYE4[k])
            cols.append((self.gradient(z + dz) - self.gradient(z - dz)) / (2 * h))
        H = np.stack(cols, axis=-1)
        return 0.5 * (H + np.swapaxes(H, -1, -2))


class PolynomialDefiningFunction(DefiningFunction):
    """``r(z) = Re P(z, zbar)`` for a :class:`ComplexPolynomial` ``P``."""

    exact = True

    def __init__(self, poly):
        if not isinstance(poly, ComplexPolynomial):
            poly = ComplexPolynomial(poly)
        self.poly = poly
        self._d1 = [poly.real_partial(i) for i in range(4)]
        self._d2 = [[self._d1[i].real_partial(j) for j in range(4)] for i in range(4)]

    @classmethod
    def from_table(cls, table):
        return cls(ComplexPolynomial.from_table(table))

    def to_table(self):
        return self.poly.to_table()

    def __call__(self, z):
        return self.poly(as_points(z)).real

    def gradient(self, z):
        z = as_points(z)
        return np.stack([d(z).real for d in self._d1], axis=-1)

    def hessian(self, z):
        z = as_points(z)
        H = np.empty(z.shape[:-1] + (4, 4))
        for i in range(4):
            for j in range(i, 4):
                H[..., i, j] = H[..., j, i] = self._d2[i][j](z).real
        return H

    def __repr__(self):
        return f"PolynomialDefiningFunction({self.poly!r})"


class CallableDefiningFunction(DefiningFunction):
    """Wrap a vectorized callable ``r(z)``; missing derivatives use finite differences.

    Parameters
    ----------
    func : callable
        Maps complex points ``(..., 2)`` to real values ``(...)``.
    gradient, hessian : callable, optional
        Analytic derivatives in real coordinates.
    h : float
        Step for the first-derivative stencil; second differences use ``1e-4``.
    """

    def __init__(self, func, gradient=None, hessian=None, h=1e-6, name="callable"):
        self.func = func
        self._grad = gradient
        self._hess = hessian
        self.h = h
        self.name = name

    def __call__(self, z):
        return np.asarray(self.func(as_points(z)), dtype=float)

    def gradient(self, z):
        z = as_points(z)
        if self._grad is not None:
            return np.asarray(self._grad(z), dtype=float)
        h = self.h
        out = [(self(z + to_complex(h * e)) - self(z - to_complex(h * e))) / (2 * h) for e in _EYE4]
        return np.stack(out, axis=-1)

    def hessian(self, z):
        z = as_points(z)
        if self._hess is not None:
            return np.asarray(self._hess(z), dtype=float)
        if self._grad is not None:
            return self.hessian_fd(z)
        # second differences of the values, step chosen for double precision
        h = 1e-4
        f0 = self(z)
        H = np.empty(z.shape[:-1] + (4, 4))
        for i in range(4):
            ei = to_complex(h * _EYE4[i])
            H[..., i, i] = (self(z + ei) - 2 * f0 + self(z - ei)) / h ** 2
            for j in range(i + 1, 4):
                ej = to_complex(h * _EYE4[j])
                H[..., i, j] = H[..., j, i] = (self(z + ei + ej) - self(z + ei - ej)
                                               - self(z - ei + ej) + self(z - ei - ej)) / (4 * h ** 2)
        return H

    def __repr__(self):
        return f"CallableDefiningFunction({self.name})"


class ComposedDefiningFunction(DefiningFunction):
    """``w -> r(T w) / scale`` for an affine map ``T``.

    This is the pullback used for scaled domains: with ``T = (Lambda o A)^-1``
    and ``scale = tau`` it is the normalized defining function of the image.
    """

    def __init__(self, r, affine, scale=1.0):
        self.r = r
        self.affine = affine
        self.scale = float(scale)
        self.exact = r.exact
        check_matrix(affine.linear)

    def _inner(self, w):
        return self.affine(as_points(w))

    def __call__(self, w):
        return self.r(self._inner(w)) / self.scale

    def gradient(self, w):
        return self.r.gradient(self._inner(w)) @ self.affine.linear / self.scale

    def hessian(self, w):
        L = self.affine.linear
        return L.T @ self.r.hessian(self._inner(w)) @ L / self.scale

    def __repr__(self):
        return f"ComposedDefiningFunction({self.r!r}, scale={self.scale:.6g})"


def unit_sphere_function(center=(0, 0), radius=1.0):
    """``|z - c|^2 - R^2`` as a polynomial defining function."""
    c1, c2 = as_points(center).reshape(2)
    terms = {(1, 1, 0, 0): 1.0, (0, 0, 1, 1): 1.0,
             (1, 0, 0, 0): -2 * np.conj(c1), (0, 0, 1, 0): -2 * np.conj(c2),
             (0, 0, 0, 0): abs(c1) ** 2 + abs(c2) ** 2 - radius ** 2}
    return PolynomialDefiningFunction(ComplexPolynomial(terms))


def gradient_norm(r, z):
    return np.linalg.norm(r.gradient(z), axis=-1)
