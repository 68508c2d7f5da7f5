"""Independent reference computations used by the tests.

None of these share code paths with the package beyond evaluating a field or
a function at points.
"""
import numpy as np


def real4(z):
    z = np.asarray(z, dtype=complex)
    return np.stack([z[..., 0].real, z[..., 0].imag, z[..., 1].real, z[..., 1].imag], axis=-1)


def cplx(x):
    x = np.asarray(x, dtype=float)
    return x[..., 0::2] + 1j * x[..., 1::2]


def levi_circulation(grad, J, p, X, eps=2e-3, n_gauss=6):
    """``-d(J* dr)(X, JX)`` from the circulation of ``theta = dr o J`` around a small parallelogram.

    Stokes: the circulation around ``p + s X + t Y``, ``|s|, |t| <= eps / 2``,
    equals ``eps^2 d theta(X, Y) + O(eps^4)``; one Richardson step removes the
    ``eps^2`` term.
    """
    p = real4(p)
    X = real4(X)
    Y = J(cplx(p)) @ X
    xg, wg = np.polynomial.legendre.leggauss(n_gauss)

    def theta(x):
        g = grad(cplx(x))
        M = J(cplx(x))
        return np.einsum("...i,...ij->...j", g, M)

    def circ(e):
        corners = [p + e / 2 * (a * X + b * Y) for a, b in ((-1, -1), (1, -1), (1, 1), (-1, 1))]
        total = 0.0
        for k in range(4):
            a, b = corners[k], corners[(k + 1) % 4]
            pts = 0.5 * (a + b)[None] + 0.5 * np.outer(xg, b - a)
            total += 0.5 * np.sum(wg * (theta(pts) @ (b - a)))
        return total / e ** 2

    c1, c2 = circ(eps), circ(eps / 2)
    return -(4 * c2 - c1) / 3


def cauchy_green_quadrature(g, zeta, n_rho=48, n_phi=256):
    """``-(1/pi) int_D g(w) / (w - zeta) dA(w)`` in polar coordinates centered at ``zeta``.

    With ``w = zeta + rho e^{i phi}`` the kernel times the area element is
    ``e^{-i phi} d rho d phi``, which is smooth; ``rho`` runs to the unit circle.
    """
    zeta = complex(zeta)
    xg, wg = np.polynomial.legendre.leggauss(n_rho)
    phi = 2 * np.pi * np.arange(n_phi) / n_phi
    e = np.exp(1j * phi)
    c = (np.conj(zeta) * e).real
    R = -c + np.sqrt(c * c + 1 - abs(zeta) ** 2)
    rho = 0.5 * R[:, None] * (xg[None] + 1)
    w = zeta + rho * e[:, None]
    inner = 0.5 * R * np.sum(wg[None] * g(w), axis=1)
    return -(2 * np.pi / n_phi) * np.sum(inner * np.conj(e)) / np.pi


def poincare_distance_ball(a, b):
    """Kobayashi distance of the unit ball in C^2 between ``a`` and ``b``."""
    a, b = np.asarray(a, complex), np.asarray(b, complex)
    num = abs(1 - np.vdot(b, a)) ** 2
    den = (1 - np.vdot(a, a).real) * (1 - np.vdot(b, b).real)
    s = np.sqrt(max(0.0, 1 - den / num))
    return float(np.arctanh(s))


def ball_automorphism(a):
    """Automorphism of the unit ball in C^2 exchanging 0 and ``a`` (closed form)."""
    a = np.asarray(a, complex)
    aa = np.vdot(a, a).real
    s = np.sqrt(1 - aa)

    def phi(z):
        z = np.asarray(z, complex)
        Pz = np.vdot(a, z) / aa * a if aa else 0 * a
        Qz = z - Pz
        return (a - Pz - s * Qz) / (1 - np.vdot(a, z))
    return phi


def fd_jacobian(F, x, h=1e-6):
    """Real Jacobian of a map on R^n by central differences (plain loop)."""
    x = np.asarray(x, float)
    cols = []
    for i in range(len(x)):
        e = np.zeros_like(x)
        e[i] = h
        cols.append((np.asarray(F(x + e)) - np.asarray(F(x - e))) / (2 * h))
    return np.stack(cols, axis=-1)
