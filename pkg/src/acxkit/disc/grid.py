"""Polar discretization of the unit disc and its linear operators.

Radii are ``r_j = (j + 1/2) h`` with ``h = 1 / (N - 1/2)``, so the last ring
is the unit circle and the center is not a node. A field is stored as an
``(..., N, N)`` array indexed ``[radius, angle]``. Angular dependence is
handled by FFT; each Fourier mode ``m`` has a radial profile of parity
``(-1)^m``, which lets radial finite-difference stencils reach across the
origin onto the mirrored grid.

On mode ``m`` the Wirtinger derivatives act as

    d/dzeta    : m -> m - 1,  (f' + m f / r) / 2
    d/dzetabar : m -> m + 1,  (f' - m f / r) / 2

and the Cauchy-Green transform ``T`` (the inverse of ``d/dzetabar`` whose
trace on the unit circle has only negative Fourier modes) solves
``U' - (m - 1) U / r = 2 g_m`` for the output mode ``m - 1`` with
``U(1) = 0`` whenever ``m >= 1``.
"""
import numpy as np
from scipy.linalg import solve_banded

from .._validation import check_int

SOLVER_ORDER = 4
ESTIMATE_ORDER = 8


def fornberg(x0, x, k):
    """Finite-difference weights for the ``k``-th derivative at ``x0`` on nodes ``x``."""
    n = len(x)
    c = np.zeros((n, k + 1))
    c1, c4 = 1.0, x[0] - x0
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, k)
        c2, c5, c4 = 1.0, c4, x[i] - x0
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for s in range(mn, 0, -1):
                    c[i, s] = c1 * (s * c[i - 1, s - 1] - c5 * c[i - 1, s]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for s in range(mn, 0, -1):
                c[j, s] = (c4 * c[j, s] - s * c[j, s - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c[:, k]


def diff_matrix(x, order):
    """First-derivative matrix with stencils of ``order + 1`` nodes (one-sided near the ends)."""
    n, w = len(x), order + 1
    D = np.zeros((n, n))
    for i in range(n):
        lo = min(max(i - order // 2, 0), n - w)
        idx = np.arange(lo, lo + w)
        D[i, idx] = fornberg(x[i], x[idx], 1)
    return D


def _to_banded(L):
    nz = np.nonzero(L)
    off = nz[1] - nz[0]
    lower, upper = int(max(0, -off.min())), int(max(0, off.max()))
    n = len(L)
    ab = np.zeros((lower + upper + 1, n))
    for d in range(-lower, upper + 1):
        diag = np.diagonal(L, d)
        if d >= 0:
            ab[upper - d, d:] = diag
        else:
            ab[upper - d, :n + d] = diag
    return (lower, upper), ab


class DiscGrid:
    """Tensor-product polar grid of the closed unit disc with resolution ``N``.

    Parameters
    ----------
    N : int
        Number of radii and of angles; even and at least 8.
    """

    def __init__(self, N):
        N = check_int("N", N, 8)
        if N % 2:
            raise ValueError(f"N must be even, got {N}")
        self.N = N
        self.h = 1.0 / (N - 0.5)
        self.r = (np.arange(N) + 0.5) * self.h
        self.theta = 2 * np.pi * np.arange(N) / N
        self.modes = np.fft.fftfreq(N, 1.0 / N).astype(int)
        R, TH = np.meshgrid(self.r, self.theta, indexing="ij")
        self.zeta = R * np.exp(1j * TH)
        xfull = np.concatenate([-self.r[::-1], self.r])
        self.xfull = xfull
        self._D = {o: self._fold(diff_matrix(xfull, o)) for o in (SOLVER_ORDER, ESTIMATE_ORDER)}
        self._cw = fornberg(0.0, self.r[:4] ** 2, 0)
        self._T = {}
        for m in self.modes:
            if m <= -N // 2 + 1:
                continue
            D = self._D[SOLVER_ORDER][(m - 1) % 2]
            L = D - (m - 1) * np.diag(1.0 / self.r)
            if m >= 1:
                L[-1, :] = 0.0
                L[-1, -1] = 1.0
            self._T[int(m)] = _to_banded(L)

    def _fold(self, D):
        """Radial derivative matrices on ``r > 0`` for even and odd profiles."""
        N = self.N
        Dpos, Dneg = D[N:, N:], D[N:, :N][:, ::-1]
        return Dpos + Dneg, Dpos - Dneg

    @property
    def shape(self):
        return (self.N, self.N)

    @property
    def boundary_ring(self):
        return self.N - 1

    def sample(self, func):
        """Evaluate ``func(zeta)`` on the nodes; components go on leading axes."""
        return np.asarray(func(self.zeta))

    def spectrum(self, f):
        return np.fft.fft(f, axis=-1) / self.N

    def synthesize(self, F):
        return np.fft.ifft(F, axis=-1) * self.N

    def cauchy_green(self, g):
        """Cauchy-Green transform of a field ``g`` of shape ``(..., N, N)``."""
        g = np.asarray(g, dtype=complex)
        lead = g.shape[:-2]
        G = self.spectrum(g.reshape((-1,) + self.shape))
        U = np.zeros_like(G)
        for k, m in enumerate(self.modes):
            band = self._T.get(int(m))
            if band is None:
                continue
            rhs = 2.0 * G[:, :, k].T
            if m >= 1:
                rhs[-1] = 0.0
            U[:, :, (m - 1) % self.N] = solve_banded(band[0], band[1], rhs).T
        return self.synthesize(U).reshape(lead + self.shape)

    def derivatives(self, f, order=SOLVER_ORDER):
        """``(d f / d zeta, d f / d zetabar)`` for a field of shape ``(..., N, N)``."""
        f = np.asarray(f, dtype=complex)
        lead = f.shape[:-2]
        F = self.spectrum(f.reshape((-1,) + self.shape))
        De, Do = self._D[order]
        dz = np.zeros_like(F)
        dzb = np.zeros_like(F)
        N = self.N
        keep = np.abs(self.modes) < N // 2 - 1
        m = self.modes
        even = keep & (m % 2 == 0)
        odd = keep & (m % 2 == 1)
        Fp = np.zeros_like(F)
        Fp[:, :, even] = np.einsum("ij,bjk->bik", De, F[:, :, even])
        Fp[:, :, odd] = np.einsum("ij,bjk->bik", Do, F[:, :, odd])
        mr = m[None, None, :] * F / self.r[None, :, None]
        up = 0.5 * (Fp - mr)
        down = 0.5 * (Fp + mr)
        idx = np.nonzero(keep)[0]
        dz[:, :, (m[idx] - 1) % N] = down[:, :, idx]
        dzb[:, :, (m[idx] + 1) % N] = up[:, :, idx]
        return (self.synthesize(dz).reshape(lead + self.shape),
                self.synthesize(dzb).reshape(lead + self.shape))

    def center_value(self, f):
        """Value at ``zeta = 0``: mode-0 profile extrapolated as a polynomial in ``r^2``."""
        f = np.asarray(f, dtype=complex)
        F0 = self.spectrum(f)[..., :4, 0]
        return F0 @ self._cw

    def interpolate(self, f, zeta, width=8):
        """Evaluate a field at arbitrary points of the closed disc.

        Each Fourier mode is interpolated radially by a ``width``-point Lagrange
        stencil on the mirrored radial grid, then the modes are summed.
        """
        f = np.asarray(f, dtype=complex)
        zeta = np.asarray(zeta, dtype=complex)
        lead = f.shape[:-2]
        F = self.spectrum(f.reshape((-1,) + self.shape))
        sign = np.where(self.modes % 2 == 0, 1.0, -1.0)
        Ffull = np.concatenate([F[:, ::-1, :] * sign, F], axis=1)
        rho, phi = np.abs(zeta).ravel(), np.angle(zeta).ravel()
        x = self.xfull
        n = len(x)
        pos = np.searchsorted(x, rho)
        lo = np.clip(pos - width // 2, 0, n - width)
        idx = lo[:, None] + np.arange(width)[None, :]
        xs = x[idx]
        W = np.ones_like(xs)
        for a in range(width):
            for b in range(width):
                if a != b:
                    W[:, a] *= (rho - xs[:, b]) / (xs[:, a] - xs[:, b])
        prof = np.einsum("qa,cqam->cqm", W, Ffull[:, idx, :])
        phase = np.exp(1j * np.outer(phi, self.modes))
        out = np.sum(prof * phase[None], axis=-1)
        return out.reshape(lead + zeta.shape)
