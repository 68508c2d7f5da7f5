"""Picard solver for J-holomorphic discs in deformation form.

A disc ``f = (f1, f2)`` is J-holomorphic for the structure of ``(A1, A2)``
exactly when ``d f_j / d zetabar = A_j(f) conj(d f_j / d zeta)``. Writing
``f = h + T[A(f) conj(f_zeta)]`` with ``h`` holomorphic turns this into a
fixed-point problem; after each step the holomorphic part is corrected by an
affine term so that ``f(0) = p`` and ``df(0) d/dx = v`` hold exactly.
"""
import csv
import functools
from dataclasses import dataclass

import numpy as np

from .._validation import as_point, as_vector, check_int, check_positive
from ..errors import DivergenceError, RegionError, ToleranceError
from ..core.structures import REGION_SLACK
from .grid import ESTIMATE_ORDER, DiscGrid

STALL_WINDOW = 10


@functools.lru_cache(maxsize=8)
def get_grid(N):
    """Shared grid instance per resolution (construction factors the mode operators)."""
    return DiscGrid(N)


@dataclass(frozen=True)
class SolverConfig:
    """Parameters of :func:`solve_disc`.

    Attributes
    ----------
    N : int
        Grid resolution (radii and angles).
    tol : float
        Sup-norm threshold on the Picard update.
    max_iter : int
    radius_scale : float
        ``rho`` in ``(0, 1]``: the disc solved is ``zeta -> F(rho zeta)`` for
        the disc ``F`` with ``F'(0) = v``, so its own derivative is ``rho v``.
    """

    N: int = 64
    tol: float = 1e-10
    max_iter: int = 200
    radius_scale: float = 1.0

    def __post_init__(self):
        check_int("N", self.N, 8)
        check_positive("tol", self.tol)
        check_int("max_iter", self.max_iter, 1)
        rho = check_positive("radius_scale", self.radius_scale)
        if rho > 1:
            raise ValueError(f"radius_scale must be <= 1, got {rho}")


class DiscMap:
    """A map from the closed unit disc to C^2 sampled on a :class:`DiscGrid`.

    Attributes
    ----------
    values : ndarray, shape (2, N, N)
    center : ndarray, shape (2,)
        Value at ``zeta = 0`` (the center is not a grid node).
    dz, dzb : ndarray, shape (2, N, N)
        High-order estimates of the Wirtinger derivatives.
    residual_field : ndarray, shape (N, N)
        Pointwise equation residual (max over components); zero when no
        deformation is attached.
    """

    def __init__(self, grid, values, center, deformation=None, iterations=0, history=None):
        self.grid = grid
        self.values = np.asarray(values, dtype=complex)
        self.center = np.asarray(center, dtype=complex)
        self.deformation = deformation
        self.iterations = iterations
        self.history = list(history or [])
        self.dz, self.dzb = grid.derivatives(self.values, order=ESTIMATE_ORDER)
        self.residual_field = pointwise_residual(self, deformation)
        self.residual = float(self.residual_field[:-1].max())

    @classmethod
    def from_function(cls, func, N=64, deformation=None):
        """Sample an explicit map ``zeta -> (f1, f2)`` (used for baselines and tests)."""
        grid = get_grid(N)
        vals = np.stack(np.broadcast_arrays(*func(grid.zeta)))
        center = np.array(func(np.zeros(1, dtype=complex)), dtype=complex).reshape(2)
        return cls(grid, vals, center, deformation)

    @property
    def N(self):
        return self.grid.N

    def evaluate(self, zeta):
        """Values at arbitrary points of the closed disc, shape ``zeta.shape + (2,)``."""
        return np.moveaxis(self.grid.interpolate(self.values, zeta), 0, -1)

    def derivative_at(self, zeta):
        dz = np.moveaxis(self.grid.interpolate(self.dz, zeta), 0, -1)
        dzb = np.moveaxis(self.grid.interpolate(self.dzb, zeta), 0, -1)
        return dz, dzb

    def center_derivative(self):
        """``df(0) d/dx`` from the center values of the derivative fields."""
        return self.grid.center_value(self.dz) + self.grid.center_value(self.dzb)

    def all_points(self):
        """Grid values plus the center, as points of C^2 of shape ``(N*N + 1, 2)``."""
        return np.concatenate([self.values.reshape(2, -1).T, self.center[None]], axis=0)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["r", "theta", "re_f1", "im_f1", "re_f2", "im_f2", "residual"])
            g = self.grid
            w.writerow([_fmt(0.0), _fmt(0.0), _fmt(self.center[0].real), _fmt(self.center[0].imag),
                        _fmt(self.center[1].real), _fmt(self.center[1].imag), _fmt(0.0)])
            for i, r in enumerate(g.r):
                for k, th in enumerate(g.theta):
                    f = self.values[:, i, k]
                    w.writerow([_fmt(r), _fmt(th), _fmt(f[0].real), _fmt(f[0].imag),
                                _fmt(f[1].real), _fmt(f[1].imag), _fmt(self.residual_field[i, k])])


def _fmt(x):
    return "%.17g" % float(x)


def cauchy_green(g, grid=None):
    """Cauchy-Green transform ``T g(zeta) = -(1/pi) int_disc g(w) / (w - zeta) dA(w)``.

    ``g`` is a field of shape ``(..., N, N)`` on the grid of resolution ``N``.
    """
    g = np.asarray(g, dtype=complex)
    grid = grid or get_grid(g.shape[-1])
    return grid.cauchy_green(g)


def _coefficients(d, f):
    pts = np.moveaxis(f, 0, -1)
    return np.moveaxis(d.values(pts), -1, 0)


def pointwise_residual(fmap, d):
    """``max_j |f_j,zetabar - A_j(f) conj(f_j,zeta)|`` at every node."""
    if d is None:
        return np.abs(fmap.dzb).max(axis=0)
    A = _coefficients(d, fmap.values)
    return np.abs(fmap.dzb - A * np.conj(fmap.dz)).max(axis=0)


def residual(fmap, d=None):
    """Sup over interior nodes (the boundary ring excluded) of the equation residual."""
    d = d if d is not None else fmap.deformation
    return float(pointwise_residual(fmap, d)[:-1].max())


def _check_region(d, f):
    if d is not None and np.abs(f).max() > 0:
        if np.sqrt((np.abs(f) ** 2).sum(axis=0)).max() > d.radius + REGION_SLACK:
            raise RegionError("disc iterate leaves the validity region of the deformation")


def picard_step(grid, d, f, seed):
    """One corrected Picard update ``f -> seed + T[A(f) conj(f_zeta)] - affine correction``."""
    if d is None or d.is_zero:
        return seed.copy()
    dz, _ = grid.derivatives(f)
    T = grid.cauchy_green(_coefficients(d, f) * np.conj(dz))
    Tz, Tzb = grid.derivatives(T)
    c0 = grid.center_value(T)
    c1 = grid.center_value(Tz) + grid.center_value(Tzb)
    return seed + T - c0[:, None, None] - c1[:, None, None] * grid.zeta


def solve_disc(d, p, v, cfg=None, seed_coeffs=None):
    """Solve for the disc through ``p`` with ``df(0) d/dx = rho v``.

    Parameters
    ----------
    d : DeformationData or None
        ``None`` (or zero coefficients) means the standard structure.
    p, v : points of C^2
    cfg : SolverConfig
    seed_coeffs : sequence of points of C^2, optional
        Higher Taylor coefficients ``c2, c3, ...`` of the holomorphic seed
        ``h(zeta) = p + rho v zeta + sum c_k zeta^k``.

    Raises
    ------
    RegionError
        an iterate leaves the validity ball.
    DivergenceError
        the update fails to decrease over ten consecutive iterations.
    ToleranceError
        ``max_iter`` exhausted while still contracting.
    """
    cfg = cfg or SolverConfig()
    p = as_point(p)
    v = as_vector(v)
    grid = get_grid(cfg.N)
    rho = cfg.radius_scale
    zeta = grid.zeta
    seed = p[:, None, None] + rho * v[:, None, None] * zeta
    for k, c in enumerate(seed_coeffs or (), start=2):
        seed = seed + as_point(c)[:, None, None] * zeta ** k
    f = seed
    history = []
    best, since = np.inf, 0
    it = 0
    if d is not None and not d.is_zero:
        floor = 1e-14 * max(1.0, float(np.abs(seed).max()))
        for it in range(1, cfg.max_iter + 1):
            fn = picard_step(grid, d, f, seed)
            _check_region(d, fn)
            upd = float(np.abs(fn - f).max())
            history.append(upd)
            f = fn
            if upd < cfg.tol:
                break
            if upd < best:
                best, since = upd, 0
            else:
                since += 1
            if since >= STALL_WINDOW:
                if best <= 100 * floor:
                    break
                raise DivergenceError(f"Picard update stalled at {best:.3e} after {it} iterations")
        else:
            raise ToleranceError(f"no convergence in {cfg.max_iter} iterations (update {upd:.3e})")
    return DiscMap(grid, f, p, deformation=d, iterations=it, history=history)


def c1_c0_ratio(fmap, K=0.5, n_r=17, n_theta=64):
    """``(sup_K |f| + sup_K |df|) / sup_K |f|`` on the sub-disc of radius ``K``.

    ``|df|`` is the operator norm of the real 4x2 differential.
    """
    K = check_positive("K", K)
    if K >= 1:
        raise ValueError(f"K must be < 1, got {K}")
    rad = np.linspace(0.0, K, n_r)
    th = 2 * np.pi * np.arange(n_theta) / n_theta
    z = (rad[:, None] * np.exp(1j * th[None, :])).ravel()
    vals = fmap.evaluate(z)
    c0 = float(np.linalg.norm(vals, axis=-1).max())
    if c0 == 0:
        raise ValueError("sup |f| vanishes on K: ratio undefined")
    dz, dzb = fmap.derivative_at(z)
    a, b = dz + dzb, 1j * (dz - dzb)
    gaa = np.sum(np.abs(a) ** 2, axis=-1)
    gbb = np.sum(np.abs(b) ** 2, axis=-1)
    gab = np.sum((np.conj(a) * b).real, axis=-1)
    lam = 0.5 * (gaa + gbb) + np.sqrt(0.25 * (gaa - gbb) ** 2 + gab ** 2)
    c1 = float(np.sqrt(lam).max())
    return (c0 + c1) / c0
