"""Upper bounds for the Kobayashi-Royden metric from explicit discs.

For a query ``(p, v)`` the search maximizes ``t`` over holomorphic seeds

    h(zeta) = p + t u zeta + c_2 zeta^2 + ... + c_n zeta^n,     u = v / |v|,

subject to the solved disc staying in the domain; then ``K(p, v) <= |v| / t``.
For the standard structure the disc is the seed itself. For a deformed
structure the non-holomorphic part of the solved disc is frozen between
outer passes, and the final candidate is re-solved and checked for
containment on the full grid, shrinking the seed when it pokes out.
"""
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .._validation import as_point, as_vector, check_int
from ..core.structures import DeformationData, DeformationStructure, StructureField
from ..disc.solver import SolverConfig, get_grid, solve_disc
from ..errors import AcxError, RegionError

GOLDEN = 0.5 * (np.sqrt(5.0) - 1.0)


@dataclass(frozen=True)
class SearchConfig:
    """Extremal-disc search parameters.

    Attributes
    ----------
    seed_degree : int
        Degree of the holomorphic seed polynomial (1 gives linear discs).
    N : int
        Disc-solver resolution used for deformed structures and for the
        final containment check.
    n_boundary : int
        Constraint samples on the unit circle for the standard structure.
    outer_iter : int
        Frozen-correction passes for deformed structures.
    backtrack_steps : int
        Probe budget when shrinking an escaping seed.
    """

    seed_degree: int = 8
    N: int = 32
    n_boundary: int = 64
    outer_iter: int = 4
    backtrack_steps: int = 16
    maxiter: int = 300
    ftol: float = 1e-12

    def __post_init__(self):
        check_int("seed_degree", self.seed_degree, 1)
        check_int("N", self.N, 8)
        check_int("n_boundary", self.n_boundary, 8)
        check_int("outer_iter", self.outer_iter, 1)


@dataclass
class MetricEstimate:
    upper: float
    lower: float
    t: float
    coefficients: np.ndarray
    diagnostics: dict = field(default_factory=dict)

    @property
    def ok(self):
        return np.isfinite(self.upper)

    def row(self):
        return {"upper": self.upper, "lower": self.lower,
                "iterations": self.diagnostics.get("iterations", 0)}


def _deformation_of(structure):
    if structure is None or isinstance(structure, DeformationData):
        d = structure
    elif isinstance(structure, DeformationStructure):
        d = structure.d
    elif isinstance(structure, StructureField) and structure.name == "J_st":
        d = None
    else:
        raise TypeError("metric search accepts J_st or structures in deformation form")
    if d is not None and d.is_zero:
        d = None
    return d


class _SeedSpace:
    """Affine parametrization ``x -> seed values`` at a fixed set of disc samples."""

    def __init__(self, p, u, zeta, degree, scale):
        self.p, self.u, self.scale = p, u, scale
        self.P = np.stack([zeta ** k for k in range(1, degree + 1)], axis=1)
        self.nc = degree - 1

    def unpack(self, x):
        x = np.asarray(x) * self.scale
        nc = self.nc
        c = (x[1:1 + 2 * nc] + 1j * x[1 + 2 * nc:]).reshape(nc, 2)
        return x[0], c

    def values(self, x, extra=0.0):
        t, c = self.unpack(x)
        return self.p + t * self.P[:, :1] * self.u + self.P[:, 1:] @ c + extra

    def derivatives(self):
        """Complex ``d f / d x`` of shape ``(M, 2, n_params)`` (linear in ``x``)."""
        M, nc = len(self.P), self.nc
        D = np.zeros((M, 2, 1 + 4 * nc), dtype=complex)
        D[:, :, 0] = self.P[:, :1] * self.u
        for k in range(nc):
            for j in range(2):
                D[:, j, 1 + 2 * k + j] = self.P[:, 1 + k]
                D[:, j, 1 + 2 * nc + 2 * k + j] = 1j * self.P[:, 1 + k]
        return D * self.scale


def _optimize(domain, space, extra, x0, cfg):
    Df = space.derivatives()

    def cons(x):
        return -domain.constraints(space.values(x, extra)).ravel()

    def jac(x):
        G = domain.constraint_gradients(space.values(x, extra))
        gam = G[..., 0::2] + 1j * G[..., 1::2]
        return -np.einsum("smj,sjq->smq", np.conj(gam), Df).real.reshape(-1, Df.shape[-1])

    e0 = np.zeros_like(x0)
    e0[0] = -1.0
    res = minimize(lambda x: -x[0], x0, jac=lambda x: e0, method="SLSQP",
                   constraints=[{"type": "ineq", "fun": cons, "jac": jac}],
                   options={"maxiter": cfg.maxiter, "ftol": cfg.ftol})
    x = res.x
    # SLSQP may end marginally infeasible; pull back along the ray toward p
    for _ in range(60):
        if np.all(cons(x) >= -1e-14):
            break
        x = x * (1 - 1e-6)
    return x, int(res.nit)


def _pilot(domain, p, u, zeta):
    """Largest linear-seed coefficient keeping ``p + t u zeta`` in the domain (bisection)."""
    lo, hi = 0.0, 2.0 * domain.bounding_radius + np.linalg.norm(p - domain.center)
    for _ in range(32):
        mid = 0.5 * (lo + hi)
        if np.all(domain.contains(p + mid * zeta[:, None] * u)):
            lo = mid
        else:
            hi = mid
    return lo


def _sample_nodes(grid, n_boundary=None):
    if n_boundary is not None:
        th = 2 * np.pi * np.arange(n_boundary) / n_boundary
        ring = np.exp(1j * th)
        inner = 0.5 * ring[::2]
        return np.concatenate([ring, inner]), None
    N = grid.N
    idx = [(N - 1, k) for k in range(N)] + [(N // 2, k) for k in range(0, N, 2)]
    ii = np.array(idx)
    return grid.zeta[ii[:, 0], ii[:, 1]], ii


def _contained(domain, pts):
    return bool(np.all(domain.contains(pts)))


def kr_metric(domain, structure, p, v, cfg=None, barrier=None):
    """Upper (and optional lower) bound for the Kobayashi-Royden metric at ``(p, v)``.

    Parameters
    ----------
    domain : Region
    structure : None, StructureField (J_st or deformation form) or DeformationData
    p : point in the interior of ``domain``
    v : nonzero tangent vector
    cfg : SearchConfig
    barrier : callable ``(p, v) -> float``, optional
        Lower bound supplied by a plurisubharmonic barrier; clipped to
        ``[0, upper]``.

    Returns
    -------
    MetricEstimate
        ``upper = |v| / t`` with ``t`` the best admissible first coefficient;
        ``upper = inf`` (status ``"failed"``) when no admissible disc exists.
    """
    cfg = cfg or SearchConfig()
    p = as_point(p)
    v = as_vector(v, nonzero=True)
    if not np.all(domain.contains(p, tol=-1e-15)):
        raise RegionError("base point must lie in the interior of the domain")
    d = _deformation_of(structure)
    nv = float(np.linalg.norm(v))
    u = v / nv
    grid = get_grid(cfg.N)
    diag = {"status": "ok", "seed_degree": cfg.seed_degree}
    if d is None:
        zeta, _ = _sample_nodes(grid, cfg.n_boundary)
        t0 = _pilot(domain, p, u, zeta)
        if t0 <= 0:
            return _failed(nv, diag)
        space = _SeedSpace(p, u, zeta, cfg.seed_degree, t0)
        x0 = np.zeros(1 + 4 * space.nc)
        x0[0] = 0.5
        x, nit = _optimize(domain, space, 0.0, x0, cfg)
        t, c = space.unpack(x)
        # final containment on the full grid, shrinking toward p if needed
        full = _SeedSpace(p, u, np.concatenate([grid.zeta.ravel(), [0]]), cfg.seed_degree, t0)
        s = _shrink(lambda s: _contained(domain, full.values(s * x)), cfg.backtrack_steps)
        diag.update(iterations=nit, pilot=t0, shrink=s)
        t, c = s * t, s * c
    else:
        zeta, idx = _sample_nodes(grid)
        t0 = _pilot(domain, p, u, zeta)
        if t0 <= 0:
            return _failed(nv, diag)
        space = _SeedSpace(p, u, zeta, cfg.seed_degree, t0)
        full = _SeedSpace(p, u, grid.zeta.ravel(), cfg.seed_degree, t0)
        x = np.zeros(1 + 4 * space.nc)
        x[0] = 0.5
        scfg = SolverConfig(N=cfg.N, tol=1e-11)
        nit = 0

        def solve(xx):
            tt, cc = space.unpack(xx)
            return solve_disc(d, p, tt * u, scfg, seed_coeffs=list(cc))

        fmap = _try(solve, x)
        for _ in range(cfg.outer_iter):
            if fmap is None:
                break
            seedvals = full.values(x).T.reshape(2, cfg.N, cfg.N)
            extra = (fmap.values - seedvals)[:, idx[:, 0], idx[:, 1]].T
            xn, k = _optimize(domain, space, extra, x, cfg)
            nit += k
            # damp the step when the frozen correction was too far off
            for _ in range(12):
                fn = _try(solve, xn)
                if fn is not None:
                    break
                xn = 0.5 * (x + xn)
            x, fmap = (xn, fn) if fn is not None else (x, None)

        def admissible(s):
            try:
                fm = solve(s * x)
            except AcxError:
                return False
            return _contained(domain, fm.all_points())

        s = _shrink(admissible, cfg.backtrack_steps)
        t, c = space.unpack(s * x)
        diag.update(iterations=nit, pilot=t0, shrink=s, outer=cfg.outer_iter)
    if not t > 0:
        return _failed(nv, diag)
    upper = nv / t
    lower = 0.0
    if barrier is not None:
        lb = float(barrier(p, v))
        diag["barrier_raw"] = lb
        lower = min(max(lb, 0.0), upper)
    return MetricEstimate(upper=upper, lower=lower, t=float(t),
                          coefficients=np.vstack([t * u[None], c]), diagnostics=diag)


def _try(solve, x):
    try:
        return solve(x)
    except AcxError:
        return None


def _shrink(ok, steps):
    """Largest ``s`` in ``[0, 1]`` with ``ok(s)``.

    A descending ladder brackets the answer, then golden-section steps
    tighten the bracket (``steps`` bounds the total number of probes).
    """
    hi = 1.0
    for s in (1.0, 0.999, 0.995, 0.98, 0.95, 0.9, 0.8, 0.6, 0.4, 0.2, 0.1, 0.03, 0.01):
        steps -= 1
        if ok(s):
            lo = s
            break
        hi = s
    else:
        return 0.0
    if lo == 1.0:
        return 1.0
    for _ in range(max(steps, 0)):
        mid = lo + GOLDEN * (hi - lo)
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return lo


def _failed(nv, diag):
    diag["status"] = "failed"
    return MetricEstimate(upper=np.inf, lower=0.0, t=0.0, coefficients=np.zeros((0, 2)),
                          diagnostics=diag)
