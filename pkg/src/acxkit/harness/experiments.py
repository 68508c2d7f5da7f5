"""End-to-end experiments: attraction, rescaled maps and the limit biholomorphism."""
from dataclasses import dataclass, field

import numpy as np

from .._validation import as_points, to_complex, to_real
from ..core.affine import J_ST
from ..core.regions import Ball, Polydisc
from ..errors import ScenarioError
from ..scaling.pipeline import convergence_report, scaling_sequence
from ..scaling.siegel import SiegelMap, cayley, siegel_rho
from .scenario import boundary_candidates, boundary_samples

PASS, FAIL, INCONCLUSIVE, NO_ACCUMULATION = "PASS", "FAIL", "INCONCLUSIVE", "NO_ACCUMULATION"
TARGET = np.array([0, -1], dtype=complex)


def default_compact(s, radius=0.5):
    """``ball(x0, radius)`` for ball sources, the concentric polydisc otherwise."""
    if isinstance(s.source, Ball):
        return Ball(s.x0, radius * s.source.radius)
    return Polydisc(s.x0, radius * s.source.radii)


@dataclass
class AttractionTable:
    p: np.ndarray
    nus: list
    sup_dist: list
    passed: bool
    label: str = "all"

    def rows(self):
        return [{"nu": nu, "sup_dist": d} for nu, d in zip(self.nus, self.sup_dist)]


def _check_target(s, nu, w):
    r = s.r_family(nu)
    if r is None:
        inside = s.source.contains(w, tol=1e-12)
    else:
        inside = r(w) < 1e-12
    if not np.all(inside):
        raise ScenarioError(f"orbit map nu={nu} leaves the target domain")


def _attraction_pass(d, threshold):
    d = np.asarray(d)
    return bool(len(d) >= 2 and np.all(np.diff(d) < 0) and d[-1] <= threshold)


def attraction_check(s, p=None, K=None, grid_n=7, threshold=1e-2, nus=None, label="all"):
    """``sup_K |f^nu(x) - p|`` per ``nu``.

    Passes when the column decreases strictly and ends at or below ``threshold``.

    Raises
    ------
    ScenarioError
        an orbit map sends a sample of ``K`` outside its target domain.
    """
    p = s.p if p is None else np.asarray(p, dtype=complex)
    if p is None:
        raise ScenarioError("attraction check needs a candidate boundary point")
    K = K or default_compact(s)
    x = K.grid(grid_n)
    nus = s.nus if nus is None else nus
    dist = []
    for nu in nus:
        w = s.orbit(nu)(x)
        _check_target(s, nu, w)
        dist.append(float(np.max(np.linalg.norm(w - p, axis=-1))))
    return AttractionTable(p=p, nus=list(nus), sup_dist=dist,
                           passed=_attraction_pass(dist, threshold), label=label)


def disc_ensemble(s, n_discs=20, seed=0, n_r=6, n_theta=24):
    """Random holomorphic discs ``g = x0 + a zeta + b zeta^2`` in a compact of the source.

    ``|a| + |b| <= 0.45`` times the source size. Returns the sample points
    ``g(zeta)`` and the tangents ``dg(zeta)(d/dx) = g'(zeta)``.
    """
    rng = np.random.default_rng(seed)
    size = 0.45 * s.source.bounding_radius
    rad = np.linspace(0, 1, n_r)
    zeta = (rad[:, None] * np.exp(2j * np.pi * np.arange(n_theta) / n_theta)).ravel()
    pts, tans = [], []
    for _ in range(n_discs):
        ab = to_complex(rng.normal(size=(2, 4)))
        w = rng.uniform(0.2, 1.0, size=2)
        ab = ab / np.linalg.norm(ab, axis=-1, keepdims=True) * (size * w / w.sum())[:, None]
        pts.append(s.x0 + zeta[:, None] * ab[0] + zeta[:, None] ** 2 * ab[1])
        tans.append(ab[0] + 2 * zeta[:, None] * ab[1])
    return np.concatenate(pts), np.concatenate(tans)


def disc_attraction(s, p=None, n_discs=20, seed=0, n_r=6, n_theta=24, threshold=1e-2):
    """Attraction of ``f^nu o g`` uniformly over the random discs of :func:`disc_ensemble`."""
    p = s.p if p is None else np.asarray(p, dtype=complex)
    x, _ = disc_ensemble(s, n_discs, seed, n_r, n_theta)
    dist = []
    for nu in s.nus:
        w = s.orbit(nu)(x)
        _check_target(s, nu, w)
        dist.append(float(np.max(np.linalg.norm(w - p, axis=-1))))
    return AttractionTable(p=p, nus=list(s.nus), sup_dist=dist,
                           passed=_attraction_pass(dist, threshold), label="discs")


def derivative_floor(F, x, t, h=1e-6):
    """Empirical ``inf |d(F o g)(zeta)(d/dx)|`` over disc samples ``x = g(zeta)``, ``t = g'(zeta)``.

    This measures the uniform derivative floor of the image discs; no
    certified covering is built.
    """
    d = (F(x + h * t) - F(x - h * t)) / (2 * h)
    return float(np.min(np.linalg.norm(d, axis=-1)))


class RescaledMap:
    """``F^nu = Lambda^nu o A^nu o f^nu``."""

    def __init__(self, step, f):
        self.step = step
        self.nu = step.nu
        self.f = f
        self.chart = step.chart

    def __call__(self, x):
        return self.chart(self.f(as_points(x)))


def rescaled_maps(s):
    """One ``RescaledMap`` per ``nu``, with ``p_nu = f^nu(x0)``.

    Raises
    ------
    ScenarioError
        ``tau`` does not shrink (for instance when the orbit stays inside).
    """
    orbits = {nu: s.orbit(nu) for nu in s.nus}
    steps = scaling_sequence(lambda k: s.r_family(s.nus[k - 1]),
                             lambda k: orbits[s.nus[k - 1]](s.x0),
                             lambda k: s.J_family(s.nus[k - 1]), len(s.nus))
    maps = []
    for st, nu in zip(steps, s.nus):
        st.nu = nu
        maps.append(RescaledMap(st, orbits[nu]))
    return maps


def fd_jacobian(F, x, h=1e-6):
    """Real 4x4 Jacobian of ``F`` at complex points ``x`` by central differences."""
    x = as_points(x)
    cols = []
    for e in np.eye(4):
        d = to_complex(h * e)
        cols.append(to_real(F(x + d) - F(x - d)) / (2 * h))
    return np.stack(cols, axis=-1)


def newton_inverse(F, y, x_init, tol=1e-13, max_iter=60):
    """Damped Newton for ``F(x) = y`` pointwise; returns ``(x, |F(x) - y|)``."""
    y = as_points(y)
    x = np.broadcast_to(as_points(x_init), y.shape).copy()
    res = np.linalg.norm(F(x) - y, axis=-1)
    for _ in range(max_iter):
        act = res > tol * (1 + np.linalg.norm(y, axis=-1))
        if not np.any(act):
            break
        xa, ya, ra = x[act], y[act], res[act]
        D = fd_jacobian(F, xa)
        step = np.linalg.solve(D, -to_real(F(xa) - ya)[..., None])[..., 0]
        t = np.ones(len(xa))
        xn, rn = xa, ra
        for _ in range(20):
            xt = xa + t[:, None] * to_complex(step)
            rt = np.linalg.norm(F(xt) - ya, axis=-1)
            ok = np.isfinite(rt) & (rt < ra)
            xn = np.where(ok[:, None], xt, xn)
            rn = np.where(ok, rt, rn)
            t = np.where(ok, t, 0.5 * t)
            if np.all(ok | (t < 1e-6)):
                break
        if np.all(rn >= ra):
            break
        x[act], res[act] = xn, rn
    return x, res


def continuation_inverse(F, y, x_start, y_start, n_steps=10):
    """Solve ``F(x) = y`` following the segment from ``y_start = F(x_start)``."""
    y = as_points(y)
    x = np.broadcast_to(as_points(x_start), y.shape).copy()
    for t in np.linspace(0, 1, n_steps + 1)[1:]:
        x, res = newton_inverse(F, (1 - t) * as_points(y_start) + t * y, x)
    return x, res


def cr_residual(F, x, h=1e-5):
    """``sup |dF J_st - J_st dF|`` (spectral norm) over the points ``x``."""
    D = fd_jacobian(F, x, h)
    return float(np.max(np.linalg.norm(D @ J_ST - J_ST @ D, ord=2, axis=(-2, -1)), initial=0.0))


@dataclass
class LimitResult:
    verdict: str
    maps: list
    model: object
    diagnostics: dict
    x0: np.ndarray
    per_nu: list = field(default_factory=list)
    report: object = None

    @property
    def F(self):
        return self.maps[-1]

    def Ftilde(self, y):
        """Grid inverse of the limit map: Newton warm-started from the previous ``nu``."""
        prev, last = self.maps[-2], self.maps[-1]
        x1, _ = continuation_inverse(prev, y, self.x0, TARGET)
        x, _ = newton_inverse(last, y, x1)
        return x


def _sup(a):
    return float(np.max(a, initial=0.0))


def limit_biholomorphism(s, maps=None, K=None, grid_n=7, cauchy_tol=1e-3, inverse_tol=1e-4,
                         boundary_tol=1e-3, cr_tol=None, n_boundary=400, image_cap=4.0):
    """Verdict on the limit ``F`` of the rescaled maps.

    PASS requires (a) ``sup_K |F~(F(x)) - x| <= inverse_tol`` and the same for
    ``F o F~`` on a compact of the model, (b) the Siegel image of ``F(K)`` in
    the half-space and bounded boundary images on its boundary within
    ``boundary_tol``, (c) the Cauchy-Riemann residual of ``F`` at most
    ``cr_tol``. A last Cauchy difference above ``cauchy_tol`` gives
    INCONCLUSIVE.
    """
    cr_tol = s.cr_tol if cr_tol is None else cr_tol
    maps = maps if maps is not None else rescaled_maps(s)
    if len(maps) < 2:
        raise ScenarioError("the limit needs at least two rescaled maps")
    K = K or default_compact(s)
    x = K.grid(grid_n)
    per_nu, prev = [], None
    for m in maps:
        val = m(x)
        row = {"nu": m.nu, "tau": m.step.tau,
               "normalization_err": float(np.linalg.norm(m(s.x0) - TARGET)),
               "cauchy_diff": float("nan") if prev is None else _sup(np.linalg.norm(val - prev, axis=-1))}
        per_nu.append(row)
        prev = val
    steps = [m.step for m in maps]
    report = convergence_report(steps)
    model = report.model
    diag = {"cauchy_diff": per_nu[-1]["cauchy_diff"], "normalization_err": per_nu[-1]["normalization_err"],
            "model": model.to_json()}
    res = LimitResult(verdict=INCONCLUSIVE, maps=maps, model=model, diagnostics=diag, x0=s.x0,
                      per_nu=per_nu, report=report)
    if not per_nu[-1]["cauchy_diff"] <= cauchy_tol:
        diag["reason"] = "rescaled maps are not Cauchy on K"
        return res
    F = maps[-1]
    Fx = F(x)
    # (a) inverse consistency on K and on a compact of the model
    xt = res.Ftilde(Fx)
    diag["inverse_err"] = _sup(np.linalg.norm(xt - x, axis=-1))
    phi = SiegelMap(model)
    y = phi.inverse(cayley(Ball((0, 0), 0.5).grid(grid_n)))
    diag["forward_err"] = _sup(np.linalg.norm(F(res.Ftilde(y)) - y, axis=-1))
    # (b) Siegel images: interior samples inside, bounded boundary images on the boundary
    diag["interior_max_rho"] = float(np.max(siegel_rho(phi(Fx))))
    b = boundary_samples(s.source, n_boundary, seed=1)
    wb = phi(F(b))
    keep = np.linalg.norm(wb, axis=-1) <= image_cap
    diag["n_boundary"] = int(keep.sum())
    diag["boundary_max_abs_rho"] = _sup(np.abs(siegel_rho(wb[keep])))
    # (c) holomorphy of the limit
    diag["cr_residual"] = cr_residual(F, x)
    xd, td = disc_ensemble(s)
    diag["derivative_floor"] = derivative_floor(F, xd, td)
    checks = {
        "inverse": diag["inverse_err"] <= inverse_tol and diag["forward_err"] <= inverse_tol,
        "siegel": diag["interior_max_rho"] < 0 and diag["n_boundary"] > 0
        and diag["boundary_max_abs_rho"] <= boundary_tol,
        "cauchy_riemann": diag["cr_residual"] <= cr_tol,
    }
    diag["checks"] = checks
    res.verdict = PASS if all(checks.values()) else FAIL
    return res


@dataclass
class CompactnessReport:
    verdict: str
    message: str
    subsequence: str
    nus: list
    candidate: object
    attraction: list
    equicontinuity: list
    limit: object = None


def equicontinuity_table(s, K=None, deltas=(0.1, 0.05, 0.01), grid_n=5, n_dirs=8, seed=0):
    """Sampled modulus of continuity ``omega_nu(delta)`` of each ``f^nu`` on ``K``."""
    K = K or default_compact(s)
    x = K.grid(grid_n)
    u = to_complex(np.random.default_rng(seed).normal(size=(n_dirs, 4)))
    u /= np.linalg.norm(u, axis=-1, keepdims=True)
    rows = []
    for nu in s.nus:
        f = s.orbit(nu)
        fx = f(x)
        for d in deltas:
            om = max(_sup(np.linalg.norm(f(x + d * v) - fx, axis=-1)) for v in u)
            rows.append({"nu": nu, "delta": float(d), "omega": om})
    return rows


def _point_text(z):
    return "(" + ", ".join(f"{c.real:.6g}{c.imag:+.6g}i" for c in np.round(z, 12) + 0.0) + ")"


def _subsequences(nus):
    out = [("all", list(nus))]
    for j, name in ((1, "odd"), (0, "even")):
        sub = [n for n in nus if n % 2 == j]
        if len(sub) >= 2:
            out.append((name, sub))
    return out


def compactness_verdict(s, K=None, grid_n=7, threshold=1e-2, **limit_kw):
    """Accumulation scan over 26 boundary candidates and the full, odd and even subsequences.

    When some orbit accumulates at a candidate, the limit biholomorphism runs
    on that subsequence; otherwise the equicontinuity table is returned as
    compactness evidence with verdict ``NO_ACCUMULATION``.
    """
    K = K or default_compact(s)
    cands = boundary_candidates(s.source)
    if s.p is not None:
        cands = np.concatenate([s.p[None], cands])
    tables = []
    for label, sub in _subsequences(s.nus):
        for c in cands:
            t = attraction_check(s, c, K, grid_n, threshold, nus=sub, label=label)
            if t.passed:
                ss = s if label == "all" else s.subsequence(sub)
                lim = limit_biholomorphism(ss, K=K, grid_n=grid_n, **limit_kw)
                msg = f"accumulation at {_point_text(c)} along the {label} subsequence"
                return CompactnessReport(verdict=lim.verdict, message=msg, subsequence=label,
                                         nus=sub, candidate=c, attraction=[t], equicontinuity=[],
                                         limit=lim)
            if label == "all":
                tables.append(t)
    eq = equicontinuity_table(s, K)
    return CompactnessReport(verdict=NO_ACCUMULATION, message="no accumulation: compactness evidence",
                             subsequence="none", nus=list(s.nus), candidate=None,
                             attraction=tables, equicontinuity=eq)
