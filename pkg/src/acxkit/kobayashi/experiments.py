"""Empirical experiments: boundary blow-up of the distance and disc localization."""
from dataclasses import dataclass, field

import numpy as np

from .._validation import as_point, check_int, check_positive
from ..core.defining import PolynomialDefiningFunction
from ..core.regions import Ball, Sublevel
from ..disc.solver import DiscMap, SolverConfig, solve_disc
from ..errors import AcxError, RegionError
from .distance import kr_distance
from .metric import SearchConfig


@dataclass
class BlowupTable:
    ks: list
    points: list
    distances: list
    increments: list
    verdict: object          # True / False, or None when there is nothing to compare
    min_increment: float = float("nan")

    def rows(self):
        out = []
        for i, k in enumerate(self.ks):
            inc = self.increments[i - 1] if i else float("nan")
            out.append({"k": k, "distance": self.distances[i], "increment": inc})
        return out


def inward_normal(domain, p_boundary, r=None):
    """Unit inward normal at a boundary point, from ``r`` or from a ball's center."""
    p = as_point(p_boundary)
    if r is not None:
        g = r.gradient(p)
        n = -(g[0::2] + 1j * g[1::2])
    elif isinstance(domain, Ball):
        n = domain.center - p
    elif isinstance(domain, Sublevel):
        g = domain.r.gradient(p)
        n = -(g[0::2] + 1j * g[1::2])
    else:
        raise ValueError("supply a defining function to fix the normal direction")
    return n / np.linalg.norm(n)


def boundary_blowup_experiment(domain, structure, p_boundary, q_interior, approach, lattice_n=16,
                               r=None, scale=1.0, cfg=None, increment_floor=0.05):
    """Distances ``d(x_k, q)`` along the dyadic inward approach ``x_k = p + scale 2^-k n``.

    The distances are accumulated along the chain ``q -> x_k0 -> x_k0+1 -> ...``
    with a separate lattice for each link, so each link is resolved at its own
    length scale. The run passes when the distances increase strictly and every
    increment stays above ``increment_floor``.
    """
    ks = sorted(int(k) for k in approach)
    if not ks:
        raise ValueError("approach list is empty")
    p = as_point(p_boundary)
    q = as_point(q_interior)
    n = inward_normal(domain, p, r)
    pts = [p + scale * 2.0 ** (-k) * n for k in ks]
    for k, x in zip(ks, pts):
        if not np.all(domain.contains(x, tol=-1e-15)):
            raise RegionError(f"approach point k={k} lies outside the domain")
    cfg = cfg or SearchConfig()
    dist = [kr_distance(domain, structure, q, pts[0], lattice_n, cfg=cfg)]
    for a, b in zip(pts, pts[1:]):
        dist.append(dist[-1] + kr_distance(domain, structure, a, b, lattice_n, cfg=cfg))
    inc = list(np.diff(dist))
    verdict = None
    mi = float("nan")
    if inc:
        mi = float(min(inc))
        verdict = bool(mi > 0 and mi >= increment_floor)
    return BlowupTable(ks=ks, points=pts, distances=[float(x) for x in dist],
                       increments=[float(x) for x in inc], verdict=verdict, min_increment=mi)


def model_defining_function():
    """``2 Re z2 + |z|^2``, the ball of radius 1 around ``(0, -1)``."""
    return PolynomialDefiningFunction.from_table({"z2": 2.0, "z1*z1b": 1.0, "z2*z2b": 1.0})


def sample_box(rng, delta, r, n, max_tries=200):
    """Points of ``Q(0, delta) = {|z1| < sqrt(delta), |z2| < delta}`` with ``r < 0``."""
    out = []
    for _ in range(max_tries):
        m = 4 * n
        a = np.sqrt(delta * rng.uniform(size=m)) * np.exp(2j * np.pi * rng.uniform(size=m))
        b = delta * np.sqrt(rng.uniform(size=m)) * np.exp(2j * np.pi * rng.uniform(size=m))
        z = np.stack([a, b], axis=-1)
        out.extend(z[r(z) < 0])
        if len(out) >= n:
            break
    return np.array(out[:n])


def maximal_linear_disc(d, domain, p, u, N=16, steps=20, safety=0.98):
    """Largest ``t`` (by bisection) for which the disc with ``f'(0) = t u`` stays in ``domain``."""
    cfg = SolverConfig(N=N, tol=1e-11)

    def disc(t):
        try:
            f = solve_disc(d, p, t * u, cfg)
        except AcxError:
            return None
        return f if np.all(domain.contains(f.all_points())) else None

    hi = 2.0 * domain.bounding_radius
    lo = 0.0
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        if disc(mid) is not None:
            lo = mid
        else:
            hi = mid
    if lo == 0:
        return None
    return disc(safety * lo)


@dataclass
class LocalizationResult:
    table: list
    C0_hat: float
    r0_hat: float
    passed: dict
    ratios: dict
    skipped: int
    used: int
    notes: dict = field(default_factory=dict)

    def verdict(self, r0=0.2):
        return self.passed[r0]


def containment_constant(fmap, delta, r0, n_r=5, n_theta=32):
    """Smallest ``C`` with ``g(r0 Delta)`` inside ``Q(0, C delta)``."""
    rad = np.linspace(0.0, r0, n_r)
    th = 2 * np.pi * np.arange(n_theta) / n_theta
    z = (rad[:, None] * np.exp(1j * th[None])).ravel()
    g = fmap.evaluate(z)
    return float(np.max(np.maximum(np.abs(g[:, 0]) ** 2 / delta, np.abs(g[:, 1]) / delta)))


def localization_experiment(d, r=None, deltas=(1e-1, 1e-2, 1e-3), ensemble_size=20,
                            r0_list=(0.1, 0.2, 0.3), seed=0, family=None, N=16,
                            ball_radius=1.0, ratio_cap=3.0):
    """Measure the containment constant of discs centered in ``Q(0, delta)``.

    Parameters
    ----------
    d : DeformationData or None
    r : DefiningFunction, optional
        Domain ``{r < 0}`` intersected with a ball (default ``2 Re z2 + |z|^2``).
    family : callable ``delta -> list of DiscMap``, optional
        Replaces the default random ensemble of maximal linear-seed discs.

    Returns
    -------
    LocalizationResult
        One table row per ``(delta, r0)`` with the max ``C``; the run passes at
        ``r0`` when max over deltas / min over deltas is at most ``ratio_cap``.

    Raises
    ------
    ValueError
        when no disc qualifies (a vacuous pass is not allowed).
    """
    r = r or model_defining_function()
    check_int("ensemble_size", ensemble_size, 1)
    domain = Sublevel(r, Ball((0, 0), ball_radius))
    rng = np.random.default_rng(seed)
    table, skipped, used = [], 0, 0
    per = {r0: [] for r0 in r0_list}
    for delta in deltas:
        check_positive("delta", delta)
        if family is not None:
            discs = list(family(delta))
        else:
            centers = sample_box(rng, delta, r, ensemble_size)
            discs = []
            for c in centers:
                u = rng.normal(size=4)
                u = (u[0::2] + 1j * u[1::2]) / np.linalg.norm(u)
                f = maximal_linear_disc(d, domain, c, u, N=N)
                if f is None:
                    skipped += 1
                else:
                    discs.append(f)
        good = []
        for f in discs:
            c = f.center
            if abs(c[0]) ** 2 < delta and abs(c[1]) < delta and np.all(domain.contains(f.all_points())):
                good.append(f)
            else:
                skipped += 1
        if not good:
            raise ValueError(f"no admissible disc for delta={delta}: empty ensemble")
        used += len(good)
        for r0 in r0_list:
            C = max(containment_constant(f, delta, r0) for f in good)
            per[r0].append(C)
            table.append({"delta": float(delta), "r0": float(r0), "C_max": C, "n": len(good)})
    ratios = {r0: float(max(v) / min(v)) for r0, v in per.items()}
    passed = {r0: bool(ratios[r0] <= ratio_cap) for r0 in r0_list}
    C0 = float(max(row["C_max"] for row in table))
    ok = [r0 for r0 in r0_list if passed[r0]]
    r0_hat = float(max(ok)) if ok else float("nan")
    return LocalizationResult(table=table, C0_hat=C0, r0_hat=r0_hat, passed=passed,
                              ratios=ratios, skipped=skipped, used=used)


def linear_disc_family(scale=0.9):
    """The explicit family ``zeta -> (scale sqrt(delta) zeta, -delta / 2)``."""
    def family(delta):
        return [DiscMap.from_function(lambda z: (scale * np.sqrt(delta) * z, -0.5 * delta + 0 * z), N=16)]
    return family
