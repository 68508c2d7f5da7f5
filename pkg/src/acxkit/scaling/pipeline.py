"""The scaling pipeline at a strictly pseudoconvex boundary point.

For each orbit point ``p_nu`` the pipeline finds the closest boundary point
``q_nu``, an affine chart ``A_nu`` centered at ``q_nu`` that is complex-linear
for ``J(q_nu)`` and sends the complex tangent to ``{z2 = 0}``, and the
anisotropic dilation ``Lambda_nu(z) = (z1 / sqrt(tau), z2 / tau)`` with
``tau = |q_nu - p_nu|``. The structure and the defining function are then
transported to the dilated coordinates.
"""
import csv
from dataclasses import dataclass

import numpy as np

from .._validation import as_point, check_positive, to_complex, to_real
from ..core.affine import AffineMap
from ..core.defining import ComposedDefiningFunction
from ..core.expansion import quadratic_expansion
from ..core.regions import Polydisc
from ..core.structures import STANDARD, TransportedStructure, c1_deviation
from ..errors import DegenerateBoundaryError, GeometryError, RegionError, ScenarioError
from .siegel import ModelDomain

_EYE4 = np.eye(4)


def closest_boundary_point(r, p, max_iter=200, tol=1e-12):
    """Nearest point ``q`` of ``{r = 0}`` to the interior point ``p`` and ``tau = |q - p|``.

    A few projected-gradient steps land on the boundary near the foot point;
    Newton's method on the Lagrange system
    ``[[I + mu H, grad r], [grad r^T, 0]]`` then polishes the optimality
    conditions.

    Raises
    ------
    RegionError
        ``r(p) >= 0``.
    GeometryError
        no convergence within ``max_iter`` iterations.
    """
    p = as_point(p)
    if not float(r(p)) < 0:
        raise RegionError(f"closest boundary point needs r(p) < 0, got {float(r(p)):.3e}")
    x0 = to_real(p)
    x = x0.copy()
    # phase 1: alternate projection onto {r = 0} and pull toward p along the tangent
    for _ in range(20):
        for _ in range(50):
            val, g = float(r(to_complex(x))), r.gradient(to_complex(x))
            if not g @ g > 1e-28:
                # critical point of r (e.g. the center of a ball): every direction ties,
                # so leave it along a fixed one
                x = x + 1e-6 * (1 + np.linalg.norm(x)) * _EYE4[0]
                continue
            x = x - val * g / (g @ g)
            if abs(val) < 1e-14:
                break
        g = r.gradient(to_complex(x))
        d = x - x0
        tang = d - (d @ g) / (g @ g) * g
        if np.linalg.norm(tang) < 1e-8 * (1 + np.linalg.norm(d)):
            break
        x = x - 0.5 * tang
    g = r.gradient(to_complex(x))
    mu = -((x - x0) @ g) / (g @ g)
    it = 0
    for it in range(1, max_iter + 1):
        z = to_complex(x)
        g, H, val = r.gradient(z), r.hessian(z), float(r(z))
        F = np.concatenate([x - x0 + mu * g, [val]])
        K = np.zeros((5, 5))
        K[:4, :4] = _EYE4 + mu * H
        K[:4, 4] = g
        K[4, :4] = g
        try:
            step = np.linalg.solve(K, -F)
        except np.linalg.LinAlgError:
            # p is a focal point (e.g. a sphere's center); the foot point is not isolated
            step = np.linalg.lstsq(K, -F, rcond=None)[0]
        x, mu = x + step[:4], mu + step[4]
        if np.linalg.norm(step) < tol * (1 + np.linalg.norm(x)):
            break
    else:
        raise GeometryError(f"boundary projection did not converge in {max_iter} iterations")
    q = to_complex(x)
    if abs(float(r(q))) > 1e-10:
        raise GeometryError(f"boundary projection residual r(q) = {float(r(q)):.3e}")
    tau = float(np.linalg.norm(x - x0))
    return q, tau


def optimality_angle(r, p, q):
    """Angle between ``q - p`` and ``grad r(q)`` (zero at a foot point)."""
    d = to_real(as_point(q) - as_point(p))
    g = r.gradient(as_point(q))
    g = g / np.linalg.norm(g)
    along = d @ g
    # arctan2 keeps full precision near zero, where arccos of the cosine does not
    return float(np.arctan2(np.linalg.norm(d - along * g), abs(along)))


def normalizing_map(r, q, J=None):
    """Affine chart ``A(z) = B^-1 (z - q)`` adapted to ``r`` and ``J`` at ``q``.

    With ``n = grad r(q)`` and ``w = J(q)^T n`` the complex tangent is the
    orthogonal complement of ``span{n, w}``; ``e1`` is taken in it and
    ``e2 = n - (n.w / |w|^2) w``. The frame ``B = [e1, J e1, e2, J e2]``
    conjugates ``J(q)`` to ``J_st``, the complex tangent goes to ``{z2 = 0}``
    and ``r o A^-1`` has positive coefficient on ``Re z2``.

    Raises
    ------
    DegenerateBoundaryError
        ``dr(q) = 0``.
    """
    q = as_point(q)
    J = J or STANDARD
    M = J(q)
    n = r.gradient(q)
    nn = float(np.linalg.norm(n))
    if nn == 0 or not np.isfinite(nn):
        raise DegenerateBoundaryError(f"dr vanishes at {q.tolist()}")
    n = n / nn
    w = M.T @ n
    e2 = n - (n @ w) / (w @ w) * w
    e2 /= np.linalg.norm(e2)
    Qb, _ = np.linalg.qr(np.column_stack([n, w]))
    P = _EYE4 - Qb @ Qb.T
    proj = P @ _EYE4
    k = int(np.argmax(np.linalg.norm(proj, axis=0) - 1e-12 * np.arange(4)))
    e1 = proj[:, k] / np.linalg.norm(proj[:, k])
    B = np.column_stack([e1, M @ e1, e2, M @ e2])
    return AffineMap.centered(np.linalg.inv(B), q)


def transport_structure(J, A, L):
    """Direct image of ``J`` under ``L o A``."""
    return TransportedStructure(J or STANDARD, L.compose(A))


def scaled_defining_function(r, A, L, tau):
    """``w -> r((L o A)^-1 w) / tau``."""
    tau = check_positive("tau", tau)
    return ComposedDefiningFunction(r, L.compose(A).inverse(), tau)


@dataclass
class ScalingStep:
    nu: int
    p: np.ndarray
    q: np.ndarray
    tau: float
    A_map: AffineMap
    L_map: AffineMap
    Jt: TransportedStructure
    rho_t: ComposedDefiningFunction
    r: object
    J: object
    expansion: object

    @property
    def chart(self):
        """``Lambda o A``."""
        return self.L_map.compose(self.A_map)

    def to_json(self):
        return {"nu": self.nu, "p": [[c.real, c.imag] for c in self.p],
                "q": [[c.real, c.imag] for c in self.q], "tau": self.tau,
                "A": self.A_map.to_dict(), "lam2": self.expansion.lam2}


def scaling_step(nu, r, p, J=None):
    q, tau = closest_boundary_point(r, p)
    if not tau > 0:
        raise ScenarioError("tau = 0: the orbit point sits on the boundary")
    A = normalizing_map(r, q, J)
    L = AffineMap.dilation(tau)
    exp = quadratic_expansion(r, q, A)
    return ScalingStep(nu=nu, p=as_point(p), q=q, tau=tau, A_map=A, L_map=L,
                       Jt=transport_structure(J, A, L), rho_t=scaled_defining_function(r, A, L, tau),
                       r=r, J=J, expansion=exp)


def _family(obj):
    if callable(obj) and not hasattr(obj, "gradient") and not hasattr(obj, "exact_jacobian"):
        return obj
    if isinstance(obj, (list, tuple)):
        return lambda nu: obj[nu - 1]
    return lambda nu: obj


def scaling_sequence(r_family, p_orbit, J_family=None, nu_max=8, nu_start=1):
    """Scaling steps for ``nu = nu_start .. nu_max``.

    ``r_family``, ``p_orbit`` and ``J_family`` may be fixed objects, lists
    indexed from ``nu = 1``, or callables of ``nu``.

    Raises
    ------
    ScenarioError
        when ``tau`` fails to decrease strictly along the sequence.
    """
    rf, pf, jf = _family(r_family), _family(p_orbit), _family(J_family)
    steps = []
    for nu in range(nu_start, nu_max + 1):
        st = scaling_step(nu, rf(nu), pf(nu), jf(nu))
        if steps and not st.tau < steps[-1].tau:
            raise ScenarioError(f"tau does not shrink at nu={nu}: {st.tau:.3e} >= {steps[-1].tau:.3e}")
        steps.append(st)
    return steps


@dataclass
class ConvergenceReport:
    rows: list
    passed: bool
    model: ModelDomain
    domain_ok: bool
    structure_ok: bool

    def column(self, name, K_id=0):
        return np.array([row[name] for row in self.rows if row["K_id"] == K_id])

    def to_csv(self, path):
        cols = ["nu", "tau", "K_id", "domain_dev", "structure_dev", "structure_dev_d1"]
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(cols)
            for row in self.rows:
                w.writerow([row[c] if c in ("nu", "K_id") else "%.17g" % row[c] for c in cols])


def _non_increasing(x, rtol=1e-9):
    x = np.asarray(x)
    return bool(np.all(x[1:] <= x[:-1] * (1 + rtol) + 1e-300))


def convergence_report(steps, K_list=None, model=None, grid_n=9, structure_grid_n=5,
                       final_cap=1e-2):
    """Deviation of scaled domains and structures from the model, per ``(nu, K)``.

    ``domain_dev`` is ``sup_K |rho_t - rho_G|``; ``structure_dev`` and
    ``structure_dev_d1`` are the sup of ``|Jt - J_st|`` and of its first
    differences. The report passes when every column is non-increasing in
    ``nu`` and the final values are at most ``final_cap``.
    """
    if len(steps) < 2:
        raise ValueError("convergence report needs at least two steps")
    K_list = K_list or [Polydisc((0, 0), (1.0, 1.0))]
    model = model or ModelDomain.from_expansion(steps[-1].expansion)
    rows = []
    for st in steps:
        for k, K in enumerate(K_list):
            z = K.grid(grid_n)
            dom = float(np.max(np.abs(st.rho_t(z) - model.rho(z))))
            if st.J is None or st.J is STANDARD:
                s0 = s1 = 0.0
            else:
                s0, s1 = c1_deviation(st.Jt, K, structure_grid_n)
            rows.append({"nu": st.nu, "tau": st.tau, "K_id": k, "domain_dev": dom,
                         "structure_dev": s0, "structure_dev_d1": s1})
    dom_ok = st_ok = True
    for k in range(len(K_list)):
        sel = [row for row in rows if row["K_id"] == k]
        d = [row["domain_dev"] for row in sel]
        s = [row["structure_dev"] for row in sel]
        s1 = [row["structure_dev_d1"] for row in sel]
        dom_ok &= _non_increasing(d) and d[-1] <= final_cap
        st_ok &= _non_increasing(s) and _non_increasing(s1) and s[-1] <= final_cap and s1[-1] <= final_cap
    return ConvergenceReport(rows=rows, passed=bool(dom_ok and st_ok), model=model,
                             domain_ok=bool(dom_ok), structure_ok=bool(st_ok))
