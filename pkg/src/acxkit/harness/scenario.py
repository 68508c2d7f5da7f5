"""Scenario definitions: closed-form orbit families on the unit ball or bidisc.

A scenario bundles the source domain ``D``, the orbit maps ``f^nu``, the
target defining functions ``r_nu`` and structures ``J_nu``, the base point
``x0`` and the list of indices ``nu`` to run.
"""
import hashlib
import json
from dataclasses import dataclass, field, replace

import numpy as np

from .._validation import as_point, as_points, check_int, to_complex, to_real
from ..core.defining import CallableDefiningFunction, unit_sphere_function
from ..core.regions import Ball, Polydisc
from ..core.structures import PushforwardStructure
from ..errors import ScenarioError

KINDS = ("mobius", "perturbed", "rotation", "mixed", "bidisc", "identity")


def mobius(s):
    """Automorphism of the unit ball sending 0 to ``(0, s)``, ``0 <= s < 1``."""
    c = np.sqrt(1 - s * s)

    def f(z):
        z = as_points(z)
        d = 1 - s * z[..., 1]
        return np.stack([-c * z[..., 0] / d, (s - z[..., 1]) / d], axis=-1)
    return f


def rotation(theta):
    """``(z1, z2) -> (e^{i theta} z1, z2)``."""
    u = np.exp(1j * theta)

    def f(z):
        z = as_points(z)
        return np.stack([u * z[..., 0], z[..., 1]], axis=-1)
    return f


def identity_map(z):
    return as_points(z).copy()


class NearIdentity:
    """``psi(z) = (z1 + eps |z1|^2, z2)`` and its inverse by fixed-point iteration.

    Pushing ``J_st`` forward by ``psi`` gives the structure whose first
    deformation coefficient is ``eps z1`` to first order.
    """

    def __init__(self, eps):
        if not abs(eps) < 0.25:
            raise ScenarioError(f"near-identity parameter must satisfy |eps| < 0.25, got {eps}")
        self.eps = float(eps)

    def __call__(self, z):
        z = as_points(z)
        return np.stack([z[..., 0] + self.eps * np.abs(z[..., 0]) ** 2, z[..., 1]], axis=-1)

    def inverse(self, w, iters=200):
        w = as_points(w)
        z1 = w[..., 0].copy()
        for _ in range(iters):
            z1n = w[..., 0] - self.eps * np.abs(z1) ** 2
            done = np.max(np.abs(z1n - z1), initial=0.0) < 1e-16
            z1 = z1n
            if done:
                break
        return np.stack([z1, w[..., 1]], axis=-1)

    def jacobian(self, z):
        """Real 4x4 Jacobian at ``z``."""
        z = as_points(z)
        x, y = z[..., 0].real, z[..., 0].imag
        D = np.broadcast_to(np.eye(4), z.shape[:-1] + (4, 4)).copy()
        D[..., 0, 0] += 2 * self.eps * x
        D[..., 0, 1] += 2 * self.eps * y
        return D


def _pushed_ball_function(psi):
    """``r(w) = |psi^-1(w)|^2 - 1`` with analytic gradient."""
    def value(w):
        return np.sum(np.abs(psi.inverse(w)) ** 2, axis=-1) - 1.0

    def gradient(w):
        z = psi.inverse(w)
        D = psi.jacobian(z)
        return 2 * np.einsum("...i,...ij->...j", to_real(z), np.linalg.inv(D))
    return CallableDefiningFunction(value, gradient, name=f"pushed_ball(eps={psi.eps})")


@dataclass
class Scenario:
    """One end-to-end experiment.

    ``orbit``, ``r_family`` and ``J_family`` are callables of ``nu``;
    ``J_family(nu) = None`` stands for ``J_st``. ``p`` is the expected
    accumulation point, when known.
    """

    name: str
    kind: str
    orbit: object
    r_family: object
    J_family: object
    nus: list
    source: object = field(default_factory=lambda: Ball((0, 0), 1.0))
    x0: np.ndarray = field(default_factory=lambda: np.zeros(2, dtype=complex))
    p: object = None
    cr_tol: float = 1e-3
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        self.x0 = as_point(self.x0)
        self.nus = [int(n) for n in self.nus]
        if any(b <= a for a, b in zip(self.nus, self.nus[1:])):
            raise ScenarioError("scenario indices must increase strictly")
        if not np.all(self.source.contains(self.x0, tol=-1e-15)):
            raise ScenarioError("base point must lie in the source domain")

    def subsequence(self, nus):
        keep = [n for n in nus if n in self.nus]
        return replace(self, nus=keep, name=f"{self.name}[{','.join(map(str, keep))}]")

    def snapshot(self):
        """JSON-ready description (used for hashing)."""
        return {"name": self.name, "kind": self.kind, "nus": self.nus,
                "source": self.source.to_dict(), "x0": [[c.real, c.imag] for c in self.x0],
                "cr_tol": self.cr_tol, "params": self.params}

    def digest(self):
        text = json.dumps(self.snapshot(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()


def _range(nu_max, nu_start=1):
    check_int("nu_max", nu_max, 0)
    return list(range(nu_start, nu_max + 1))


def mobius_scenario(nu_max=8, rate=4.0):
    """Ball automorphisms ``phi_{s_nu}`` with ``s_nu = 1 - rate^-nu``, accumulating at ``(0, 1)``."""
    if not rate > 1:
        raise ScenarioError(f"rate must exceed 1, got {rate}")
    r = unit_sphere_function()
    return Scenario(name="mobius", kind="mobius", orbit=lambda nu: mobius(1 - rate ** -nu),
                    r_family=lambda nu: r, J_family=lambda nu: None, nus=_range(nu_max),
                    p=np.array([0, 1], dtype=complex), params={"rate": rate})


def perturbed_scenario(nu_max=8, rate=4.0, eps=0.1):
    """``f^nu = psi_nu o phi_{s_nu}`` with ``psi_nu`` near-identity of size ``eps / nu``.

    Targets are ``psi_nu(B2)`` with the pushed-forward structures.
    """
    base = mobius_scenario(nu_max, rate)
    cache = {}

    def psi(nu):
        if nu not in cache:
            cache[nu] = NearIdentity(eps / nu)
        return cache[nu]

    def orbit(nu):
        phi, ps = base.orbit(nu), psi(nu)
        return lambda z: ps(phi(z))

    def J(nu):
        ps = psi(nu)
        return PushforwardStructure(ps, ps.inverse, ps.jacobian, name=f"psi_{nu}*J_st")

    return Scenario(name="perturbed", kind="perturbed", orbit=orbit,
                    r_family=lambda nu: _pushed_ball_function(psi(nu)), J_family=J,
                    nus=base.nus, p=base.p, cr_tol=1e-2, params={"rate": rate, "eps": eps})


def rotation_scenario(nu_max=8, theta=1.0):
    """Rotations ``diag(e^{i nu theta}, 1)``: isometries, no boundary accumulation."""
    r = unit_sphere_function()
    return Scenario(name="rotation", kind="rotation", orbit=lambda nu: rotation(nu * theta),
                    r_family=lambda nu: r, J_family=lambda nu: None, nus=_range(nu_max),
                    params={"theta": theta})


def mixed_scenario(nu_max=9, rate=4.0, theta=1.0):
    """Rotations at even ``nu`` and Mobius maps at odd ``nu``."""
    r = unit_sphere_function()

    def orbit(nu):
        return mobius(1 - rate ** -nu) if nu % 2 else rotation(nu * theta)
    return Scenario(name="mixed", kind="mixed", orbit=orbit, r_family=lambda nu: r,
                    J_family=lambda nu: None, nus=_range(nu_max),
                    params={"rate": rate, "theta": theta})


def identity_scenario(nu_max=8):
    r = unit_sphere_function()
    return Scenario(name="identity", kind="identity", orbit=lambda nu: identity_map,
                    r_family=lambda nu: r, J_family=lambda nu: None, nus=_range(nu_max))


def bidisc_scenario(nu_max=8):
    """Source the bidisc; the constant identity family (no boundary-accumulating orbit)."""
    D = Polydisc((0, 0), (1.0, 1.0))
    return Scenario(name="bidisc", kind="bidisc", orbit=lambda nu: identity_map,
                    r_family=lambda nu: None, J_family=lambda nu: None, nus=_range(nu_max),
                    source=D)


def make_scenario(kind, nu_max=None, **params):
    """Build a shipped scenario by name; unknown names raise ``ScenarioError``."""
    makers = {"mobius": mobius_scenario, "perturbed": perturbed_scenario,
              "rotation": rotation_scenario, "mixed": mixed_scenario,
              "bidisc": bidisc_scenario, "identity": identity_scenario}
    if kind not in makers:
        raise ScenarioError(f"unknown scenario kind {kind!r}; expected one of {', '.join(KINDS)}")
    if nu_max is not None:
        params["nu_max"] = nu_max
    try:
        return makers[kind](**params)
    except TypeError as exc:
        raise ScenarioError(f"bad parameters for scenario {kind!r}: {exc}") from None


def push_to_boundary(source, dirs):
    """Boundary points ``center + t d`` of ``source`` along the unit directions ``d``."""
    z = as_points(dirs)
    z = z / np.linalg.norm(z, axis=-1, keepdims=True)
    if isinstance(source, Ball):
        return source.center + source.radius * z
    # largest t with center + t d in the closed region, by bisection
    lo, hi = np.zeros(len(z)), np.full(len(z), 2 * source.bounding_radius)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        inside = source.contains(source.center + mid[:, None] * z)
        lo = np.where(inside, mid, lo)
        hi = np.where(inside, hi, mid)
    return source.center + lo[:, None] * z


def boundary_candidates(source):
    """26 boundary points: directions of ``{-1, 0, 1}^3`` in ``(x1, y1, x2)``, pushed to ``dD``."""
    g = np.array([(a, b, c, 0) for a in (-1, 0, 1) for b in (-1, 0, 1) for c in (-1, 0, 1)
                  if (a, b, c) != (0, 0, 0)], dtype=float)
    return push_to_boundary(source, to_complex(g))


def boundary_samples(source, n, seed=0):
    """``n`` boundary points along Gaussian-random directions (deterministic in ``seed``)."""
    d = np.random.default_rng(seed).normal(size=(n, 4))
    return push_to_boundary(source, to_complex(d))
