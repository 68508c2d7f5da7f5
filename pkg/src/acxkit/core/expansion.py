"""Second-order boundary expansion of a defining function.

In adapted coordinates ``w`` the defining function reads

    r(w) = 2 lam2 Re w2 + 2 Re sum_kl lam_kl w_k w_l + sum_kl lam_kl_bar w_k conj(w_l) + O(|w|^3).

Coefficients are Wirtinger derivatives of the degree-two Taylor polynomial:
``lam2 = r_{w2}``, ``lam_kl = r_{w_k w_l} / 2``, ``lam_kl_bar = r_{w_k wbar_l}``.
"""
from dataclasses import dataclass, field

import numpy as np

from .._validation import as_point, to_complex
from ..errors import DegenerateBoundaryError, RegionError
from .affine import AffineMap

RADII = (1e-1, 1e-2, 1e-3)


@dataclass
class QuadraticExpansion:
    lam2: float
    lam: np.ndarray          # symmetric 2x2 complex, holomorphic quadratic part K
    lam_bar: np.ndarray      # Hermitian 2x2 complex, H
    residuals: dict = field(default_factory=dict)
    cubic_decay: bool = True

    def K(self, w):
        w = np.asarray(w, dtype=complex)
        return np.einsum("...k,kl,...l->...", w, self.lam, w)

    def H(self, w):
        w = np.asarray(w, dtype=complex)
        return np.einsum("...k,kl,...l->...", w, self.lam_bar, np.conj(w)).real

    def __call__(self, w):
        w = np.asarray(w, dtype=complex)
        return 2 * self.lam2 * w[..., 1].real + 2 * self.K(w).real + self.H(w)

    @property
    def alpha(self):
        """Hermitian coefficient on the complex tangent ``{w2 = 0}``."""
        return float(self.lam_bar[0, 0].real)

    def to_json(self):
        c = lambda a: [[[x.real, x.imag] for x in row] for row in a]  # noqa: E731
        return {"lam2": self.lam2, "lam": c(self.lam), "lam_bar": c(self.lam_bar),
                "residuals": {str(k): v for k, v in self.residuals.items()},
                "cubic_decay": self.cubic_decay}


def expansion_from_derivatives(g, H):
    """Wirtinger coefficients from a real gradient ``g`` and Hessian ``H`` at the origin."""
    mu = 0.5 * (g[0::2] - 1j * g[1::2])
    lam = np.empty((2, 2), dtype=complex)
    lam_bar = np.empty((2, 2), dtype=complex)
    for k in range(2):
        for l in range(2):
            xx, xy = H[2 * k, 2 * l], H[2 * k, 2 * l + 1]
            yx, yy = H[2 * k + 1, 2 * l], H[2 * k + 1, 2 * l + 1]
            lam[k, l] = 0.125 * (xx - 1j * xy - 1j * yx - yy)
            lam_bar[k, l] = 0.25 * (xx + 1j * xy - 1j * yx + yy)
    return mu, lam, lam_bar


def quadratic_expansion(r, base, frame=None, tol=1e-8, n_dirs=16, seed=0):
    """Read the boundary expansion of ``r`` at ``base`` in the chart ``frame``.

    Parameters
    ----------
    r : DefiningFunction
    base : point of C^2 with ``r(base) = 0``
    frame : AffineMap or 4x4 array, optional
        Chart sending ``base`` to 0 and the complex tangent to ``{w2 = 0}``.
        A bare matrix ``F`` is read as ``w = F (z - base)``. Defaults to the
        translation by ``-base``.

    Raises
    ------
    DegenerateBoundaryError
        ``dr(base) = 0``.
    RegionError
        ``r(base) != 0``.
    ValueError
        the chart does not send the complex tangent to ``{w2 = 0}``.
    """
    base = as_point(base)
    if frame is None:
        frame = AffineMap.translation(-base)
    elif not isinstance(frame, AffineMap):
        frame = AffineMap.centered(frame, base)
    g0 = r.gradient(base)
    gn = float(np.linalg.norm(g0))
    if gn == 0 or not np.isfinite(gn):
        raise DegenerateBoundaryError(f"dr vanishes at {base.tolist()}")
    if abs(float(r(base))) > tol * max(1.0, gn):
        raise RegionError(f"base point is not on the boundary: r(base) = {float(r(base)):.3e}")
    if np.max(np.abs(frame(base))) > 1e-10 * (1 + np.max(np.abs(base))):
        raise ValueError("frame must send the base point to the origin")
    inv = frame.inverse()
    T = inv.linear
    g = g0 @ T
    H = T.T @ r.hessian(base) @ T
    mu, lam, lam_bar = expansion_from_derivatives(g, H)
    if abs(mu[0]) > tol * gn * np.linalg.norm(T) or abs(mu[1].imag) > tol * gn * np.linalg.norm(T):
        raise ValueError("frame does not send the complex tangent to {w2 = 0}: "
                         f"linear coefficients {mu.tolist()}")
    exp = QuadraticExpansion(lam2=float(mu[1].real), lam=0.5 * (lam + lam.T),
                             lam_bar=0.5 * (lam_bar + lam_bar.conj().T))
    # residual decay along a fixed set of directions
    rng = np.random.default_rng(seed)
    d = rng.normal(size=(n_dirs, 4))
    d = to_complex(d / np.linalg.norm(d, axis=1, keepdims=True))
    res = {}
    for rho in RADII:
        w = rho * d
        res[rho] = float(np.max(np.abs(r(inv(w)) - exp(w))))
    floor = 1e-12 * max(1.0, gn)
    decay = all(res[b] <= 4.0 * (b / a) ** 3 * res[a] + floor for a, b in zip(RADII, RADII[1:]))
    exp.residuals = res
    exp.cubic_decay = bool(decay)
    return exp

