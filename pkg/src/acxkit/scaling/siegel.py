"""Model domains, the holomorphic shear onto the Siegel half-space, and the Cayley map."""
from dataclasses import dataclass

import numpy as np

from .._validation import as_points


@dataclass(frozen=True)
class ModelDomain:
    """``G = {beta Re z2 + 2 Re(lam11 z1^2) + alpha |z1|^2 < 0}``.

    ``alpha > 0`` expresses strict pseudoconvexity on the complex tangent.
    ``beta`` is the coefficient of ``Re z2`` (``2 lam2`` when built from a
    boundary expansion).
    """

    alpha: float = 1.0
    lam11: complex = 0.0
    beta: float = 1.0

    def __post_init__(self):
        if not (np.isfinite(self.alpha) and self.alpha > 0):
            raise ValueError(f"alpha must be > 0 (strictly pseudoconvex model), got {self.alpha}")
        if not (np.isfinite(self.beta) and self.beta > 0):
            raise ValueError(f"beta must be > 0, got {self.beta}")

    @classmethod
    def from_expansion(cls, exp):
        """Restriction of a boundary expansion to the complex tangent ``{z2 = 0}`` directions."""
        return cls(alpha=float(exp.lam_bar[0, 0].real), lam11=complex(exp.lam[0, 0]),
                   beta=2.0 * float(exp.lam2))

    def rho(self, z):
        z = as_points(z)
        z1, z2 = z[..., 0], z[..., 1]
        return self.beta * z2.real + 2 * (self.lam11 * z1 ** 2).real + self.alpha * np.abs(z1) ** 2

    def __call__(self, z):
        return self.rho(z)

    def to_json(self):
        return {"alpha": self.alpha, "lam11": [self.lam11.real, self.lam11.imag], "beta": self.beta}


class SiegelMap:
    """``Phi(z) = (sqrt(alpha) z1, beta z2 + 2 lam11 z1^2)`` from ``G`` onto ``H``.

    The shear uses the holomorphic quadratic part, so that
    ``Re Phi_2 + |Phi_1|^2 = rho_G`` holds identically.
    """

    def __init__(self, model):
        self.model = model
        self.sa = np.sqrt(model.alpha)

    def __call__(self, z):
        z = as_points(z)
        m = self.model
        w1 = self.sa * z[..., 0]
        w2 = m.beta * z[..., 1] + 2 * m.lam11 * z[..., 0] ** 2
        return np.stack([w1, w2], axis=-1)

    def inverse(self, w):
        w = as_points(w)
        m = self.model
        z1 = w[..., 0] / self.sa
        z2 = (w[..., 1] - 2 * m.lam11 * z1 ** 2) / m.beta
        return np.stack([z1, z2], axis=-1)


def siegel_map(model):
    """The map onto the Siegel half-space and its inverse, as a pair of callables."""
    phi = SiegelMap(model)
    return phi, phi.inverse


def siegel_rho(w):
    """``Re w2 + |w1|^2``; negative exactly on the Siegel half-space."""
    w = as_points(w)
    return w[..., 1].real + np.abs(w[..., 0]) ** 2


def cayley(z):
    """Biholomorphism of the unit ball onto the Siegel half-space."""
    z = as_points(z)
    d = 1 - z[..., 1]
    return np.stack([z[..., 0] / d, -(1 + z[..., 1]) / d], axis=-1)


def cayley_inverse(w):
    w = as_points(w)
    d = 1 - w[..., 1]
    return np.stack([2 * w[..., 0] / d, (1 + w[..., 1]) / (w[..., 1] - 1)], axis=-1)
