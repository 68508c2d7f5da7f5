"""Bounded regions of C^2: balls, polydiscs and sublevel sets cut by a ball.

Every region exposes membership, a deterministic sampling grid, rejection
sampling and a vector of smooth constraint values ``c(z)`` with ``c <= 0``
exactly on the closed region (used by the extremal-disc search).
"""
import numpy as np

from .._validation import as_point, as_points, check_int, check_positive, to_real


def _disc_square(n):
    """n*n points covering the closed unit disc (elliptical square-to-disc map)."""
    t = np.linspace(-1.0, 1.0, n)
    x, y = np.meshgrid(t, t, indexing="ij")
    u = x * np.sqrt(1.0 - 0.5 * y ** 2)
    v = y * np.sqrt(1.0 - 0.5 * x ** 2)
    return (u + 1j * v).ravel()


def _cube_grid(n, center, half):
    t = np.linspace(-half, half, n)
    g = np.stack(np.meshgrid(t, t, t, t, indexing="ij"), axis=-1).reshape(-1, 4)
    return g[:, 0::2] + 1j * g[:, 1::2] + center


class Region:
    kind = "region"

    def contains(self, z, tol=0.0):
        return np.all(self.constraints(z) <= tol, axis=-1)

    def check_contains(self, z, what="point"):
        from ..errors import RegionError
        z = as_points(z)
        if not np.all(self.contains(z, tol=1e-12)):
            raise RegionError(f"{what} lies outside {self!r}")
        return z

    def sample(self, rng, n):
        """Uniform samples of the region by rejection from the bounding box."""
        out = []
        c, R = self.center, self.bounding_radius
        while sum(len(o) for o in out) < n:
            x = rng.uniform(-R, R, size=(4 * n, 4))
            z = x[:, 0::2] + 1j * x[:, 1::2] + c
            out.append(z[self.contains(z)])
        return np.concatenate(out)[:n]


class Ball(Region):
    """Closed Euclidean ball ``|z - center| <= radius``."""

    kind = "ball"

    def __init__(self, center=(0, 0), radius=1.0):
        self.center = as_point(center)
        self.radius = check_positive("radius", radius)

    @property
    def bounding_radius(self):
        return self.radius

    def grid(self, n):
        """Points of an ``n^4`` cube lattice inside the ball (use odd ``n`` to hit the center)."""
        check_int("grid_n", n, 2)
        z = _cube_grid(n, self.center, self.radius)
        return z[np.linalg.norm(z - self.center, axis=-1) <= self.radius * (1 + 1e-12)]

    def constraints(self, z):
        z = as_points(z)
        return (np.sum(np.abs(z - self.center) ** 2, axis=-1) - self.radius ** 2)[..., None]

    def constraint_gradients(self, z):
        z = as_points(z)
        return (2.0 * to_real(z - self.center))[..., None, :]

    def to_dict(self):
        return {"kind": "ball", "center": [[c.real, c.imag] for c in self.center],
                "radius": self.radius}

    def __repr__(self):
        return f"Ball(center={self.center.tolist()}, radius={self.radius})"


class Polydisc(Region):
    """Closed polydisc ``|z_j - c_j| <= radii[j]``."""

    kind = "polydisc"

    def __init__(self, center=(0, 0), radii=(1.0, 1.0)):
        self.center = as_point(center)
        if np.ndim(radii) == 0:
            radii = (radii, radii)
        if len(radii) != 2:
            raise ValueError("polydisc needs two radii")
        self.radii = np.array([check_positive("radius", float(r)) for r in radii])

    @property
    def bounding_radius(self):
        return float(np.max(self.radii))

    def grid(self, n):
        """Tensor product of two ``n*n`` disc samplings: exactly ``n^4`` points."""
        check_int("grid_n", n, 2)
        d = _disc_square(n)
        a, b = np.meshgrid(d * self.radii[0], d * self.radii[1], indexing="ij")
        return np.stack([a.ravel(), b.ravel()], axis=-1) + self.center

    def constraints(self, z):
        z = as_points(z)
        return np.abs(z - self.center) ** 2 - self.radii ** 2

    def constraint_gradients(self, z):
        z = as_points(z)
        w = to_real(z - self.center)
        g = np.zeros(z.shape[:-1] + (2, 4))
        g[..., 0, 0:2] = 2.0 * w[..., 0:2]
        g[..., 1, 2:4] = 2.0 * w[..., 2:4]
        return g

    def to_dict(self):
        return {"kind": "polydisc", "center": [[c.real, c.imag] for c in self.center],
                "radii": self.radii.tolist()}

    def __repr__(self):
        return f"Polydisc(center={self.center.tolist()}, radii={self.radii.tolist()})"


class Sublevel(Region):
    """``{r < 0}`` intersected with a ball."""

    kind = "sublevel"

    def __init__(self, r, ball):
        self.r = r
        self.ball = ball
        self.center = ball.center

    @property
    def bounding_radius(self):
        return self.ball.radius

    def grid(self, n):
        z = self.ball.grid(n)
        return z[self.r(z) <= 0]

    def constraints(self, z):
        z = as_points(z)
        return np.concatenate([self.r(z)[..., None], self.ball.constraints(z)], axis=-1)

    def constraint_gradients(self, z):
        z = as_points(z)
        return np.concatenate([self.r.gradient(z)[..., None, :],
                               self.ball.constraint_gradients(z)], axis=-2)

    def to_dict(self):
        return {"kind": "sublevel", "function": repr(self.r), "ball": self.ball.to_dict()}

    def __repr__(self):
        return f"Sublevel({self.r!r}, {self.ball!r})"
