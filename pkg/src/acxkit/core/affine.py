"""Real affine maps of R^4 acting on points of C^2."""
import numpy as np

from .._validation import as_points, check_matrix, to_complex, to_real

J_ST = np.array([[0.0, -1.0, 0.0, 0.0],
                 [1.0, 0.0, 0.0, 0.0],
                 [0.0, 0.0, 0.0, -1.0],
                 [0.0, 0.0, 1.0, 0.0]])


class AffineMap:
    """``z -> L z + b`` with ``L`` a real 4x4 matrix and ``b`` a point of C^2."""

    def __init__(self, linear, offset=(0, 0)):
        self.linear = check_matrix(linear)
        self.offset = as_points(offset).reshape(2)
        if abs(np.linalg.det(self.linear)) < 1e-300:
            raise ValueError("affine map is not invertible")

    @classmethod
    def identity(cls):
        return cls(np.eye(4))

    @classmethod
    def translation(cls, b):
        return cls(np.eye(4), b)

    @classmethod
    def complex_diagonal(cls, s1, s2):
        """``(z1, z2) -> (s1 z1, s2 z2)`` for real factors."""
        return cls(np.diag([s1, s1, s2, s2]))

    @classmethod
    def dilation(cls, tau):
        """The anisotropic dilation ``(z1, z2) -> (z1/sqrt(tau), z2/tau)``."""
        if not tau > 0:
            raise ValueError(f"dilation needs tau > 0, got {tau!r}")
        return cls.complex_diagonal(1.0 / np.sqrt(tau), 1.0 / tau)

    @classmethod
    def centered(cls, linear, base):
        """``z -> L (z - base)``, so that ``base`` is sent to the origin."""
        linear = check_matrix(linear)
        return cls(linear, -to_complex(linear @ to_real(as_points(base).reshape(2))))

    def __call__(self, z):
        z = as_points(z)
        return to_complex(to_real(z) @ self.linear.T) + self.offset

    def apply_vector(self, v):
        return to_complex(to_real(as_points(v)) @ self.linear.T)

    def inverse(self):
        inv = np.linalg.inv(self.linear)
        return AffineMap(inv, -to_complex(inv @ to_real(self.offset)))

    def compose(self, inner):
        """``self o inner``."""
        return AffineMap(self.linear @ inner.linear,
                         to_complex(self.linear @ to_real(inner.offset)) + self.offset)

    def __matmul__(self, inner):
        return self.compose(inner)

    @property
    def is_complex_linear(self):
        return bool(np.allclose(self.linear @ J_ST, J_ST @ self.linear, atol=1e-12))

    def to_dict(self):
        return {"linear": self.linear.tolist(),
                "offset": [[c.real, c.imag] for c in self.offset]}

    def __repr__(self):
        return f"AffineMap(linear={self.linear.tolist()}, offset={self.offset.tolist()})"
