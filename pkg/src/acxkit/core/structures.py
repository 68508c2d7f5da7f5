"""Almost complex structures on regions of C^2 as real 4x4 matrix fields.

The main constructor is the deformation form ``(A1, A2)``: the structure for
which a map ``f`` from the unit disc satisfies ``df o J_st = J o df`` exactly
when ``d f_j / d zetabar = A_j(f) * conj(d f_j / d zeta)``. In each complex
coordinate plane such a structure acts on a vector ``w`` as

    J(w) = P w + Q conj(w),   P = i (1 + |A|^2) / (1 - |A|^2),
                              Q = -2 i A / (1 - |A|^2),

so ``J`` is block diagonal in ``(x1, y1 | x2, y2)``.
"""
from dataclasses import dataclass

import numpy as np

from .._validation import as_points, check_positive, to_complex
from ..errors import EllipticityError, RegionError
from .affine import J_ST, AffineMap
from .polynomial import ComplexPolynomial
from .regions import Ball

# collar tolerated outside a validity ball so that difference stencils at the edge stay defined
REGION_SLACK = 1e-2
_EYE4 = np.eye(4)


class DeformationData:
    """Deformation coefficients ``A1, A2`` with their validity ball.

    Parameters
    ----------
    A1, A2 : ComplexPolynomial or dict
        Coefficient tables (degree at most 4) without constant term.
    radius : float
        Radius of the validity ball centered at the origin.
    kappa : float
        Ellipticity bound; ``sup |A_j|`` over the ball must stay below it.
    """

    def __init__(self, A1=None, A2=None, radius=1.0, kappa=0.5):
        self.A = tuple(_as_poly(a) for a in (A1, A2))
        self.radius = check_positive("radius", radius)
        self.kappa = check_positive("kappa", kappa)
        if self.kappa >= 1:
            raise ValueError(f"ellipticity bound must be < 1, got {kappa}")
        for j, a in enumerate(self.A, 1):
            if a.constant_term() != 0:
                raise ValueError(f"A{j}(0) must vanish, constant term is {a.constant_term()}")
        self.sup_bound = self._sup_estimate()
        if self.sup_bound >= self.kappa:
            raise EllipticityError(
                f"sup |A_j| on ball(0, {self.radius}) is {self.sup_bound:.4g} >= kappa = {self.kappa}")

    @classmethod
    def from_tables(cls, A1=None, A2=None, **kw):
        return cls(ComplexPolynomial.from_table(A1 or {}), ComplexPolynomial.from_table(A2 or {}), **kw)

    @property
    def A1(self):
        return self.A[0]

    @property
    def A2(self):
        return self.A[1]

    @property
    def is_zero(self):
        return self.A[0].is_zero and self.A[1].is_zero

    @property
    def region(self):
        return Ball((0, 0), self.radius)

    def _sup_estimate(self):
        bound = max(a.coefficient_bound(self.radius) for a in self.A)
        if bound < self.kappa:
            return bound
        # the coefficient bound is crude; fall back to a sampled maximum
        z = self.region.grid(9)
        rng = np.random.default_rng(0)
        s = rng.normal(size=(4000, 4))
        s = self.radius * s / np.linalg.norm(s, axis=1, keepdims=True)
        z = np.concatenate([z, to_complex(s)])
        return float(max(np.abs(a(z)).max() for a in self.A))

    def values(self, z):
        """``(A1(z), A2(z))`` stacked on the last axis."""
        z = as_points(z)
        return np.stack([a(z) for a in self.A], axis=-1)

    def to_dict(self):
        return {"A1": self.A[0].to_table(), "A2": self.A[1].to_table(),
                "radius": self.radius, "kappa": self.kappa}

    def __repr__(self):
        return f"DeformationData(A1={self.A[0]!r}, A2={self.A[1]!r}, radius={self.radius})"


def _as_poly(a):
    if a is None:
        return ComplexPolynomial()
    if isinstance(a, ComplexPolynomial):
        if a.degree > 4:
            raise ValueError("deformation polynomials are capped at degree 4")
        return a
    return ComplexPolynomial.from_table(a) if all(isinstance(k, str) for k in a) else ComplexPolynomial(a)


def _blocks(A):
    """Real 2x2 blocks ``[[q1, q2 - p], [q2 + p, -q1]]`` for complex ``A`` of any shape."""
    a2 = np.abs(A) ** 2
    s = 1.0 - a2
    p = (1.0 + a2) / s
    Q = -2j * A / s
    q1, q2 = Q.real, Q.imag
    return np.stack([np.stack([q1, q2 - p], -1), np.stack([q2 + p, -q1], -1)], -2)


def _check_domain(d, z):
    z = as_points(z)
    if np.any(np.linalg.norm(z, axis=-1) > d.radius + REGION_SLACK):
        raise RegionError(f"point outside the validity ball of radius {d.radius}")
    return z


def matrix_from_deformation(d, z):
    """Real 4x4 matrix of the structure defined by ``d`` at ``z`` (vectorized).

    Raises
    ------
    RegionError
        ``z`` outside the validity ball.
    EllipticityError
        ``|A_j(z)| >= 1``.
    """
    z = _check_domain(d, z)
    A = d.values(z)
    if np.any(np.abs(A) >= 1):
        raise EllipticityError("|A_j(z)| >= 1: the system is not elliptic there")
    B = _blocks(A)
    M = np.zeros(z.shape[:-1] + (4, 4))
    M[..., 0:2, 0:2] = B[..., 0, :, :]
    M[..., 2:4, 2:4] = B[..., 1, :, :]
    return M


def deformation_from_matrix(M):
    """Inverse of the block map: ``(A1, A2)`` from a block-diagonal structure matrix."""
    M = np.asarray(M, dtype=float)
    out = []
    for k in (0, 2):
        Q = M[..., k, k] + 0.5j * (M[..., k, k + 1] + M[..., k + 1, k])
        q = np.abs(Q)
        with np.errstate(invalid="ignore", divide="ignore"):
            a = np.where(q > 0, (np.sqrt(1 + q ** 2) - 1) / np.where(q > 0, q, 1), 0.0)
        out.append(0.5j * Q * (1 - a ** 2))
    return np.stack(out, axis=-1)


def _deformation_jacobian(d, z):
    """``d J / d x_k`` as an array ``(..., 4, 4, 4)`` indexed ``[..., k, i, j]``."""
    A = d.values(z)
    s = 1.0 - np.abs(A) ** 2
    out = np.zeros(z.shape[:-1] + (4, 4, 4))
    for j, a in enumerate(d.A):
        Aj, sj = A[..., j], s[..., j]
        for k in range(4):
            dA = a.real_partial(k)(z)
            ds = -2.0 * (np.conj(Aj) * dA).real
            dp = -2.0 * ds / sj ** 2
            dQ = -2j * (dA / sj - Aj * ds / sj ** 2)
            q1, q2 = dQ.real, dQ.imag
            b = 2 * j
            out[..., k, b, b] = q1
            out[..., k, b, b + 1] = q2 - dp
            out[..., k, b + 1, b] = q2 + dp
            out[..., k, b + 1, b + 1] = -q1
    return out


class StructureField:
    """A field ``z -> J(z)`` of real 4x4 matrices.

    Subclasses implement ``__call__``; ``jacobian`` defaults to centered
    differences with step ``fd_step``.
    """

    exact_jacobian = False
    region = None
    fd_step = 1e-6
    name = "structure"

    def jacobian(self, z):
        z = as_points(z)
        h = self.fd_step
        return np.stack([(self(z + to_complex(h * e)) - self(z - to_complex(h * e))) / (2 * h)
                         for e in _EYE4], axis=-3)

    def residual(self, z):
        """Frobenius norm of ``J(z)^2 + I``."""
        M = self(z)
        return np.linalg.norm(M @ M + _EYE4, axis=(-2, -1))

    def __repr__(self):
        return f"{type(self).__name__}({self.name})"


class ConstantStructure(StructureField):
    """Constant matrix field (not required to square to ``-I``, so it can be validated)."""

    exact_jacobian = True

    def __init__(self, M, name="constant"):
        self.M = np.array(M, dtype=float).reshape(4, 4)
        self.name = name

    def __call__(self, z):
        z = as_points(z)
        return np.broadcast_to(self.M, z.shape[:-1] + (4, 4)).copy()

    def jacobian(self, z):
        z = as_points(z)
        return np.zeros(z.shape[:-1] + (4, 4, 4))


STANDARD = ConstantStructure(J_ST, name="J_st")


def standard():
    return STANDARD


class DeformationStructure(StructureField):
    """Structure field of a :class:`DeformationData`, with exact derivatives."""

    exact_jacobian = True

    def __init__(self, d, name="deformation"):
        self.d = d
        self.region = d.region
        self.name = name

    def __call__(self, z):
        return matrix_from_deformation(self.d, z)

    def jacobian(self, z):
        z = _check_domain(self.d, z)
        return _deformation_jacobian(self.d, z)


class TransportedStructure(StructureField):
    """Direct image ``L J(T^-1 w) L^-1`` of ``J`` under the affine map ``T = L z + b``."""

    def __init__(self, J, affine, name=None):
        self.J = J
        self.affine = affine
        self.inverse = affine.inverse()
        self.Linv = self.inverse.linear
        self.exact_jacobian = J.exact_jacobian
        self.name = name or f"transport({J.name})"

    def __call__(self, w):
        return self.affine.linear @ self.J(self.inverse(w)) @ self.Linv

    def jacobian(self, w):
        dJ = self.J.jacobian(self.inverse(w))
        inner = self.affine.linear @ dJ @ self.Linv
        # chain rule: d/dw_k = sum_m (L^-1)_{mk} d/dz_m
        return np.einsum("...mij,mk->...kij", inner, self.Linv)


class CallableStructure(StructureField):
    """Wrap a vectorized callable ``z -> (..., 4, 4)``."""

    def __init__(self, func, region=None, name="callable"):
        self.func = func
        self.region = region
        self.name = name

    def __call__(self, z):
        z = as_points(z)
        return np.asarray(self.func(z), dtype=float)


class PushforwardStructure(StructureField):
    """Direct image of ``base`` under a diffeomorphism ``psi``.

    ``J(w) = dpsi(z) base(z) dpsi(z)^-1`` with ``z = psi_inv(w)``; ``dpsi``
    returns the real 4x4 Jacobian.
    """

    def __init__(self, psi, psi_inv, dpsi, base=None, name="pushforward"):
        self.psi = psi
        self.psi_inv = psi_inv
        self.dpsi = dpsi
        self.base = base or STANDARD
        self.name = name

    def __call__(self, w):
        z = self.psi_inv(as_points(w))
        D = self.dpsi(z)
        return D @ self.base(z) @ np.linalg.inv(D)


@dataclass
class ValidationReport:
    max_residual: float
    grid_n: int
    region: dict
    passed: bool
    max_d1: float
    max_d2: float
    n_points: int
    norm: str = "frobenius"

    def to_json(self):
        return {"max_residual": self.max_residual, "grid_n": self.grid_n, "region": self.region,
                "pass": self.passed, "max_d1": self.max_d1, "max_d2": self.max_d2,
                "n_points": self.n_points, "norm": self.norm}


def _chunks(z, size=4096):
    for s in range(0, len(z), size):
        yield z[s:s + size]


def fd_derivative_norms(F, z, h, ord=2):
    """Max norms of ``F``, its first and second centered differences over points ``z``.

    ``F`` maps points ``(n, 2)`` to matrices ``(n, 4, 4)``. Returns three floats:
    the sup of ``|F|``, the sup over directions of ``|d_k F|`` and the sup over
    direction pairs of ``|d_k d_l F|``, all in the matrix norm ``ord``.
    """
    e = [to_complex(h * v) for v in _EYE4]
    s0 = s1 = s2 = 0.0

    def nrm(M):
        return np.linalg.norm(M, ord=ord, axis=(-2, -1))

    for zc in _chunks(z):
        f0 = F(zc)
        s0 = max(s0, float(nrm(f0).max()))
        fp = [F(zc + ek) for ek in e]
        fm = [F(zc - ek) for ek in e]
        for k in range(4):
            s1 = max(s1, float(nrm((fp[k] - fm[k]) / (2 * h)).max()))
            s2 = max(s2, float(nrm((fp[k] - 2 * f0 + fm[k]) / h ** 2).max()))
            for l in range(k + 1, 4):
                mixed = (F(zc + e[k] + e[l]) - F(zc + e[k] - e[l])
                         - F(zc - e[k] + e[l]) + F(zc - e[k] - e[l])) / (4 * h ** 2)
                s2 = max(s2, float(nrm(mixed).max()))
    return s0, s1, s2


def validate_structure(J, region, grid_n, eps=1e-10, fd_step=1e-3, derivatives=True):
    """Check ``J^2 = -I`` on a grid of ``region`` and sample derivative sizes.

    The residual is measured in the Frobenius norm, so ``J = I`` gives 4.
    """
    if grid_n < 2:
        raise ValueError(f"grid_n must be >= 2, got {grid_n}")
    z = region.grid(grid_n)
    res = max(float(J.residual(zc).max()) for zc in _chunks(z))
    d1 = d2 = 0.0
    if derivatives:
        _, d1, d2 = fd_derivative_norms(J, z, fd_step)
    return ValidationReport(max_residual=res, grid_n=int(grid_n), region=region.to_dict(),
                            passed=bool(res <= eps), max_d1=d1, max_d2=d2, n_points=len(z))


def c2_distance(J1, J2, region, grid_n=5, fd_step=1e-3):
    """Sampled C^2 distance: sum of the sups of value, first and second differences.

    Matrix sizes are spectral norms; derivatives are centered differences with
    step ``fd_step`` in each real direction.
    """
    z = region.grid(grid_n)
    s0, s1, s2 = fd_derivative_norms(lambda x: J1(x) - J2(x), z, fd_step)
    return s0 + s1 + s2


def c1_deviation(J, region, grid_n=5, fd_step=1e-3, reference=None):
    """Sup of ``|J - J_ref|`` and of its first differences (spectral norm)."""
    reference = reference or STANDARD
    z = region.grid(grid_n)
    F = lambda x: J(x) - reference(x)  # noqa: E731
    s0 = max(float(np.linalg.norm(F(zc), ord=2, axis=(-2, -1)).max()) for zc in _chunks(z))
    s1 = 0.0
    for zc in _chunks(z):
        for e in _EYE4:
            dz = to_complex(fd_step * e)
            D = (F(zc + dz) - F(zc - dz)) / (2 * fd_step)
            s1 = max(s1, float(np.linalg.norm(D, ord=2, axis=(-2, -1)).max()))
    return s0, s1


def intertwining_frame(M):
    """Real basis ``B = [e1, M e1, e2, M e2]`` with ``B^-1 M B = J_st``.

    ``e1, e2`` are drawn from the standard basis, preferring ``(x1, x2)``.
    """
    M = np.asarray(M, dtype=float)
    best = None
    for a, b in ((0, 2), (0, 3), (1, 2), (1, 3), (0, 1), (2, 3)):
        B = np.column_stack([_EYE4[a], M @ _EYE4[a], _EYE4[b], M @ _EYE4[b]])
        c = np.linalg.cond(B)
        if c < 1e8:
            return B
        if best is None or c < best[0]:
            best = (c, B)
    return best[1]


def conjugating_map(M, base=(0, 0)):
    """Affine map ``z -> B^-1 (z - base)`` sending the constant structure ``M`` to ``J_st``."""
    B = intertwining_frame(M)
    return AffineMap.centered(np.linalg.inv(B), base)
