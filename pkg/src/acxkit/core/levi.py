"""Levi forms and strict plurisubharmonicity relative to an almost complex structure.

With ``theta = J* dr`` (so ``theta_j = sum_k d_k r J_kj``) and
``W_ij = d_i theta_j - d_j theta_i`` the Levi form is

    L(X) = -d theta(X, J X) = -X^T W J X,

a quadratic form whose symmetric matrix is ``sym(-W J)``.
"""
from dataclasses import dataclass

import numpy as np

from .._validation import as_point, as_points, check_int, to_complex, to_real

H_LEVI = 1e-5
_EYE4 = np.eye(4)


def _theta(r, J, z):
    return np.einsum("...k,...kj->...j", r.gradient(z), J(z))


def _dtheta_exact(r, J, z):
    g, H = r.gradient(z), r.hessian(z)
    # d_i theta_j = sum_k H_ik J_kj + sum_k g_k d_i J_kj
    return H @ J(z) + np.einsum("...k,...ikj->...ij", g, J.jacobian(z))


def _dtheta_fd(r, J, z, h):
    cols = [(_theta(r, J, z + to_complex(h * e)) - _theta(r, J, z - to_complex(h * e))) / (2 * h)
            for e in _EYE4]
    return np.stack(cols, axis=-2)


def levi_matrix(r, J, z, method="auto", h=H_LEVI):
    """Symmetric 4x4 matrix ``S`` with ``L(X) = X^T S X`` at each point of ``z``.

    Parameters
    ----------
    method : {"auto", "exact", "fd"}
        ``"exact"`` uses the analytic Hessian of ``r`` and Jacobian of ``J``;
        ``"fd"`` differentiates ``theta`` by centered differences of step ``h``.
        ``"auto"`` picks ``"exact"`` when both inputs support it.
    """
    z = as_points(z)
    if J.region is not None:
        J.region.check_contains(z)
    if method == "auto":
        method = "exact" if (r.exact and J.exact_jacobian) else "fd"
    if method == "exact":
        D = _dtheta_exact(r, J, z)
    elif method == "fd":
        D = _dtheta_fd(r, J, z, h)
    else:
        raise ValueError(f"unknown method {method!r}")
    W = D - np.swapaxes(D, -1, -2)
    S = -W @ J(z)
    return 0.5 * (S + np.swapaxes(S, -1, -2))


def levi_form(r, J, p, X, method="auto", h=H_LEVI):
    """``L^J(r)(X) = -d(J* dr)(X, JX)`` at ``p``; ``X`` is two complex or four real numbers."""
    p = as_point(p)
    x = to_real(as_point(X))
    S = levi_matrix(r, J, p, method=method, h=h)
    return float(x @ S @ x)


@dataclass
class PshReport:
    verdict: bool
    min_eigenvalue: float
    argmin: np.ndarray
    n_points: int

    def to_json(self):
        return {"verdict": self.verdict, "min_eigenvalue": self.min_eigenvalue,
                "argmin": [[c.real, c.imag] for c in self.argmin], "n_points": self.n_points}


def is_strictly_psh(r, J, region, grid_n, tol=1e-12, method="auto"):
    """Minimum over a grid of the smallest eigenvalue of the Levi matrix.

    The minimum over unit vectors of ``L(X)`` equals that eigenvalue, so the
    eigen-decomposition covers every tangent direction at once. The verdict
    is positive iff the minimum exceeds ``tol``.
    """
    check_int("grid_n", grid_n, 2)
    z = region.grid(grid_n)
    lo, arg = np.inf, None
    for s in range(0, len(z), 4096):
        zc = z[s:s + 4096]
        ev = np.linalg.eigvalsh(levi_matrix(r, J, zc, method=method))[..., 0]
        i = int(np.argmin(ev))
        if ev[i] < lo:
            lo, arg = float(ev[i]), zc[i]
    return PshReport(verdict=bool(lo > tol), min_eigenvalue=lo, argmin=arg, n_points=len(z))
