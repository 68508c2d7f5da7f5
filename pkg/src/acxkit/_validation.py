"""Input validation and coordinate helpers.

Points of C^2 are carried as complex arrays of shape ``(..., 2)``. The real
picture R^4 uses the ordering ``(x1, y1, x2, y2)`` with ``z_j = x_j + i y_j``.
"""
import numbers

import numpy as np


def as_points(z):
    """Return ``z`` as a complex array whose last axis has length 2."""
    arr = np.asarray(z)
    if arr.shape[-1:] == (4,) and not np.iscomplexobj(arr):
        arr = to_complex(arr)
    arr = arr.astype(complex)
    if arr.ndim == 0 or arr.shape[-1] != 2:
        raise ValueError(f"expected points of C^2 with trailing axis 2, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("points must be finite")
    return arr


def as_point(z):
    """A single point of C^2 as a complex array of shape (2,)."""
    arr = as_points(z)
    if arr.shape != (2,):
        raise ValueError(f"expected a single point of C^2, got shape {arr.shape}")
    return arr


def as_vector(v, nonzero=False):
    """A tangent vector: two complex or four real components."""
    arr = as_point(v)
    if nonzero and not np.any(arr):
        raise ValueError("tangent vector must be nonzero")
    return arr


def to_real(z):
    z = np.asarray(z, dtype=complex)
    out = np.empty(z.shape[:-1] + (4,))
    out[..., 0::2] = z.real
    out[..., 1::2] = z.imag
    return out


def to_complex(x):
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != 4:
        raise ValueError(f"expected real vectors with trailing axis 4, got shape {x.shape}")
    return x[..., 0::2] + 1j * x[..., 1::2]


def check_positive(name, value, strict=True):
    if not isinstance(value, numbers.Real) or not np.isfinite(value):
        raise ValueError(f"{name} must be a finite real number, got {value!r}")
    if value < 0 or (strict and value == 0):
        raise ValueError(f"{name} must be {'> 0' if strict else '>= 0'}, got {value!r}")
    return float(value)


def check_int(name, value, minimum):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise ValueError(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")
    return int(value)


def check_matrix(m, shape=(4, 4)):
    m = np.asarray(m, dtype=float)
    if m.shape != shape:
        raise ValueError(f"expected a real matrix of shape {shape}, got {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite")
    return m
