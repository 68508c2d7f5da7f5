"""Pointwise normalization of a structure: a chart in which it is C^2-close to J_st."""
from dataclasses import dataclass

import numpy as np

from .._validation import as_point, check_positive
from ..errors import AcxError, ToleranceError
from .affine import AffineMap
from .regions import Ball
from .structures import STANDARD, TransportedStructure, c2_distance, intertwining_frame


@dataclass
class Normalization:
    chart: AffineMap
    Jhat: TransportedStructure
    achieved_norm: float
    scale: float


def normalize_at_point(J, p, lam0, lam_max=1.0, grid_n=5, fd_step=1e-3, steps=60):
    """Chart ``w = M (z - p) / lam`` with ``M J(p) M^-1 = J_st`` and small C^2 deviation.

    The dilation ``lam`` is the largest value in ``(0, lam_max]`` found by
    bisection for which the sampled C^2 distance of the direct image to
    ``J_st`` on the unit ball is at most ``lam0``.

    Raises
    ------
    ToleranceError
        when the bisection never produces an admissible scale.
    """
    lam0 = check_positive("lam0", lam0)
    p = as_point(p)
    M = np.linalg.inv(intertwining_frame(J(p)))
    unit = Ball((0, 0), 1.0)

    def attempt(lam):
        chart = AffineMap.centered(M / lam, p)
        Jhat = TransportedStructure(J, chart)
        try:
            d = c2_distance(Jhat, STANDARD, unit, grid_n, fd_step)
        except AcxError:
            d = np.inf
        return chart, Jhat, d

    best = attempt(lam_max)
    lam = lam_max
    if not best[2] <= lam0:
        lo, hi, best, lam = 0.0, lam_max, None, 0.0
        for _ in range(steps):
            mid = 0.5 * (lo + hi)
            trial = attempt(mid)
            if trial[2] <= lam0:
                lo, best, lam = mid, trial, mid
            else:
                hi = mid
        if best is None:
            raise ToleranceError(f"no dilation scale reaches C^2 distance {lam0} in {steps} steps")
    chart, Jhat, d = best
    return Normalization(chart=chart, Jhat=Jhat, achieved_norm=float(d), scale=float(lam))
