"""Quasilinear Cauchy-Riemann solver for discs in deformation form."""
from .grid import DiscGrid
from .solver import (DiscMap, SolverConfig, c1_c0_ratio, cauchy_green, get_grid, picard_step,
                     residual, solve_disc)
