"""Scaling pipeline at strictly pseudoconvex boundary points and the Siegel model."""
from .pipeline import (ConvergenceReport, ScalingStep, closest_boundary_point, convergence_report,
                       normalizing_map, optimality_angle, scaled_defining_function, scaling_sequence,
                       scaling_step, transport_structure)
from .siegel import ModelDomain, SiegelMap, cayley, cayley_inverse, siegel_map, siegel_rho
