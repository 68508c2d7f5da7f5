"""Kobayashi-Royden metric estimates, lattice distances and experiments."""
from .distance import kr_distance
from .experiments import (BlowupTable, LocalizationResult, boundary_blowup_experiment,
                          linear_disc_family, localization_experiment)
from .metric import MetricEstimate, SearchConfig, kr_metric
