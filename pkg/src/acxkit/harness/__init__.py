"""Scenario experiments: orbit attraction, rescaled maps and the Wong-Rosay verdict."""
from .experiments import (FAIL, INCONCLUSIVE, NO_ACCUMULATION, PASS, AttractionTable,
                          CompactnessReport, LimitResult, RescaledMap, attraction_check,
                          compactness_verdict, cr_residual, derivative_floor, disc_attraction,
                          disc_ensemble, equicontinuity_table, limit_biholomorphism,
                          newton_inverse, rescaled_maps)
from .scenario import (Scenario, bidisc_scenario, boundary_candidates, identity_scenario,
                       make_scenario, mixed_scenario, mobius_scenario, perturbed_scenario,
                       rotation_scenario)
from .manifest import RUN_FILES, RunManifest, canonical_json, fmt, write_csv, write_run
