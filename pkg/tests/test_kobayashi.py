import numpy as np
import pytest

from acxkit.core import Ball, DeformationData, DeformationStructure, Polydisc
from acxkit.kobayashi import (SearchConfig, boundary_blowup_experiment, kr_distance, kr_metric,
                              linear_disc_family, localization_experiment)
from acxkit.errors import RegionError

from oracles import ball_automorphism, poincare_distance_ball

B = Ball()


def test_ball_metric_at_center():
    m = kr_metric(B, None, np.zeros(2), np.array([1.0, 0]))
    assert m.upper == pytest.approx(1.0, rel=0.05)
    assert m.upper >= 1.0 - 1e-8     # an upper bound never undercuts the truth


def test_ball_metric_off_center():
    # K_B(a, e1) = 1 / (1 - |a|^2) for a on the z1 axis
    m = kr_metric(B, None, np.array([0.3, 0]), np.array([1.0, 0]))
    assert m.upper == pytest.approx(1 / (1 - 0.09), rel=1e-3)


def test_homogeneity():
    p, v = np.array([0.1, 0.2j]), np.array([0.3, 0.4 - 0.1j])
    base = kr_metric(B, None, p, v).upper
    for s in (2.0, 10.0):
        assert kr_metric(B, None, p, s * v).upper == pytest.approx(s * base, rel=1e-12)


def test_monotonicity_under_inclusion():
    small = kr_metric(Ball((0, 0), 0.5), None, np.zeros(2), np.array([1.0, 0])).upper
    big = kr_metric(B, None, np.zeros(2), np.array([1.0, 0])).upper
    assert small >= big
    assert small / big == pytest.approx(2.0, rel=0.02)


def test_polydisc_metric():
    m = kr_metric(Polydisc((0, 0), (1.0, 1.0)), None, np.zeros(2), np.array([1.0, 0]))
    assert m.upper == pytest.approx(1.0, rel=0.05)


def test_deformed_metric_is_finite():
    d = DeformationData.from_tables({"z1": 0.2})
    m = kr_metric(B, d, np.zeros(2), np.array([1.0, 0]))
    assert m.ok and 0.9 < m.upper < 1.2


def test_base_point_outside():
    with pytest.raises(RegionError):
        kr_metric(B, None, np.array([1.0, 0.5]), np.array([1.0, 0]))


def test_distance_zero_and_symmetry():
    a, b = np.array([0.1, 0.0]), np.array([0.3, 0.1j])
    assert kr_distance(B, None, a, a) == 0.0
    assert kr_distance(B, None, a, b, 8) == kr_distance(B, None, b, a, 8)


def test_distance_small_lattice():
    d = kr_distance(B, None, np.zeros(2), np.array([0.5, 0]), 16)
    assert d == pytest.approx(np.arctanh(0.5), rel=0.1)


def test_mobius_invariance():
    a, b = np.array([0.1, 0.1j]), np.array([-0.2, 0.15])
    phi = ball_automorphism(np.array([0.3, 0.2j]))
    d1 = kr_distance(B, None, a, b, 12)
    d2 = kr_distance(B, None, phi(a), phi(b), 12)
    assert d1 == pytest.approx(poincare_distance_ball(a, b), rel=0.1)
    assert d2 == pytest.approx(d1, rel=0.1)


def test_blowup_short():
    t = boundary_blowup_experiment(B, None, np.array([1.0, 0]), np.zeros(2), [1, 2, 3], lattice_n=8)
    assert t.verdict
    truth = [np.arctanh(1 - 2.0 ** -k) for k in (1, 2, 3)]
    assert np.allclose(t.distances, truth, rtol=0.05)


def test_localization_linear_family():
    res = localization_experiment(None, family=linear_disc_family())
    assert res.C0_hat <= 2.0
    assert res.verdict(0.3)
    assert res.ratios[0.2] <= 3


def test_localization_empty_ensemble():
    with pytest.raises(ValueError, match="empty"):
        localization_experiment(None, family=lambda delta: [])


def test_search_config_validation():
    with pytest.raises(ValueError):
        SearchConfig(seed_degree=0)
