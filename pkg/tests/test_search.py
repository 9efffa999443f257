import json

import numpy as np
import pytest

from flapex.errors import DimensionError, InputError
from flapex.flaps import VERTEX, PointLabel
from flapex.motion import MotionSample, alexander_motion, monotonicity_report, sample_motion
from flapex.search import (
    WaypointMotion,
    _gradient,
    _residual,
    optimize_expansion_path,
    subconfiguration,
    violation_residual,
)
from flapex.serialize import dumps


def test_residual_examples(pair_d2, alex_sample_d2):
    assert violation_residual(alex_sample_d2) <= 1e-20
    assert violation_residual(alex_sample_d2.reversed()) > 0
    const = MotionSample(pair_d2.p.labels, [0.0, 0.5, 1.0], np.stack([pair_d2.p.coords] * 3))
    assert violation_residual(const) == 0.0


def test_residual_by_hand():
    labels = (PointLabel(VERTEX, 0), PointLabel(VERTEX, 1))
    frames = np.array([[[0.0], [3.0]], [[0.0], [2.0]], [[0.0], [2.5]]])
    smp = MotionSample(labels, [0.0, 0.5, 1.0], frames)
    # one drop of 1, then a rise
    assert violation_residual(smp) == 1.0


def test_waypoint_motion_endpoints_and_interpolation(pair_d2):
    start = np.hstack([pair_d2.p.coords, np.zeros((9, 1))])
    end = np.hstack([pair_d2.q.coords, np.zeros((9, 1))])
    wp = np.random.default_rng(0).normal(size=(9, 3, 3))
    mot = WaypointMotion(pair_d2.p.labels, start, end, wp)
    assert np.array_equal(mot.positions(0.0), start)
    assert np.array_equal(mot.positions(1.0), end)
    np.testing.assert_allclose(mot.positions(0.125), 0.5 * (start + wp[:, 0]), atol=1e-15)
    with pytest.raises(DimensionError):
        WaypointMotion(pair_d2.p.labels, start, end[:, :2], wp)


def test_fast_residual_matches_sampled_motion(pair_d2):
    rng = np.random.default_rng(3)
    start = np.hstack([pair_d2.p.coords, np.zeros((9, 1))])
    end = np.hstack([pair_d2.q.coords, np.zeros((9, 1))])
    mot = WaypointMotion(pair_d2.p.labels, start, end, rng.normal(scale=0.3, size=(9, 5, 3)))
    pairs = np.triu_indices(9, k=1)
    for refine in (1, 2, 4):
        smp = sample_motion(mot, 6 * refine)
        assert _residual(mot.knots, refine, pairs) == pytest.approx(violation_residual(smp), rel=1e-12)


def test_gradient_matches_plain_central_differences():
    rng = np.random.default_rng(5)
    knots = rng.normal(size=(4, 5, 2))
    pairs = np.triu_indices(4, k=1)
    g = _gradient(knots, 3)
    h = 1e-6
    for i, w, c in [(0, 0, 0), (2, 1, 1), (3, 2, 0)]:
        kp, km = knots.copy(), knots.copy()
        kp[i, w + 1, c] += h
        km[i, w + 1, c] -= h
        fd = (_residual(kp, 3, pairs) - _residual(km, 3, pairs)) / (2 * h)
        assert g[i, w, c] == pytest.approx(fd, rel=1e-6, abs=1e-9)


def test_alexander_control_on_knot_grid(pair_d2):
    res = optimize_expansion_path(pair_d2.p, pair_d2.q, 4, init="alexander", refine=1)
    assert res.best_residual < 1e-12 and res.iterations == 0


def test_piecewise_linear_rotation_has_positive_floor(pair_d2):
    # chords of the half-turn shorten rigid distances between knots
    res = optimize_expansion_path(pair_d2.p, pair_d2.q, 4, init="alexander", refine=4, budget=1)
    assert res.history[0][1] > 1e-3


def test_search_is_deterministic_and_monotone(pair_d2):
    kw = dict(waypoints=3, budget=40, seed=11, restarts=2)
    a = optimize_expansion_path(pair_d2.p, pair_d2.q, 3, **kw)
    b = optimize_expansion_path(pair_d2.p, pair_d2.q, 3, **kw)
    assert a.history == b.history
    assert np.array_equal(a.motion.knots, b.motion.knots)
    vals = [v for _, v in a.history]
    assert all(y <= x for x, y in zip(vals, vals[1:]))
    assert a.best_residual == min(r.best_residual for r in a.restarts)
    assert a.best_residual == pytest.approx(
        violation_residual(sample_motion(a.motion, 4 * 4)), rel=1e-12)
    doc = json.loads(dumps(a.to_dict()))
    assert doc["label"] == "evidence" and len(doc["restarts"]) == 2


def test_search_input_errors(pair_d2):
    with pytest.raises(InputError):
        optimize_expansion_path(pair_d2.p, pair_d2.q, 3, budget=0)
    with pytest.raises(InputError):
        optimize_expansion_path(pair_d2.p, pair_d2.q, 3, init="spiral")
    with pytest.raises(DimensionError):
        optimize_expansion_path(pair_d2.p, pair_d2.q, 1)
    with pytest.raises(DimensionError):
        optimize_expansion_path(pair_d2.p, pair_d2.q, 3, init="alexander")


def test_zero_residual_means_monotone(pair_d2):
    smp = sample_motion(alexander_motion(pair_d2.p, pair_d2.q), 12)
    if violation_residual(smp) == 0.0:
        assert monotonicity_report(smp, 0.0).ok
    res = optimize_expansion_path(pair_d2.p, pair_d2.q, 4, init="alexander", refine=1)
    smp = sample_motion(res.motion, res.motion.knots.shape[1] - 1)
    assert violation_residual(smp) == res.best_residual
    if res.best_residual == 0.0:
        assert monotonicity_report(smp, 0.0).ok


def test_small_subconfiguration_exploration(pair_d2):
    # d + 3 points in E^{d+2}: exploratory, the outcome is recorded, not gated
    p, q = subconfiguration(pair_d2.p, pair_d2.q, range(5))
    res = optimize_expansion_path(p, q, 4, waypoints=4, budget=100, seed=0)
    assert res.best_residual >= 0.0 and len(res.motion.labels) == 5
