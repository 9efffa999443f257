import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flapex.errors import ConsistencyError, InputError, PreconditionError
from flapex.flaps import FlapSpec, build_flapped_pair
from flapex.motion import MotionSample
from flapex.obstruction import (
    DIMENSION_SUFFICIENT,
    INCONCLUSIVE_GRID,
    MONOTONICITY,
    OBTUSE,
    ObstructionCertificate,
    find_non_obtuse_pair,
    is_parallelogram,
    obstruction_pipeline,
    obtuse_contradiction,
    obtuse_descent,
    parallelogram_rigidity,
)
from flapex.serialize import dumps
from flapex.simplex import regular_simplex

from conftest import random_isometry


def random_parallelogram(rng, k):
    a, b, c = rng.normal(size=(3, k))
    return np.array([a, b, b + c - a, c])


def test_parallelogram_examples():
    sq = np.array([[0, 0], [1, 0], [1, 1], [0, 1]], dtype=float)
    assert is_parallelogram(sq)
    assert not is_parallelogram([[0, 0], [1, 0], [0, 1], [1, 1]])
    ok, rep = parallelogram_rigidity(sq, sq + 3.0)
    assert ok and rep.max_distance_mismatch == 0.0
    with pytest.raises(PreconditionError) as info:
        parallelogram_rigidity([[0, 0], [2, 0], [1, 1], [0, 1]], sq)
    assert info.value.which == "parallelogram"
    with pytest.raises(PreconditionError) as info:
        parallelogram_rigidity(sq, 2 * sq)
    assert info.value.which == "distance"
    with pytest.raises(InputError):
        parallelogram_rigidity(sq[:3], sq[:3])


def test_rigidity_suite_isometries():
    rng = np.random.default_rng(41)
    for _ in range(500):
        k = int(rng.integers(2, 5))
        u = random_parallelogram(rng, k)
        v = random_isometry(rng, k, k + int(rng.integers(0, 3)))(u)
        ok, rep = parallelogram_rigidity(u, v)
        assert ok and rep.midpoint_gap_v <= 1e-9


def test_rigidity_suite_perturbations():
    rng = np.random.default_rng(42)
    for _ in range(100):
        k = int(rng.integers(2, 5))
        u = random_parallelogram(rng, k)
        v = random_isometry(rng, k, k + 1)(u)
        v[int(rng.integers(4))] += 1e-2 * rng.normal(size=k + 1)
        with pytest.raises(PreconditionError) as info:
            parallelogram_rigidity(u, v)
        assert info.value.which == "distance"


def test_find_non_obtuse_pair_examples():
    w = find_non_obtuse_pair([[1, 0], [0, 1], [-1, -1]])
    assert w.pair == (0, 1) and w.dot == 0.0
    assert find_non_obtuse_pair(regular_simplex(3).vertices) is None
    with pytest.raises(InputError):
        find_non_obtuse_pair(np.zeros((0, 2)))


@pytest.mark.parametrize("n", range(1, 7))
def test_lemma_suite(n):
    rng = np.random.default_rng(1000 + n)
    u = regular_simplex(n).vertices
    for trial in range(1000):
        if trial % 2:
            V = rng.normal(size=(n + 2, n))
        else:
            # near-extremal: a jittered obtuse family plus one more vector
            V = np.vstack([u + 0.05 * rng.normal(size=u.shape), rng.normal(size=n)])
        V = V[rng.permutation(n + 2)]
        w = find_non_obtuse_pair(V)
        assert w is not None
        i, j = w.pair
        assert V[i] @ V[j] >= 0


@pytest.mark.parametrize("n", range(1, 9))
def test_simplex_family_is_maximal_obtuse(n):
    u = regular_simplex(n).vertices
    assert find_non_obtuse_pair(u) is None
    G = u @ u.T
    assert np.all(G[~np.eye(n + 1, dtype=bool)] < 0)


@settings(max_examples=80, deadline=None)
@given(st.integers(2, 7), st.integers(0, 2**32 - 1))
def test_obtuse_descent_algebra(n, seed):
    rng = np.random.default_rng(seed)
    V = rng.normal(size=(n + 1, n))
    pivot = int(rng.integers(n + 1))
    along, rem = obtuse_descent(V, pivot)
    rest = np.delete(V, pivot, axis=0)
    assert rem.shape == (n, n - 1)
    np.testing.assert_allclose(np.outer(along, along) + rem @ rem.T, rest @ rest.T, atol=1e-12)
    e = -V[pivot] / np.linalg.norm(V[pivot])
    np.testing.assert_allclose(along, rest @ e, atol=1e-12)


def test_descent_of_obtuse_family_stays_obtuse():
    # removing the pivot direction from an obtuse family leaves an obtuse family
    u = regular_simplex(5).vertices
    along, rem = obtuse_descent(u, 0)
    assert np.all(along > 0)
    G = rem @ rem.T
    assert np.all(G[~np.eye(5, dtype=bool)] < 0)


def test_truncated_alexander_is_obstructed(pair_d2, alex_sample_d2):
    for _ in range(3):
        cert = obstruction_pipeline(alex_sample_d2.truncated(3), pair_d2.spec)
        assert isinstance(cert, ObstructionCertificate)
        assert cert.kind.endswith("Violation")
        json.loads(dumps(cert.to_dict()))


def test_genuine_motion_has_no_obstruction(pair_d2, alex_sample_d2):
    res = obstruction_pipeline(alex_sample_d2, pair_d2.spec)
    assert res.kind == "noObstruction" and res.reason == DIMENSION_SUFFICIENT
    assert res.boundary_obtuse_family
    assert res.t0 == pytest.approx(0.5)
    np.testing.assert_allclose(res.a_values, 0, atol=1e-9)
    off = res.pairwise_dots[~np.eye(3, dtype=bool)]
    np.testing.assert_allclose(off, -0.25 / 2, atol=1e-9)


def test_two_frame_motion_is_inconclusive(pair_d2):
    smp = MotionSample(pair_d2.p.labels, [0.0, 1.0], np.stack([pair_d2.p.coords, pair_d2.q.coords]))
    res = obstruction_pipeline(smp, pair_d2.spec)
    assert res.kind == "noObstruction" and res.reason == INCONCLUSIVE_GRID


def test_straight_line_motion_contracts(pair_d2):
    mid = 0.5 * (pair_d2.p.coords + pair_d2.q.coords)
    frames = np.stack([pair_d2.p.coords, mid, pair_d2.q.coords])
    frames = np.concatenate([frames, np.zeros((3, 9, 1))], axis=2)
    cert = obstruction_pipeline(MotionSample(pair_d2.p.labels, [0, 0.5, 1], frames), pair_d2.spec)
    assert cert.kind == MONOTONICITY


def test_rotating_out_of_plane_parts_are_caught(pair_d2):
    # displacements (s cos th u_k, s sin th e) keep every norm but not d_k . d_j
    d, s = 2, pair_d2.spec.s
    u = pair_d2.spec.simplex.vertices
    grid = np.linspace(0, 1, 41)
    frames = []
    for t in grid:
        th = np.pi * t
        pts = [np.append(u[i], 0.0) for i in range(3)]
        for lab in pair_d2.p.labels[3:]:
            pts.append(np.append(u[lab.j] + s * np.cos(th) * u[lab.i], s * np.sin(th)))
        frames.append(pts)
    cert = obstruction_pipeline(MotionSample(pair_d2.p.labels, grid, np.array(frames)), pair_d2.spec)
    assert cert.kind == MONOTONICITY


def test_pipeline_rejects_malformed_input(pair_d2, alex_sample_d2):
    spec3 = FlapSpec(regular_simplex(3), 0.5)
    with pytest.raises(InputError):
        obstruction_pipeline(alex_sample_d2, spec3)


def test_obtuse_certificate_on_hypothetical_payload(pair_d2):
    s = pair_d2.spec.s
    w = np.array([[s], [s], [-s]])
    cert = obtuse_contradiction(pair_d2.spec, 0.5, np.zeros(3), w, w @ w.T)
    assert cert.kind == OBTUSE
    off = cert.pairwise_dots[~np.eye(3, dtype=bool)]
    np.testing.assert_allclose(off, -s * s / 2, atol=1e-15)
    assert cert.details["lemmaWitness"]["pair"] == [0, 1]
    cert.verify()
    doc = json.loads(dumps(cert.to_dict()))
    assert doc["kind"] == OBTUSE and len(doc["wkVectors"]) == 3


def test_certificate_verify_rejects_bad_payloads(pair_d2):
    s = pair_d2.spec.s
    good = obtuse_contradiction(pair_d2.spec, 0.5, np.zeros(3), np.array([[s], [s], [-s]]))
    too_roomy = ObstructionCertificate(OBTUSE, 0.5, good.a_values, np.zeros((3, 2)),
                                       good.pairwise_dots, "")
    with pytest.raises(ConsistencyError):
        too_roomy.verify()
    dots = np.array(good.pairwise_dots)
    dots[0, 1] = dots[1, 0] = 0.0
    with pytest.raises(ConsistencyError):
        ObstructionCertificate(OBTUSE, 0.5, good.a_values, good.w_vectors, dots, "").verify()
    with pytest.raises(ConsistencyError):
        obtuse_contradiction(pair_d2.spec, 0.5, np.array([s, s, 0]), np.array([[s], [s], [-s]]))
