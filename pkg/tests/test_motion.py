import json
import math

import numpy as np
import pytest

from flapex.errors import (
    DimensionError,
    InputError,
    OrthogonalityViolation,
    RigidityViolation,
    SamplingError,
)
from flapex.flaps import FlapSpec, build_flapped_pair
from flapex.linalg import embedding_dimension, include_points
from flapex.motion import (
    AlexanderMotion,
    ExternalMotion,
    MotionSample,
    alexander_motion,
    displacement_field,
    monotonicity_report,
    sample_motion,
    split_displacement,
)
from flapex.obstruction import parallelogram_rigidity
from flapex.serialize import dumps, sample_from_csv, sample_from_dict, sample_to_csv, sample_to_dict
from flapex.simplex import regular_simplex


def make(d, s=0.5, M=200):
    pair = build_flapped_pair(FlapSpec(regular_simplex(d), s))
    return pair, sample_motion(alexander_motion(pair.p, pair.q), M)


def test_endpoints_exact(pair_d2):
    mot = alexander_motion(pair_d2.p, pair_d2.q)
    assert mot.ambient_dim == 4
    assert np.array_equal(mot.positions(0.0), include_points(pair_d2.p.coords, 4))
    assert np.array_equal(mot.positions(1.0), include_points(pair_d2.q.coords, 4))
    with pytest.raises(InputError):
        mot.positions(1.5)


def test_vertices_stationary(pair_d2):
    mot = alexander_motion(pair_d2.p, pair_d2.q)
    target = include_points(pair_d2.p.coords[:3], 4)
    for t in np.linspace(0, 1, 11):
        np.testing.assert_allclose(mot.positions(t)[:3], target, atol=1e-15)


@pytest.mark.parametrize("d", [2, 3])
def test_half_time_positions(d):
    # at t = 1/2 the flap point u_j - s n_k sits at (u_j, s u_k) for the regular simplex
    pair, _ = make(d)
    pos = alexander_motion(pair.p, pair.q).positions(0.5)
    u = pair.spec.simplex.vertices
    for n, lab in enumerate(pair.p.labels[d + 1:], start=d + 1):
        np.testing.assert_allclose(pos[n], np.concatenate([u[lab.j], 0.5 * u[lab.i]]), atol=1e-15)


def test_sample_counts(pair_d2):
    mot = alexander_motion(pair_d2.p, pair_d2.q)
    assert sample_motion(mot, 1).frames.shape == (2, 9, 4)
    smp = sample_motion(mot, 200)
    assert smp.grid.size == 201 and smp.grid[0] == 0.0 and smp.grid[-1] == 1.0
    with pytest.raises(InputError):
        sample_motion(mot, 0)


def test_sample_validation():
    labels = build_flapped_pair(FlapSpec(regular_simplex(1), 0.5)).p.labels
    with pytest.raises(InputError):
        MotionSample(labels, [0.0, 0.5, 0.5, 1.0], np.zeros((4, 4, 1)))
    with pytest.raises(InputError):
        MotionSample(labels, [0.1, 1.0], np.zeros((2, 4, 1)))
    with pytest.raises(InputError):
        MotionSample(labels, [0.0, 1.0], np.full((2, 4, 1), np.nan))


def test_external_motion_grid_must_match(alex_sample_d2):
    ext = ExternalMotion(alex_sample_d2)
    assert sample_motion(ext, 200) is alex_sample_d2
    with pytest.raises(SamplingError):
        sample_motion(ext, 50)
    with pytest.raises(SamplingError):
        ext.positions(0.0025)


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_alexander_is_monotone(d):
    _, smp = make(d)
    rep = monotonicity_report(smp)
    assert rep.ok and rep.min_increment >= -1e-9


def test_reversed_sample_fails(alex_sample_d2):
    rep = monotonicity_report(alex_sample_d2.reversed())
    assert not rep.ok and rep.min_increment < -1e-3
    assert rep.worst_pair is not None


def test_constant_motion_is_monotone(pair_d2):
    frames = np.stack([pair_d2.p.coords] * 5)
    smp = MotionSample(pair_d2.p.labels, np.linspace(0, 1, 5), frames)
    rep = monotonicity_report(smp)
    assert rep.ok and rep.min_increment == 0.0


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_displacement_closed_form(d):
    pair, smp = make(d)
    s = pair.spec.s
    u = pair.spec.simplex.vertices
    field = displacement_field(smp, pair.spec)
    for k in range(d + 1):
        expected = np.array([np.concatenate([s * math.cos(math.pi * t) * u[k],
                                             s * math.sin(math.pi * t) * u[k]]) for t in smp.grid])
        np.testing.assert_allclose(field.dk[k], expected, atol=1e-12)
    np.testing.assert_allclose(np.linalg.norm(field.dk, axis=2), s, atol=1e-9)
    # conservation of dot products
    for k in range(d + 1):
        for j in range(k + 1, d + 1):
            dots = np.einsum("mi,mi->m", field.dk[k], field.dk[j])
            np.testing.assert_allclose(dots, -s * s / d, atol=1e-9)
    spl = split_displacement(field)
    np.testing.assert_allclose(spl.a[:, 0], s, atol=1e-9)
    np.testing.assert_allclose(spl.a[:, -1], -s, atol=1e-9)
    np.testing.assert_allclose(spl.a[:, 100], 0, atol=1e-9)
    for zc in spl.zero_crossings():
        assert len(zc) == 1 and zc[0] == pytest.approx(0.5, abs=1e-12)


def test_perturbed_flap_point_breaks_rigidity(pair_d2, alex_sample_d2):
    frames = np.array(alex_sample_d2.frames)
    frames[50, 4, 0] += 1e-3
    bad = MotionSample(alex_sample_d2.labels, alex_sample_d2.grid, frames)
    with pytest.raises(RigidityViolation) as info:
        displacement_field(bad, pair_d2.spec)
    assert info.value.check == "consistency"


def test_truncated_sample_fails_norm_check(pair_d2, alex_sample_d2):
    with pytest.raises(RigidityViolation) as info:
        displacement_field(alex_sample_d2.truncated(3), pair_d2.spec)
    assert info.value.check == "norm"


def test_rigid_motion_of_whole_frame_is_aligned(pair_d2, alex_sample_d2, rng):
    Q, _ = np.linalg.qr(rng.normal(size=(4, 4)))
    frames = np.array(alex_sample_d2.frames) @ Q.T + rng.normal(size=4)
    moved = MotionSample(alex_sample_d2.labels, alex_sample_d2.grid, frames)
    field = displacement_field(moved, pair_d2.spec)
    assert field.alignment_residual < 1e-12
    np.testing.assert_allclose(np.linalg.norm(field.dk, axis=2), 0.5, atol=1e-9)


def test_split_rejects_tilted_displacement(pair_d2, alex_sample_d2):
    field = displacement_field(alex_sample_d2, pair_d2.spec)
    dk = np.array(field.dk)
    dk[0, 10, :2] += 1e-3 * np.array([-pair_d2.spec.simplex.vertices[0][1], pair_d2.spec.simplex.vertices[0][0]])
    tilted = type(field)(field.spec, field.grid, dk, 0.0, 0.0)
    with pytest.raises(OrthogonalityViolation):
        split_displacement(tilted)
    with pytest.raises(DimensionError):
        split_displacement(field, d=3)


def test_flap_quadrilateral_stays_rectangular(pair_d2, alex_sample_d2):
    # vertices u_j, u_l and flap points of face k stay a rectangle, hence rigid
    p0 = alex_sample_d2.frames[0]
    k, j, l = 0, 1, 2
    lab_idx = {str(lab): n for n, lab in enumerate(alex_sample_d2.labels)}
    idx = [j, l, lab_idx[f"f{k}_{l}"], lab_idx[f"f{k}_{j}"]]
    for m in (0, 37, 100, 163, 200):
        ok, rep = parallelogram_rigidity(p0[idx], alex_sample_d2.frames[m][idx])
        assert ok, rep


@pytest.mark.parametrize("d", [2, 3, 4])
def test_embedding_ranks(d):
    pair, _ = make(d)
    mot = alexander_motion(pair.p, pair.q)
    for t, rank in ((0.0, d), (1.0, d), (0.25, 2 * d), (0.5, 2 * d), (0.75, 2 * d)):
        assert embedding_dimension(mot.positions(t), 1e-8).numeric_rank == rank


def test_sample_round_trips(alex_sample_d2):
    back = sample_from_dict(json.loads(dumps(sample_to_dict(alex_sample_d2))))
    assert np.array_equal(back.frames, alex_sample_d2.frames)
    assert np.array_equal(back.grid, alex_sample_d2.grid)
    back = sample_from_csv(sample_to_csv(alex_sample_d2))
    assert np.array_equal(back.frames, alex_sample_d2.frames)
    assert back.labels == alex_sample_d2.labels


def test_alexander_requires_matching_dimensions(pair_d2):
    from flapex.flaps import Configuration
    lifted = Configuration(pair_d2.q.labels, include_points(pair_d2.q.coords, 3))
    with pytest.raises(DimensionError):
        AlexanderMotion(pair_d2.p, lifted)
