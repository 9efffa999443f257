"""Continuous motions of labeled configurations.

Covers the half-turn motion that realizes any expansion in twice the
dimension, uniform sampling, pairwise monotonicity checks, and the
per-face displacement field of a flapped pair together with its split
into an in-plane coefficient and an out-of-plane vector.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    ConfigurationError,
    DimensionError,
    InputError,
    OrthogonalityViolation,
    RigidityViolation,
    SamplingError,
)
from .flaps import Configuration, FlapSpec, PointLabel, canonical_labels, check_matching
from .linalg import include_points, pairwise_distances

DEFAULT_SAMPLES = 200


class Motion:
    """Trajectories ``t -> E^f`` for a labeled point list, ``t`` in [0, 1]."""

    kind = "abstract"

    def __init__(self, labels, ambient_dim: int):
        self.labels = tuple(labels)
        self.ambient_dim = int(ambient_dim)

    @property
    def n_points(self) -> int:
        return len(self.labels)

    def positions(self, t: float) -> np.ndarray:
        raise NotImplementedError

    def eval(self, index: int, t: float) -> np.ndarray:
        return self.positions(t)[index].copy()

    def frame(self, t: float) -> Configuration:
        return Configuration(self.labels, self.positions(t))


class AlexanderMotion(Motion):
    """Half-turn motion from ``p`` to ``q`` in E^{2d}.

    ``f_i(t) = ((p_i + q_i)/2 + cos(pi t)(p_i - q_i)/2, sin(pi t)(p_i - q_i)/2)``.
    """

    kind = "alexander"

    def __init__(self, p: Configuration, q: Configuration):
        check_matching(p, q, same_dim=True)
        super().__init__(p.labels, 2 * p.dim)
        self.p = p
        self.q = q
        self._mid = 0.5 * (p.coords + q.coords)
        self._half = 0.5 * (p.coords - q.coords)

    def positions(self, t: float) -> np.ndarray:
        t = _check_time(t)
        if t == 0.0:
            return include_points(self.p.coords, self.ambient_dim)
        if t == 1.0:
            return include_points(self.q.coords, self.ambient_dim)
        c, s = math.cos(math.pi * t), math.sin(math.pi * t)
        return np.hstack([self._mid + c * self._half, s * self._half])


def alexander_motion(p: Configuration, q: Configuration) -> AlexanderMotion:
    return AlexanderMotion(p, q)


def _check_time(t: float) -> float:
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise InputError(f"time {t} outside [0, 1]")
    return t


@dataclass(frozen=True, eq=False)
class MotionSample:
    """Frames of a motion on a strictly increasing grid from 0 to 1.

    ``frames`` has shape (len(grid), N, f).
    """

    labels: tuple[PointLabel, ...]
    grid: np.ndarray
    frames: np.ndarray

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float).copy()
        frames = np.asarray(self.frames, dtype=float).copy()
        if grid.ndim != 1 or grid.size < 2:
            raise InputError("grid needs at least the two endpoints")
        if grid[0] != 0.0 or grid[-1] != 1.0 or np.any(np.diff(grid) <= 0):
            raise InputError("grid must increase strictly from exactly 0 to exactly 1")
        if frames.ndim != 3 or frames.shape[0] != grid.size or frames.shape[1] != len(self.labels):
            raise InputError(f"frames of shape {frames.shape} do not match grid/labels")
        if not np.all(np.isfinite(frames)):
            raise InputError("frame coordinates must be finite")
        grid.setflags(write=False)
        frames.setflags(write=False)
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "frames", frames)

    @property
    def ambient_dim(self) -> int:
        return self.frames.shape[2]

    @property
    def n_points(self) -> int:
        return self.frames.shape[1]

    def frame(self, m: int) -> Configuration:
        return Configuration(self.labels, self.frames[m])

    def frame_at(self, t: float) -> Configuration:
        hits = np.flatnonzero(np.abs(self.grid - t) <= 1e-12)
        if hits.size == 0:
            raise SamplingError(f"t={t} is not a grid time")
        return self.frame(int(hits[0]))

    def reversed(self) -> "MotionSample":
        """The same frames traversed backwards in time."""
        return MotionSample(self.labels, (1.0 - self.grid[::-1]).clip(0, 1), self.frames[::-1])

    def truncated(self, f: int) -> "MotionSample":
        """Keep only the first ``f`` coordinates of every frame."""
        if not 1 <= f <= self.ambient_dim:
            raise DimensionError(f"cannot truncate E^{self.ambient_dim} to E^{f}")
        return MotionSample(self.labels, self.grid, self.frames[:, :, :f])


class ExternalMotion(Motion):
    """A motion known only through a stored sample."""

    kind = "external"

    def __init__(self, sample: MotionSample):
        super().__init__(sample.labels, sample.ambient_dim)
        self.sample = sample

    def positions(self, t: float) -> np.ndarray:
        t = _check_time(t)
        hits = np.flatnonzero(self.sample.grid == t)
        if hits.size == 0:
            raise SamplingError(f"external motion has no data at t={t}")
        return self.sample.frames[hits[0]].copy()


def sample_motion(motion: Motion, M: int = DEFAULT_SAMPLES) -> MotionSample:
    """Evaluate ``motion`` on the uniform grid ``t_m = m / M``."""
    if int(M) != M or M < 1:
        raise InputError(f"sample count must be a positive integer, got {M!r}")
    M = int(M)
    grid = np.arange(M + 1) / M
    if isinstance(motion, ExternalMotion):
        stored = motion.sample.grid
        if stored.shape != grid.shape or not np.array_equal(stored, grid):
            raise SamplingError("external motion is not stored on the requested grid")
        return motion.sample
    frames = np.stack([motion.positions(t) for t in grid])
    return MotionSample(motion.labels, grid, frames)


@dataclass(frozen=True)
class MonotonicityReport:
    ok: bool
    min_increment: float
    worst_pair: tuple[PointLabel, PointLabel] | None
    worst_interval: tuple[float, float] | None

    def summary(self) -> dict:
        return {
            "ok": self.ok,
            "minIncrement": self.min_increment,
            "worstPair": None if self.worst_pair is None else [str(x) for x in self.worst_pair],
            "worstInterval": None if self.worst_interval is None else list(self.worst_interval),
        }


def pair_distances(sample: MotionSample) -> np.ndarray:
    """Distances of all pairs a < b on every frame, shape (frames, pairs)."""
    D = pairwise_distances(sample.frames)
    a, b = np.triu_indices(sample.n_points, k=1)
    return D[:, a, b]


def monotonicity_report(sample: MotionSample, tol: float = 1e-9) -> MonotonicityReport:
    """Check that no pairwise distance drops by more than ``tol`` between
    adjacent grid times."""
    if sample.n_points < 2:
        return MonotonicityReport(True, 0.0, None, None)
    inc = np.diff(pair_distances(sample), axis=0)
    m, k = np.unravel_index(int(np.argmin(inc)), inc.shape)
    a, b = np.triu_indices(sample.n_points, k=1)
    worst = float(inc[m, k])
    return MonotonicityReport(
        worst >= -tol,
        worst,
        (sample.labels[a[k]], sample.labels[b[k]]),
        (float(sample.grid[m]), float(sample.grid[m + 1])),
    )


# --- displacement field -------------------------------------------------


@dataclass(frozen=True, eq=False)
class DisplacementField:
    """``dk[k, m]`` is the common offset of the face-``k`` flap points from
    their base vertices at grid time ``grid[m]``."""

    spec: FlapSpec
    grid: np.ndarray
    dk: np.ndarray
    consistency_residual: float
    alignment_residual: float

    @property
    def ambient_dim(self) -> int:
        return self.dk.shape[2]


@dataclass(frozen=True, eq=False)
class SplitField:
    """In-plane coefficient ``a[k, m]`` along the face-``k`` inward normal and
    the out-of-plane part ``w[k, m]`` of each displacement."""

    grid: np.ndarray
    a: np.ndarray
    w: np.ndarray
    offline_residual: float
    s: float

    def zero_crossings(self) -> list[list[float]]:
        """Per face, linearly interpolated times where ``a`` changes sign."""
        out = []
        for ak in self.a:
            times = []
            for m in range(len(ak) - 1):
                a0, a1 = ak[m], ak[m + 1]
                if a0 == 0.0:
                    times.append(float(self.grid[m]))
                elif a0 * a1 < 0:
                    lam = a0 / (a0 - a1)
                    times.append(float(self.grid[m] + lam * (self.grid[m + 1] - self.grid[m])))
            if ak[-1] == 0.0:
                times.append(float(self.grid[-1]))
            out.append(times)
        return out


def vertex_alignment(sample: MotionSample, spec: FlapSpec) -> tuple[MotionSample, float]:
    """Rigidly move each frame so its simplex vertices sit on ``iota(u_k)``.

    Frames whose vertices are already in place are left untouched; others
    get the orthogonal Procrustes fit of the vertices. Returns the aligned
    sample and the largest vertex misfit after alignment.
    """
    d, f = spec.d, sample.ambient_dim
    target = include_points(spec.simplex.vertices, f)
    frames = np.array(sample.frames)
    worst = 0.0
    for m in range(frames.shape[0]):
        X = frames[m, : d + 1]
        if np.abs(X - target).max() == 0.0:
            continue
        cx, cy = X.mean(axis=0), target.mean(axis=0)
        A, _, Bt = np.linalg.svd((X - cx).T @ (target - cy))
        R = A @ Bt
        frames[m] = (frames[m] - cx) @ R + cy
        worst = max(worst, float(np.abs(frames[m, : d + 1] - target).max()))
    return MotionSample(sample.labels, sample.grid, frames), worst


def _check_flapped_sample(sample: MotionSample, spec: FlapSpec) -> None:
    if sample.labels != canonical_labels(spec.d):
        raise ConfigurationError("sample labels are not the canonical flapped labels")
    if sample.ambient_dim < spec.d:
        raise DimensionError(f"sample in E^{sample.ambient_dim} cannot hold a {spec.d}-simplex")


def displacement_field(sample: MotionSample, spec: FlapSpec, tol: float = 1e-9) -> DisplacementField:
    """Per-face displacement ``g^k_j(t) - iota(u_j)`` of a flapped-pair motion.

    Every ``j != k`` must give the same vector; the result must have length
    ``s`` and be orthogonal to the face. Violations raise
    :class:`RigidityViolation` naming the failed check.
    """
    _check_flapped_sample(sample, spec)
    d, s, f = spec.d, spec.s, sample.ambient_dim
    sample, align = vertex_alignment(sample, spec)
    if align > tol:
        raise RigidityViolation("simplex vertices do not move rigidly", "vertex-alignment", align)
    U = include_points(spec.simplex.vertices, f)
    offset = d + 1
    M1 = sample.grid.size
    dk = np.empty((d + 1, M1, f))
    residual = 0.0
    for k in range(d + 1):
        js = [j for j in range(d + 1) if j != k]
        per_j = np.stack([
            sample.frames[:, offset + k * d + n] - U[j] for n, j in enumerate(js)
        ])
        dk[k] = per_j[0]
        spread = np.linalg.norm(per_j - per_j[0], axis=2).max()
        residual = max(residual, float(spread))
    if residual > tol:
        raise RigidityViolation("flap points of one face moved apart", "consistency", residual)
    norm_err = float(np.abs(np.linalg.norm(dk, axis=2) - s).max())
    if norm_err > tol:
        raise RigidityViolation("displacement length differs from the flap depth", "norm", norm_err)
    orth = 0.0
    for k in range(d + 1):
        edges = np.array([U[j] - U[i] for i in range(d + 1) for j in range(d + 1)
                          if len({i, j, k}) == 3])
        if edges.size:
            orth = max(orth, float(np.abs(dk[k] @ edges.T).max()))
    if orth > tol:
        raise RigidityViolation("displacement not orthogonal to its face", "face-orthogonality", orth)
    return DisplacementField(spec, sample.grid, dk, residual, align)


def split_displacement(field: DisplacementField, d: int | None = None, tol: float = 1e-9) -> SplitField:
    """Split each displacement into first-``d`` and remaining coordinates.

    The first part must lie on the line of the face's inward unit normal
    (``u_k`` for the regular simplex); its signed length is ``a``.
    """
    spec = field.spec
    d = spec.d if d is None else int(d)
    if d != spec.d:
        raise DimensionError(f"split dimension {d} differs from simplex dimension {spec.d}")
    if field.ambient_dim < d:
        raise DimensionError(f"field in E^{field.ambient_dim} cannot split at {d}")
    directions = -spec.simplex.normals
    v = field.dk[:, :, :d]
    w = field.dk[:, :, d:].copy()
    a = np.einsum("kmi,ki->km", v, directions)
    off = v - a[:, :, None] * directions[:, None, :]
    residual = float(np.linalg.norm(off, axis=2).max())
    if residual > tol:
        raise OrthogonalityViolation("in-plane displacement leaves the face normal line", residual)
    return SplitField(field.grid, a, w, residual, spec.s)
