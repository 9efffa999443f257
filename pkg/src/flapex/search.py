"""Numerical search for continuous expansions in a prescribed dimension.

Candidate motions are piecewise linear through ``W`` free interior
waypoints. Pairwise distance decreases on a grid ``refine`` times finer
than the knots are penalized quadratically, and the penalty is minimized
by central-difference gradient descent with backtracking and seeded
restarts. A small residual is evidence that a motion exists; a residual
that stays large is evidence against, never a proof.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, InputError
from .flaps import Configuration, check_matching
from .linalg import include_points
from .motion import AlexanderMotion, Motion, MotionSample, pair_distances

log = logging.getLogger(__name__)

DEFAULT_REFINE = 4
FD_STEP = 1e-6
ARMIJO = 1e-4


class WaypointMotion(Motion):
    """Piecewise-linear motion over uniform knots ``0, 1/K, ..., 1``, K = W + 1."""

    kind = "waypoint"

    def __init__(self, labels, start, end, waypoints):
        start = np.asarray(start, dtype=float)
        end = np.asarray(end, dtype=float)
        waypoints = np.asarray(waypoints, dtype=float)
        N, f = start.shape
        if end.shape != (N, f) or waypoints.ndim != 3 or waypoints.shape[::2] != (N, f):
            raise DimensionError("start, end and waypoints must share point count and dimension")
        super().__init__(labels, f)
        self.knots = np.concatenate([start[:, None], waypoints, end[:, None]], axis=1)
        self.knots.setflags(write=False)

    @property
    def n_waypoints(self) -> int:
        return self.knots.shape[1] - 2

    @property
    def waypoints(self) -> np.ndarray:
        return self.knots[:, 1:-1]

    def positions(self, t: float) -> np.ndarray:
        t = float(t)
        if not 0.0 <= t <= 1.0:
            raise InputError(f"time {t} outside [0, 1]")
        K = self.knots.shape[1] - 1
        x = t * K
        if abs(x - round(x)) < 1e-12:
            return self.knots[:, int(round(x))].copy()
        m = min(int(np.floor(x)), K - 1)
        lam = x - m
        return (1.0 - lam) * self.knots[:, m] + lam * self.knots[:, m + 1]

    def to_dict(self) -> dict:
        return {
            "ambientDim": self.ambient_dim,
            "labels": [str(x) for x in self.labels],
            "knots": self.knots.tolist(),
        }


def violation_residual(sample: MotionSample) -> float:
    """Sum over pairs and adjacent grid intervals of ``min(0, increment)^2``."""
    if sample.n_points < 2:
        return 0.0
    inc = np.diff(pair_distances(sample), axis=0)
    return float(np.sum(np.minimum(inc, 0.0) ** 2))


def _frames(knots: np.ndarray, refine: int) -> np.ndarray:
    """Points on the refined grid, shape (N, K * refine + 1, f)."""
    lam = np.arange(refine) / refine
    A, B = knots[:, :-1], knots[:, 1:]
    inner = A[:, :, None] * (1.0 - lam)[:, None] + B[:, :, None] * lam[:, None]
    N, K, _, f = inner.shape
    return np.concatenate([inner.reshape(N, K * refine, f), knots[:, -1:]], axis=1)


def _residual(knots: np.ndarray, refine: int, pairs) -> float:
    fr = _frames(knots, refine)
    a, b = pairs
    diff = fr[a] - fr[b]
    dist = np.sqrt(np.einsum("ptk,ptk->pt", diff, diff))
    inc = np.diff(dist, axis=1)
    return float(np.sum(np.minimum(inc, 0.0) ** 2))


def _gradient(knots: np.ndarray, refine: int, h: float = FD_STEP) -> np.ndarray:
    """Central differences of the residual for every interior waypoint coordinate.

    Moving one waypoint of point ``i`` only changes pairs that contain ``i``
    on the ``2 * refine`` intervals around its knot, so each difference is
    evaluated on that window alone.
    """
    N, K1, f = knots.shape
    W, r = K1 - 2, refine
    fr = _frames(knots, r)
    idx = np.arange(W)[:, None] * r + np.arange(2 * r + 1)[None, :]
    win = fr[:, idx]                                        # (N, W, 2r+1, f)
    tent = 1.0 - np.abs(np.arange(2 * r + 1) - r) / r
    base = win[:, :, None] - win.transpose(1, 0, 2, 3)[None]  # (N, W, N, 2r+1, f)
    sq = np.einsum("...k,...k->...", base, base)
    # |base + sign h tent e_c|^2 expanded per coordinate c and sign
    shift = h * tent[:, None] * base                        # (N, W, N, 2r+1, f)
    ht2 = (h * tent) ** 2
    plus = np.sqrt(np.maximum(sq[..., None] + 2.0 * shift + ht2[:, None], 0.0))
    minus = np.sqrt(np.maximum(sq[..., None] - 2.0 * shift + ht2[:, None], 0.0))
    mask = ~np.eye(N, dtype=bool)[:, None, :, None, None]   # drop the (i, i) "pair"

    def penalty(dist):
        drop = np.minimum(np.diff(dist, axis=3), 0.0) ** 2  # (N, W, N, 2r, f)
        return np.where(mask, drop, 0.0).sum(axis=(2, 3))   # (N, W, f)

    return (penalty(plus) - penalty(minus)) / (2.0 * h)


@dataclass(frozen=True)
class RestartOutcome:
    restart: int
    seed: int
    best_residual: float
    iterations: int


@dataclass(frozen=True, eq=False)
class SearchResult:
    best_residual: float
    iterations: int
    seed: int
    motion: WaypointMotion
    history: tuple[tuple[int, float], ...]
    restarts: tuple[RestartOutcome, ...]
    refine: int

    def to_dict(self, include_motion: bool = True) -> dict:
        out = {
            "label": "evidence",
            "bestResidual": self.best_residual,
            "iterations": self.iterations,
            "seed": self.seed,
            "refine": self.refine,
            "ambientDim": self.motion.ambient_dim,
            "waypoints": self.motion.n_waypoints,
            "restarts": [
                {"restart": r.restart, "seed": r.seed, "bestResidual": r.best_residual,
                 "iterations": r.iterations}
                for r in self.restarts
            ],
            "history": [[i, v] for i, v in self.history],
        }
        if include_motion:
            out["motion"] = self.motion.to_dict()
        return out


def subconfiguration(p: Configuration, q: Configuration, indices) -> tuple[Configuration, Configuration]:
    """Restrict both configurations to the points at ``indices``."""
    check_matching(p, q)
    idx = list(indices)
    labels = tuple(p.labels[i] for i in idx)
    return Configuration(labels, p.coords[idx]), Configuration(labels, q.coords[idx])


def _descend(knots: np.ndarray, refine: int, budget: int, target: float, pairs):
    knots = knots.copy()
    res = _residual(knots, refine, pairs)
    history = [(0, res)]
    alpha = 1.0
    it = 0
    while it < budget and res > target:
        g = _gradient(knots, refine)
        gg = float(np.sum(g * g))
        if gg == 0.0:
            break
        alpha *= 2.0
        while True:
            trial = knots.copy()
            trial[:, 1:-1] -= alpha * g
            new = _residual(trial, refine, pairs)
            if new <= res - ARMIJO * alpha * gg:
                break
            alpha *= 0.5
            if alpha < 1e-30:
                break
        if alpha < 1e-30:
            break
        knots, res = trial, new
        it += 1
        history.append((it, res))
    return knots, res, it, history


def optimize_expansion_path(
    p: Configuration,
    q: Configuration,
    f: int,
    waypoints: int = 8,
    budget: int = 2000,
    seed: int = 0,
    restarts: int = 1,
    refine: int = DEFAULT_REFINE,
    init: str = "straight",
    perturbation: float | None = None,
    target: float = 1e-16,
) -> SearchResult:
    """Search for a motion from ``iota(p)`` to ``iota(q)`` in E^f with no
    pairwise distance decrease.

    ``init="straight"`` starts each restart from the straight-line motion
    plus Gaussian noise of scale ``perturbation`` (default: a tenth of half
    the largest point displacement, i.e. ``s / 10`` for a flapped pair).
    ``init="alexander"`` starts, unperturbed, from the half-turn motion's
    positions at the knots and needs ``f >= 2d``. Restart ``r`` draws from
    a generator seeded with ``seed + r``; the best restart wins, ties going
    to the lower index.
    """
    check_matching(p, q, same_dim=True)
    if int(budget) != budget or budget <= 0:
        raise InputError(f"budget must be a positive integer, got {budget!r}")
    if waypoints < 1 or restarts < 1 or refine < 1:
        raise InputError("waypoints, restarts and refine must be positive")
    d = p.dim
    if f < d:
        raise DimensionError(f"ambient dimension {f} below configuration dimension {d}")
    start, end = include_points(p.coords, f), include_points(q.coords, f)
    K = waypoints + 1
    times = np.arange(1, K) / K
    if init == "straight":
        base = start[:, None] + times[None, :, None] * (end - start)[:, None]
        if perturbation is None:
            perturbation = float(np.linalg.norm(p.coords - q.coords, axis=1).max()) / 20.0
    elif init == "alexander":
        if f < 2 * d:
            raise DimensionError(f"half-turn initialization needs f >= {2 * d}")
        alex = AlexanderMotion(p, q)
        base = np.stack([include_points(alex.positions(t), f) for t in times], axis=1)
        perturbation = 0.0
    else:
        raise InputError(f"unknown init {init!r}")

    pairs = np.triu_indices(len(p), k=1)
    best = None
    outcomes = []
    for r in range(restarts):
        rng = np.random.default_rng(seed + r)
        wp = base + (rng.normal(scale=perturbation, size=base.shape) if perturbation else 0.0)
        knots = np.concatenate([start[:, None], wp, end[:, None]], axis=1)
        knots, res, its, hist = _descend(knots, refine, int(budget), target, pairs)
        outcomes.append(RestartOutcome(r, seed + r, res, its))
        log.debug("restart %d: residual %.3e after %d iterations", r, res, its)
        if best is None or res < best[1]:
            best = (knots, res, its, hist)
    knots, res, its, hist = best
    motion = WaypointMotion(p.labels, start, end, knots[:, 1:-1])
    return SearchResult(res, its, seed, motion, tuple(hist), tuple(outcomes), refine)
