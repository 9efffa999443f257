"""Executable form of the dimension obstruction for flapped pairs.

A sampled motion that claims to expand ``p`` into ``q`` inside E^f with
f < 2d is pushed through the chain of consequences a genuine continuous
expansion would have to satisfy. The first consequence that fails becomes
an :class:`ObstructionCertificate`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import (
    ConfigurationError,
    ConsistencyError,
    DimensionError,
    InputError,
    OrthogonalityViolation,
    PreconditionError,
    RigidityViolation,
)
from .flaps import FlapSpec
from .linalg import as_points, distance_matrix
from .motion import (
    MotionSample,
    _check_flapped_sample,
    displacement_field,
    monotonicity_report,
    split_displacement,
)

RIGIDITY = "rigidityViolation"
ORTHOGONALITY = "orthogonalityViolation"
OBTUSE = "obtuseContradiction"
MONOTONICITY = "monotonicityViolation"

DIMENSION_SUFFICIENT = "dimension-sufficient"
INCONCLUSIVE_GRID = "inconclusive-grid"


# --- parallelograms -----------------------------------------------------


def _four_points(pts) -> np.ndarray:
    arr = as_points(pts)
    if arr.shape[0] != 4:
        raise InputError(f"expected 4 points, got {arr.shape[0]}")
    return arr


def is_parallelogram(pts, tol: float = 1e-9) -> bool:
    """Diagonals p0-p2 and p1-p3 share their midpoint."""
    P = _four_points(pts)
    return bool(np.linalg.norm(0.5 * (P[0] + P[2]) - 0.5 * (P[1] + P[3])) <= tol)


@dataclass(frozen=True)
class RigidityReport:
    distances_u: np.ndarray
    distances_v: np.ndarray
    max_distance_mismatch: float
    midpoint_gap_v: float


def parallelogram_rigidity(u, v, tol: float = 1e-9) -> tuple[bool, RigidityReport]:
    """Check that a quadrilateral with a parallelogram's six distances is a
    congruent parallelogram.

    Raises :class:`PreconditionError` with ``which="parallelogram"`` when
    ``u`` is not a parallelogram and ``which="distance"`` when the
    distances of ``u`` and ``v`` disagree.
    """
    U, V = _four_points(u), _four_points(v)
    if not is_parallelogram(U, tol):
        raise PreconditionError("reference quadrilateral is not a parallelogram", "parallelogram")
    Du, Dv = distance_matrix(U), distance_matrix(V)
    mismatch = float(np.abs(Du - Dv).max())
    if mismatch > tol:
        raise PreconditionError(f"pairwise distances differ by {mismatch:.3e}", "distance")
    gap = float(np.linalg.norm(0.5 * (V[0] + V[2]) - 0.5 * (V[1] + V[3])))
    # congruence of 4-point sets is equality of all six distances
    ok = gap <= tol and mismatch <= tol
    return ok, RigidityReport(Du, Dv, mismatch, gap)


# --- obtuse families ----------------------------------------------------


@dataclass(frozen=True)
class ObtuseWitness:
    pair: tuple[int, int]
    dot: float


def find_non_obtuse_pair(vectors, margin: float = 0.0) -> ObtuseWitness | None:
    """First pair (in lexicographic order) whose dot product is ``>= -margin``.

    Returns ``None`` when the family is pairwise obtuse. A pairwise obtuse
    family of at least ``n + 2`` vectors in E^n cannot exist, so that outcome
    raises :class:`ConsistencyError` instead.
    """
    V = np.asarray(vectors, dtype=float)
    if V.ndim != 2 or V.shape[0] == 0:
        raise InputError("need a nonempty list of vectors sharing one dimension")
    G = V @ V.T
    for i, j in combinations(range(V.shape[0]), 2):
        if G[i, j] >= -margin:
            return ObtuseWitness((i, j), float(G[i, j]))
    if V.shape[0] >= V.shape[1] + 2:
        raise ConsistencyError(
            f"{V.shape[0]} pairwise obtuse vectors in E^{V.shape[1]}: numerical breakdown"
        )
    return None


def obtuse_descent(vectors, pivot: int) -> tuple[np.ndarray, np.ndarray]:
    """Split every vector but ``vectors[pivot]`` along and across the pivot.

    Returns the signed components along the unit pivot direction and the
    orthogonal remainders expressed in a basis of the pivot's complement;
    ``x . y`` equals the product of components plus the remainder dot.
    """
    V = np.asarray(vectors, dtype=float)
    e = -V[pivot] / np.linalg.norm(V[pivot])
    rest = np.delete(V, pivot, axis=0)
    along = rest @ e
    # reflection exchanging e and the first basis vector
    n = V.shape[1]
    h = np.zeros(n)
    h[0] = 1.0
    w = h - e
    if np.linalg.norm(w) > 1e-15:
        H = np.eye(n) - 2.0 * np.outer(w, w) / (w @ w)
    else:
        H = np.eye(n)
    coords = rest @ H.T
    return along, coords[:, 1:]


# --- certificates -------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ObstructionCertificate:
    kind: str
    t0: float | None
    a_values: np.ndarray
    w_vectors: np.ndarray
    pairwise_dots: np.ndarray
    narrative: str
    details: dict = field(default_factory=dict)

    def verify(self) -> None:
        """Re-check the counting argument for an obtuse contradiction."""
        if self.kind != OBTUSE:
            return
        k, n = self.w_vectors.shape
        d = k - 1
        if n > d - 1 or k < n + 2:
            raise ConsistencyError(f"{k} vectors in E^{n} do not meet the counting bound")
        if self.pairwise_dots.shape != (k, k):
            raise ConsistencyError("dot matrix does not match the vector family")
        off = self.pairwise_dots[~np.eye(k, dtype=bool)]
        if not np.all(off < 0):
            raise ConsistencyError("required dot products are not all strictly negative")

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "t0": self.t0,
            "akValues": [float(x) for x in self.a_values],
            "wkVectors": [[float(x) for x in row] for row in self.w_vectors],
            "pairwiseDots": [[float(x) for x in row] for row in self.pairwise_dots],
            "narrative": self.narrative,
            "details": self.details,
        }


@dataclass(frozen=True, eq=False)
class NoObstruction:
    reason: str
    t0: float | None = None
    a_values: np.ndarray | None = None
    w_vectors: np.ndarray | None = None
    pairwise_dots: np.ndarray | None = None
    boundary_obtuse_family: bool = False
    narrative: str = ""

    kind = "noObstruction"

    def to_dict(self) -> dict:
        def rows(x):
            return None if x is None else np.asarray(x, dtype=float).tolist()

        return {
            "kind": self.kind,
            "reason": self.reason,
            "t0": self.t0,
            "akValues": rows(self.a_values),
            "wkVectors": rows(self.w_vectors),
            "pairwiseDots": rows(self.pairwise_dots),
            "boundaryObtuseFamily": self.boundary_obtuse_family,
            "narrative": self.narrative,
        }


def obtuse_contradiction(spec: FlapSpec, t0: float, a, w, measured_dots=None) -> ObstructionCertificate:
    """Build and self-check an obtuse-contradiction certificate.

    The dot products the rigid triangles force on the out-of-plane parts are
    ``s^2 n_k.n_j - a_k a_j n_k.n_j``; they are strictly negative whenever
    every ``|a_k| < s`` and the normals are pairwise obtuse.
    """
    a = np.asarray(a, dtype=float)
    w = np.asarray(w, dtype=float)
    if w.ndim != 2:
        raise DimensionError("out-of-plane vectors must form a 2-D array")
    N = spec.simplex.normals
    NN = N @ N.T
    required = (spec.s**2 - np.outer(a, a)) * NN
    np.fill_diagonal(required, (w * w).sum(axis=1))
    d, n = spec.d, w.shape[1]
    details = {"ambientDim": d + n, "outOfPlaneDim": n}
    if measured_dots is not None:
        details["measuredDots"] = np.asarray(measured_dots, dtype=float).tolist()
        witness = find_non_obtuse_pair(w)
        if witness is not None:
            details["lemmaWitness"] = {"pair": list(witness.pair), "dot": witness.dot}
    cert = ObstructionCertificate(
        OBTUSE, float(t0), a, w, required,
        f"At t0={t0:.6g} every |a_k| < s, so the {d + 1} out-of-plane displacement parts "
        f"must be pairwise obtuse; at most {n + 1} such vectors fit in E^{n}.",
        details,
    )
    cert.verify()
    return cert


def _violation(kind, narrative, **details) -> ObstructionCertificate:
    empty = np.zeros((0,))
    return ObstructionCertificate(kind, details.pop("t0", None), empty, np.zeros((0, 0)),
                                  np.zeros((0, 0)), narrative, details)


def obstruction_pipeline(sample: MotionSample, spec: FlapSpec, tol: float = 1e-9):
    """Run the proof steps on a sampled motion of the flapped pair.

    Returns an :class:`ObstructionCertificate` for the first failing step, or
    :class:`NoObstruction` when the ambient dimension is at least ``2d`` or
    no grid time has every ``|a_k|`` below ``s - tol``.
    """
    try:
        _check_flapped_sample(sample, spec)
    except (ConfigurationError, DimensionError) as exc:
        raise InputError(f"malformed sample: {exc}") from exc
    d, s, f = spec.d, spec.s, sample.ambient_dim
    if f >= 2 * d:
        return _sufficient(sample, spec, tol)

    mono = monotonicity_report(sample, tol)
    if not mono.ok:
        a, b = mono.worst_pair
        return _violation(
            MONOTONICITY,
            f"Distance between {a} and {b} drops by {-mono.min_increment:.3e} on "
            f"[{mono.worst_interval[0]:.6g}, {mono.worst_interval[1]:.6g}].",
            pair=[str(a), str(b)], interval=list(mono.worst_interval),
            minIncrement=mono.min_increment,
        )
    try:
        fld = displacement_field(sample, spec, tol)
    except RigidityViolation as exc:
        return _violation(
            RIGIDITY,
            f"Flap rectangles over face edges must move as congruent rectangles, "
            f"but the {exc.check} check fails by {exc.residual:.3e}.",
            check=exc.check, residual=exc.residual,
        )
    try:
        split = split_displacement(fld, d, tol)
    except OrthogonalityViolation as exc:
        return _violation(
            ORTHOGONALITY,
            f"The in-plane part of a face displacement leaves the normal line by {exc.residual:.3e}.",
            residual=exc.residual,
        )

    # rigid triangles (u_i, flap_i^j, flap_i^k) fix d_j . d_k at every time
    dots = np.einsum("kmi,jmi->mkj", fld.dk, fld.dk)
    drift = np.abs(dots - dots[0]).max(axis=(1, 2))
    m_bad = int(np.argmax(drift))
    if drift[m_bad] > tol:
        return _violation(
            MONOTONICITY,
            f"Flap points over a common vertex changed their mutual distance by "
            f"{drift[m_bad]:.3e} at t={fld.grid[m_bad]:.6g}; equal end distances force "
            f"it to stay constant under a continuous expansion.",
            t0=float(fld.grid[m_bad]), dotDrift=float(drift[m_bad]),
        )

    peak = np.abs(split.a).max(axis=0)
    m0 = int(np.argmin(peak))
    t0 = float(split.grid[m0])
    if peak[m0] >= s - tol:
        return NoObstruction(
            INCONCLUSIVE_GRID, t0, split.a[:, m0], split.w[:, m0], None, False,
            f"No grid time has every |a_k| below s - tol (best max |a_k| = {peak[m0]:.6g}); "
            f"refine the grid.",
        )
    w0 = split.w[:, m0]
    measured = w0 @ w0.T
    return obtuse_contradiction(spec, t0, split.a[:, m0], w0, measured)


def _sufficient(sample: MotionSample, spec: FlapSpec, tol: float) -> NoObstruction:
    narrative = f"Ambient dimension {sample.ambient_dim} >= 2d = {2 * spec.d}; no obstruction applies."
    try:
        split = split_displacement(displacement_field(sample, spec, tol), spec.d, tol)
    except (RigidityViolation, OrthogonalityViolation):
        return NoObstruction(DIMENSION_SUFFICIENT, narrative=narrative)
    peak = np.abs(split.a).max(axis=0)
    m0 = int(np.argmin(peak))
    w0 = split.w[:, m0]
    dots = w0 @ w0.T
    k = w0.shape[0]
    obtuse = bool(np.all(dots[~np.eye(k, dtype=bool)] < -tol))
    if obtuse:
        narrative += (f" At t={split.grid[m0]:.6g} the {k} out-of-plane parts are pairwise obtuse"
                      f" in E^{w0.shape[1]}, the extremal family the lemma allows.")
    return NoObstruction(DIMENSION_SUFFICIENT, float(split.grid[m0]), split.a[:, m0], w0,
                         dots, obtuse, narrative)
