"""Pairwise expansion check with label-driven case classification."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConsistencyError, LabelError
from .flaps import FLAP, INWARD, OUTWARD, VERTEX, Configuration, FlapSpec, PointLabel, check_matching, flap_vertex
from .linalg import distance_matrix

EQUAL, EXPAND, CONTRACT = "equal", "expand", "contract"

VERTEX_VERTEX = "vertex-vertex"
VERTEX_SAME_FLAP_FACE = "vertex-sameFlapFace"
VERTEX_OWN_FACE_FLAP = "vertex-ownFaceFlap"
FLAP_ZERO = "flap-zeroCase"
FLAP_NEGATIVE = "flap-negativeCase"
OTHER = "other"

# the class each tag must produce on a flapped pair
PREDICTED_CLASS = {
    VERTEX_VERTEX: EQUAL,
    VERTEX_SAME_FLAP_FACE: EQUAL,
    VERTEX_OWN_FACE_FLAP: EXPAND,
    FLAP_ZERO: EQUAL,
    FLAP_NEGATIVE: EXPAND,
}


@dataclass(frozen=True)
class PairClass:
    first: PointLabel
    second: PointLabel
    d_before: float
    d_after: float
    cls: str
    case_tag: str

    @property
    def gap(self) -> float:
        return self.d_after - self.d_before


@dataclass(frozen=True)
class ExpansionReport:
    is_expansion: bool
    pairs: tuple[PairClass, ...]
    min_gap: float
    tolerance: float

    def count(self, cls: str) -> int:
        return sum(1 for pc in self.pairs if pc.cls == cls)

    def tag_mismatches(self) -> list[PairClass]:
        """Pairs whose measured class differs from the class their tag predicts."""
        return [
            pc for pc in self.pairs
            if pc.case_tag in PREDICTED_CLASS and PREDICTED_CLASS[pc.case_tag] != pc.cls
        ]

    def summary(self) -> dict:
        return {
            "isExpansion": self.is_expansion,
            "pairs": len(self.pairs),
            "equal": self.count(EQUAL),
            "expand": self.count(EXPAND),
            "contract": self.count(CONTRACT),
            "minGap": self.min_gap,
            "tolerance": self.tolerance,
        }


def case_tag(a: PointLabel, b: PointLabel) -> str:
    if a.kind == VERTEX and b.kind == VERTEX:
        return VERTEX_VERTEX
    if a.kind == FLAP and b.kind == FLAP:
        i, j, k, l = a.i, a.j, b.i, b.j
        if i == l or j == k:
            return FLAP_NEGATIVE
        return FLAP_ZERO
    vert, flap = (a, b) if a.kind == VERTEX else (b, a)
    return VERTEX_OWN_FACE_FLAP if vert.i == flap.i else VERTEX_SAME_FLAP_FACE


def classify(gap: float, tol: float) -> str:
    if gap > tol:
        return EXPAND
    if gap < -tol:
        return CONTRACT
    return EQUAL


def expansion_report(p: Configuration, q: Configuration, tol: float = 1e-9) -> ExpansionReport:
    """Compare every pairwise distance of ``p`` with the same pair in ``q``.

    The ambient dimensions may differ; only labels and distances are used.
    """
    check_matching(p, q)
    Dp = distance_matrix(p.coords)
    Dq = distance_matrix(q.coords)
    tagged = p.flapped and q.flapped
    pairs = []
    n = len(p)
    for a in range(n):
        for b in range(a + 1, n):
            la, lb = p.labels[a], p.labels[b]
            before, after = float(Dp[a, b]), float(Dq[a, b])
            pairs.append(PairClass(
                la, lb, before, after,
                classify(after - before, tol),
                case_tag(la, lb) if tagged else OTHER,
            ))
    gaps = [pc.gap for pc in pairs]
    min_gap = min(gaps) if gaps else 0.0
    return ExpansionReport(all(g >= -tol for g in gaps), tuple(pairs), min_gap, tol)


def flap_pair_gap(spec: FlapSpec, i: int, j: int, k: int, l: int, tol: float = 1e-10) -> float:
    """Squared-distance change ``|b^i_j - b^k_l|^2 - |c^i_j - c^k_l|^2``.

    Evaluated from coordinates and from the closed form
    ``4 s (u_j - u_l) . (n_k - n_i)``; the two must agree within ``tol``.
    """
    if i == j or k == l:
        raise LabelError("flap indices need i != j and k != l")
    bij = flap_vertex(spec, i, j, INWARD)
    bkl = flap_vertex(spec, k, l, INWARD)
    cij = flap_vertex(spec, i, j, OUTWARD)
    ckl = flap_vertex(spec, k, l, OUTWARD)
    direct = float(np.sum((bij - bkl) ** 2) - np.sum((cij - ckl) ** 2))
    u = spec.simplex.vertices
    n = spec.simplex.normals
    closed = float(4.0 * spec.s * (u[j] - u[l]) @ (n[k] - n[i]))
    if abs(direct - closed) > tol:
        raise ConsistencyError(
            f"flap gap ({i},{j};{k},{l}): coordinates give {direct!r}, closed form {closed!r}"
        )
    return direct
