"""Labeled configurations and the inward/outward flapped simplex pair."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, DimensionError, InputError, LabelError
from .linalg import as_points
from .simplex import Simplex, normals_pairwise_obtuse

VERTEX = "vertex"
FLAP = "flap"
INWARD = "inward"
OUTWARD = "outward"


@dataclass(frozen=True)
class PointLabel:
    """``vertex`` labels carry the vertex index ``i``; ``flap`` labels carry
    the face index ``i`` and the face-vertex index ``j != i``."""

    kind: str
    i: int
    j: int | None = None

    def __post_init__(self):
        if self.kind == VERTEX:
            if self.j is not None:
                raise LabelError("vertex labels take no second index")
        elif self.kind == FLAP:
            if self.j is None or self.j == self.i:
                raise LabelError(f"flap label needs j != i, got i={self.i}, j={self.j}")
        else:
            raise LabelError(f"unknown label kind {self.kind!r}")
        if self.i < 0 or (self.j is not None and self.j < 0):
            raise LabelError("label indices must be nonnegative")

    @property
    def sort_key(self) -> tuple:
        return (0 if self.kind == VERTEX else 1, self.i, -1 if self.j is None else self.j)

    def __str__(self) -> str:
        return f"u{self.i}" if self.kind == VERTEX else f"f{self.i}_{self.j}"

    @classmethod
    def parse(cls, text: str) -> "PointLabel":
        if text.startswith("u"):
            return cls(VERTEX, int(text[1:]))
        if text.startswith("f") and "_" in text:
            i, j = text[1:].split("_")
            return cls(FLAP, int(i), int(j))
        raise LabelError(f"cannot parse label {text!r}")

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "i": self.i}
        if self.j is not None:
            out["j"] = self.j
        return out

    @classmethod
    def from_dict(cls, obj: dict) -> "PointLabel":
        return cls(obj["kind"], int(obj["i"]), None if obj.get("j") is None else int(obj["j"]))


def canonical_labels(d: int) -> tuple[PointLabel, ...]:
    """Vertices by ascending index, then flap labels ordered by (i, j)."""
    verts = [PointLabel(VERTEX, i) for i in range(d + 1)]
    flaps = [PointLabel(FLAP, i, j) for i in range(d + 1) for j in range(d + 1) if j != i]
    return tuple(verts + flaps)


@dataclass(frozen=True, eq=False)
class Configuration:
    """Ordered labeled point list; ``coords[n]`` is the point labeled ``labels[n]``.

    ``flapped`` marks configurations produced by :func:`build_flapped_pair`,
    whose labels follow the canonical order.
    """

    labels: tuple[PointLabel, ...]
    coords: np.ndarray
    flapped: bool = False
    _index: dict = field(init=False, repr=False)

    def __post_init__(self):
        labels = tuple(self.labels)
        coords = as_points(self.coords).copy()
        if len(labels) != coords.shape[0]:
            raise ConfigurationError(f"{len(labels)} labels for {coords.shape[0]} points")
        if len(set(labels)) != len(labels):
            raise ConfigurationError("labels must be pairwise distinct")
        if self.flapped:
            d = coords.shape[1]
            n = round(len(labels) ** 0.5) - 1
            if labels != canonical_labels(n) or n > d:
                raise ConfigurationError("flapped configurations need the canonical label order")
        coords.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "_index", {lab: k for k, lab in enumerate(labels)})

    @property
    def dim(self) -> int:
        return self.coords.shape[1]

    @property
    def simplex_dim(self) -> int:
        """``d`` for a flapped configuration of (d + 1)^2 points."""
        return round(len(self.labels) ** 0.5) - 1

    def __len__(self) -> int:
        return len(self.labels)

    def index(self, label: PointLabel) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise LabelError(f"label {label} not in configuration") from None

    def point(self, label: PointLabel) -> np.ndarray:
        return self.coords[self.index(label)].copy()

    def same_points(self, other: "Configuration") -> bool:
        return (
            self.labels == other.labels
            and self.coords.shape == other.coords.shape
            and bool(np.array_equal(self.coords, other.coords))
        )


@dataclass(frozen=True, eq=False)
class FlapSpec:
    simplex: Simplex
    s: float

    def __post_init__(self):
        s = float(self.s)
        if not np.isfinite(s) or s <= 0:
            raise InputError(f"flap depth must be a positive real, got {self.s!r}")
        object.__setattr__(self, "s", s)

    @property
    def d(self) -> int:
        return self.simplex.dim


def flap_vertex(spec: FlapSpec, i: int, j: int, direction: str) -> np.ndarray:
    """Vertex ``u_j`` of face ``i`` pushed by ``s`` along (outward) or
    against (inward) the face's outward normal."""
    d = spec.d
    if i == j:
        raise LabelError("flap vertex needs i != j")
    if not (0 <= i <= d and 0 <= j <= d):
        raise LabelError(f"indices ({i}, {j}) outside 0..{d}")
    u = spec.simplex.vertices
    n = spec.simplex.normals
    if direction == OUTWARD:
        return u[j] + spec.s * n[i]
    if direction == INWARD:
        return u[j] - spec.s * n[i]
    raise InputError(f"direction must be {INWARD!r} or {OUTWARD!r}, got {direction!r}")


@dataclass(frozen=True, eq=False)
class FlappedPair:
    """Inward configuration ``p``, outward configuration ``q`` and their source."""

    p: Configuration
    q: Configuration
    spec: FlapSpec
    normals_pairwise_obtuse: bool

    def __iter__(self):
        return iter((self.p, self.q))


def build_flapped_pair(spec: FlapSpec) -> FlappedPair:
    d = spec.d
    labels = canonical_labels(d)
    u = spec.simplex.vertices
    p_rows, q_rows = [], []
    for lab in labels:
        if lab.kind == VERTEX:
            p_rows.append(u[lab.i])
            q_rows.append(u[lab.i])
        else:
            p_rows.append(flap_vertex(spec, lab.i, lab.j, INWARD))
            q_rows.append(flap_vertex(spec, lab.i, lab.j, OUTWARD))
    obtuse, _, _ = normals_pairwise_obtuse(spec.simplex)
    return FlappedPair(
        Configuration(labels, np.array(p_rows), flapped=True),
        Configuration(labels, np.array(q_rows), flapped=True),
        spec,
        obtuse,
    )


def check_matching(p: Configuration, q: Configuration, same_dim: bool = False) -> None:
    if p.labels != q.labels:
        raise ConfigurationError("configurations carry different label sequences")
    if same_dim and p.dim != q.dim:
        raise DimensionError(f"configurations live in E^{p.dim} and E^{q.dim}")
