"""Regular and general simplices with outward face normals."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, GeometryError, InputError
from .linalg import as_points, sym_eigen

DEGENERACY_RATIO = 1e-10


@dataclass(frozen=True, eq=False)
class Simplex:
    """``d + 1`` affinely independent vertices in E^d, one per row."""

    vertices: np.ndarray
    kind: str = "general"
    _normals: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        verts = as_points(self.vertices).copy()
        n, d = verts.shape
        if n != d + 1:
            raise GeometryError(f"a {d}-simplex needs {d + 1} vertices, got {n}")
        if self.kind not in ("regular", "general"):
            raise InputError(f"unknown simplex kind {self.kind!r}")
        _check_nondegenerate(verts)
        verts.setflags(write=False)
        object.__setattr__(self, "vertices", verts)
        normals = np.array([_generic_normal(verts, i) for i in range(n)])
        if self.kind == "regular":
            normals = -verts
        normals.setflags(write=False)
        object.__setattr__(self, "_normals", normals)

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    @property
    def normals(self) -> np.ndarray:
        return self._normals

    def face(self, i: int) -> np.ndarray:
        """Vertices of the face opposite vertex ``i``."""
        return np.delete(self.vertices, i, axis=0)


def _check_nondegenerate(verts: np.ndarray) -> None:
    edges = verts[1:] - verts[0]
    w, _ = sym_eigen(edges @ edges.T)
    if w[-1] < DEGENERACY_RATIO * max(w[0], 0.0) or w[0] <= 0:
        raise GeometryError("simplex vertices are affinely dependent")


def _orthonormalize(rows: np.ndarray) -> np.ndarray:
    """Modified Gram-Schmidt on the rows of ``rows`` (assumed independent)."""
    basis = []
    for r in rows:
        v = np.array(r, dtype=float)
        for b in basis:
            v -= (v @ b) * b
        basis.append(v / np.linalg.norm(v))
    return np.array(basis).reshape(len(basis), rows.shape[1])


def regular_simplex(d: int) -> Simplex:
    """Regular ``d``-simplex, centred at the origin with unit circumradius.

    The standard basis of E^{d+1} is centred and written in a fixed
    orthonormal basis of the hyperplane ``sum(x) = 0``, obtained by
    orthonormalizing e_k - e_{k+1}.
    """
    if int(d) != d or d < 1:
        raise DomainError(f"simplex dimension must be a positive integer, got {d!r}")
    d = int(d)
    E = np.eye(d + 1)
    centred = E - 1.0 / (d + 1)
    spanning = E[:-1] - E[1:]
    Q = _orthonormalize(spanning)
    coords = centred @ Q.T
    coords /= np.linalg.norm(coords, axis=1, keepdims=True)
    return Simplex(coords, kind="regular")


def general_simplex(vertices) -> Simplex:
    return Simplex(np.asarray(vertices, dtype=float), kind="general")


def _generic_normal(verts: np.ndarray, i: int) -> np.ndarray:
    face = np.delete(verts, i, axis=0)
    offset = verts[i] - face[0]
    if face.shape[0] > 1:
        basis = _orthonormalize(face[1:] - face[0])
        offset = offset - basis.T @ (basis @ offset)
    norm = np.linalg.norm(offset)
    if norm == 0:
        raise GeometryError(f"vertex {i} lies in the hyperplane of its opposite face")
    return -offset / norm


def outward_normal(S: Simplex, i: int) -> np.ndarray:
    """Unit normal of the face opposite ``u_i``, pointing away from ``u_i``."""
    if not 0 <= i <= S.dim:
        raise InputError(f"face index {i} outside 0..{S.dim}")
    return S.normals[i].copy()


def generic_outward_normal(S: Simplex, i: int) -> np.ndarray:
    """Normal computed from the face geometry, ignoring the regular shortcut."""
    if not 0 <= i <= S.dim:
        raise InputError(f"face index {i} outside 0..{S.dim}")
    return _generic_normal(np.asarray(S.vertices), i)


def normals_pairwise_obtuse(S: Simplex) -> tuple[bool, tuple[int, int], float]:
    """Whether all outward normals meet at obtuse angles.

    Returns the flag, the pair with the largest dot product and that dot.
    """
    n = S.normals
    dots = n @ n.T
    worst, pair = -np.inf, (0, 0)
    for i in range(len(n)):
        for j in range(i + 1, len(n)):
            if dots[i, j] > worst:
                worst, pair = float(dots[i, j]), (i, j)
    return worst < 0, pair, worst
