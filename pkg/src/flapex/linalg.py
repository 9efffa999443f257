"""Dense Euclidean kernel: vectors, distance matrices, a cyclic Jacobi
eigensolver and the classical-MDS embedding dimension.

Vectors are 1-D float ``numpy`` arrays; point lists are 2-D arrays with one
point per row.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DimensionError, InputError

RANK_FLOOR = 1e-300


def as_vector(u) -> np.ndarray:
    v = np.asarray(u, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise DimensionError(f"expected a non-empty 1-D vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise InputError("vector coordinates must be finite")
    return v


def as_points(points) -> np.ndarray:
    """Stack a list of vectors into an (n, dim) array, rejecting mixed dims."""
    if isinstance(points, np.ndarray):
        arr = np.asarray(points, dtype=float)
    else:
        rows = [np.asarray(p, dtype=float) for p in points]
        if not rows:
            raise InputError("need at least one point")
        dims = {r.shape for r in rows}
        if len(dims) != 1:
            raise DimensionError(f"points have mixed dimensions {sorted(dims)}")
        arr = np.stack(rows)
    if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
        raise DimensionError(f"expected an (n, dim) point array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InputError("point coordinates must be finite")
    return arr


def split_vector(u, d: int) -> tuple[np.ndarray, np.ndarray]:
    """Return the projections onto the first ``d`` and the last ``dim - d`` coordinates."""
    u = as_vector(u)
    if not 0 < d < u.size:
        raise DimensionError(f"split index {d} outside (0, {u.size})")
    return u[:d].copy(), u[d:].copy()


def include_vector(u, f: int) -> np.ndarray:
    """Standard inclusion of ``u`` into dimension ``f`` (trailing zeros)."""
    u = as_vector(u)
    if f < u.size:
        raise DimensionError(f"cannot include a {u.size}-vector into dimension {f}")
    out = np.zeros(f)
    out[: u.size] = u
    return out


def include_points(points, f: int) -> np.ndarray:
    pts = as_points(points)
    if f < pts.shape[1]:
        raise DimensionError(f"cannot include {pts.shape[1]}-dim points into dimension {f}")
    out = np.zeros((pts.shape[0], f))
    out[:, : pts.shape[1]] = pts
    return out


def pairwise_distances(x: np.ndarray) -> np.ndarray:
    """Distances along the last two axes of ``x`` (..., n, dim) -> (..., n, n).

    Differences are formed coordinatewise before squaring, never via
    |a|^2 + |b|^2 - 2 a.b.
    """
    diff = x[..., :, None, :] - x[..., None, :, :]
    return np.sqrt(np.einsum("...k,...k->...", diff, diff))


def distance_matrix(points) -> np.ndarray:
    pts = as_points(points)
    D = pairwise_distances(pts)
    np.fill_diagonal(D, 0.0)
    return D


def centered_gram(D) -> np.ndarray:
    """Double-centred Gram matrix ``-1/2 J (D*D) J`` of a distance matrix."""
    D = np.asarray(D, dtype=float)
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise DimensionError(f"distance matrix must be square, got {D.shape}")
    if not np.allclose(D, D.T, rtol=0, atol=1e-12 * max(1.0, np.abs(D).max(initial=0))):
        raise InputError("distance matrix is not symmetric")
    if np.any(np.diag(D) != 0) or np.any(D < 0):
        raise InputError("distance matrix needs a zero diagonal and nonnegative entries")
    n = D.shape[0]
    J = np.eye(n) - np.full((n, n), 1.0 / n)
    G = -0.5 * J @ (D * D) @ J
    return 0.5 * (G + G.T)


def sym_eigen(M, tol: float = 1e-12, max_sweeps: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a real symmetric matrix by cyclic Jacobi rotations.

    Rotations annihilate the off-diagonal entries in fixed row-major order
    (p, q), p < q, sweep after sweep, until the off-diagonal mass is
    negligible relative to the matrix norm.

    Parameters
    ----------
    M : (n, n) array_like
        Symmetric input; it is symmetrized as ``(M + M.T) / 2``.
    tol : float
        Accuracy target. On return ``max|M - V diag(w) V^T| <= tol * (1 + max|M|)``.
    max_sweeps : int
        Iteration budget in full sweeps.

    Returns
    -------
    w : (n,) array
        Eigenvalues sorted in descending order.
    V : (n, n) array
        Orthonormal eigenvectors as columns, ``V[:, k]`` pairs with ``w[k]``.

    Raises
    ------
    ConvergenceError
        If the budget is exhausted before the target is met.
    """
    if tol <= 0:
        raise InputError("tol must be positive")
    A = np.array(M, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionError(f"expected a square matrix, got {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InputError("matrix entries must be finite")
    A = 0.5 * (A + A.T)
    n = A.shape[0]
    V = np.eye(n)
    scale = np.abs(A).max(initial=0.0)
    # stop sweeping once every off-diagonal entry is at rounding level
    target = min(tol, 1e-15) * max(scale, RANK_FLOOR)

    for _ in range(max_sweeps):
        off = _max_off_diagonal(A)
        if off <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= target * 1e-3:
                    continue
                # stable rotation angle (Rutishauser)
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                rp = A[p, :].copy()
                rq = A[q, :].copy()
                A[p, :] = c * rp - s * rq
                A[q, :] = s * rp + c * rq
                cp = A[:, p].copy()
                cq = A[:, q].copy()
                A[:, p] = c * cp - s * cq
                A[:, q] = s * cp + c * cq
                A[p, q] = A[q, p] = 0.0
                vp = V[:, p].copy()
                vq = V[:, q].copy()
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq

    w = np.diag(A).copy()
    order = np.argsort(-w, kind="stable")
    w, V = w[order], V[:, order]
    M_sym = 0.5 * (np.asarray(M, dtype=float) + np.asarray(M, dtype=float).T)
    residual = np.abs(M_sym - (V * w) @ V.T).max(initial=0.0)
    if residual > tol * (1.0 + scale):
        raise ConvergenceError("Jacobi sweeps did not converge", residual)
    return w, V


def _max_off_diagonal(A: np.ndarray) -> float:
    if A.shape[0] < 2:
        return 0.0
    off = A - np.diag(np.diag(A))
    return float(np.abs(off).max())


@dataclass(frozen=True)
class EmbeddingReport:
    eigenvalues: np.ndarray
    numeric_rank: int
    rel_tolerance: float
    euclidean_consistent: bool

    @property
    def threshold(self) -> float:
        return rank_threshold(self.eigenvalues, self.rel_tolerance)

    def summary(self) -> dict:
        return {
            "rank": self.numeric_rank,
            "relTolerance": self.rel_tolerance,
            "euclideanConsistent": self.euclidean_consistent,
            "eigenvalues": [float(x) for x in self.eigenvalues],
        }


def rank_threshold(eigenvalues, rel_tol: float) -> float:
    w = np.asarray(eigenvalues, dtype=float)
    return rel_tol * max(float(np.abs(w).max(initial=0.0)), RANK_FLOOR)


def embedding_dimension(points, rel_tol: float = 1e-8) -> EmbeddingReport:
    """Smallest Euclidean dimension that holds ``points`` isometrically.

    Counts the significantly positive eigenvalues of the double-centred
    squared-distance matrix.
    """
    if rel_tol <= 0:
        raise InputError("rel_tol must be positive")
    G = centered_gram(distance_matrix(points))
    w, _ = sym_eigen(G)
    thr = rank_threshold(w, rel_tol)
    rank = int(np.count_nonzero(w > thr))
    consistent = bool(w.min(initial=0.0) >= -thr)
    return EmbeddingReport(w, rank, rel_tol, consistent)
