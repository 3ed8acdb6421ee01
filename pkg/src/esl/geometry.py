"""Geometric kernel for simplicial models.

A simplex is stored as a dense vertex matrix of shape (d, m): one column per
vertex, m >= 1. A single column is a valid 0-dimensional simplex (a point).
All functions here are pure and safe to call concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .errors import InvalidInputError

if TYPE_CHECKING:  # pragma: no cover
    from .model import Simplicial

# Relative singular-value cutoff shared by the pseudo-inverse and the
# affine-hull solves inside the projection.
SVD_RCOND = 1e-10

# Barycentric entries may dip this far below zero before a point is sent to
# the face recursion; smaller excursions are clamped to exactly zero.
_NEG_TOL = 1e-12


@dataclass(frozen=True)
class Projection:
    """Nearest point of a simplex to a query point.

    ``barycentric`` holds one weight per vertex (non-negative, summing to
    one), ``point`` equals ``vertices @ barycentric`` and ``sq_error`` is the
    squared Euclidean distance from the query to ``point``.
    """

    barycentric: np.ndarray
    point: np.ndarray
    sq_error: float


def as_vertex_matrix(vertices) -> np.ndarray:
    """Validate and return a (d, m) float vertex matrix."""
    arr = np.asarray(vertices, dtype=float)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise InvalidInputError("vertices must form a 2-D matrix with at least one column")
    if not np.isfinite(arr).all():
        raise InvalidInputError("vertex coordinates must be finite")
    return arr


def pseudo_inverse(matrix) -> np.ndarray:
    """Moore-Penrose pseudo-inverse of a dense real matrix.

    Rank-deficient inputs yield the minimum-norm inverse; singular values
    below ``SVD_RCOND`` relative to the largest one are treated as zero.
    """
    arr = np.asarray(matrix, dtype=float)
    if arr.ndim != 2:
        raise InvalidInputError("pseudo_inverse expects a 2-D matrix")
    if not np.isfinite(arr).all():
        raise InvalidInputError("matrix entries must be finite")
    return np.linalg.pinv(arr, rcond=SVD_RCOND)


def pairwise_sq_distances(vertices) -> np.ndarray:
    """Symmetric (m, m) matrix of squared Euclidean vertex distances."""
    v = as_vertex_matrix(vertices)
    diff = v[:, :, None] - v[:, None, :]
    return np.einsum("dij,dij->ij", diff, diff)


def simplex_content(vertices) -> float:
    """Unsigned q-dimensional volume of a simplex, q = m - 1.

    Evaluates the Cayley-Menger determinant of the squared-distance matrix
    bordered with a top row and left column of (0, 1, ..., 1):

        content^2 = (-1)^(q+1) / (2^q (q!)^2) * det(bordered)

    A single vertex has zero content. Affinely dependent vertex sets are
    legal and also return zero; tiny negative radicands caused by rounding
    are clamped to zero rather than raising.
    """
    v = as_vertex_matrix(vertices)
    m = v.shape[1]
    if m == 1:
        return 0.0
    q = m - 1
    bordered = np.ones((m + 1, m + 1))
    bordered[0, 0] = 0.0
    bordered[1:, 1:] = pairwise_sq_distances(v)
    det = float(np.linalg.det(bordered))
    squared = (-1.0) ** (q + 1) / (2.0**q * math.factorial(q) ** 2) * det
    return math.sqrt(max(squared, 0.0))


def cumulative_content(simplicial: "Simplicial") -> float:
    """Cumulative discrete content of a simplicial: sum of (1 + C)^w over
    its simplices, where C is the simplex content and w the hyperedge
    cardinality.

    Always >= the number of hyperedges, since every term is >= 1.
    """
    verts = simplicial.vertices
    total = 0.0
    with np.errstate(over="ignore"):
        for edge in simplicial.hypergraph.edges:
            c = simplex_content(verts[:, list(edge)])
            total += float(np.float64(1.0 + c) ** len(edge))
    return total


def _affine_weights(sub: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """Solve min ||y - sub @ t||^2 subject to sum(t) = 1 for each column of
    ``targets``; returns the (f, k) weight matrix (may contain negatives)."""
    f = sub.shape[1]
    if f == 1:
        return np.ones((1, targets.shape[1]))
    base = sub[:, :1]
    span = sub[:, 1:] - base
    w = np.linalg.pinv(span, rcond=SVD_RCOND) @ (targets - base)
    return np.vstack([1.0 - w.sum(axis=0, keepdims=True), w])


def project_points_onto_simplex(points, vertices) -> tuple[np.ndarray, np.ndarray]:
    """Project every column of ``points`` (d, n) onto the closed simplex.

    Returns ``(barycentric, sq_errors)`` with shapes (m, n) and (n,). The
    nearest point is found exactly: solve the sum-to-one least-squares
    problem on the affine hull, accept when all weights are non-negative,
    otherwise recurse into the faces opposite each negative weight and keep
    the best candidate per point. Faces are memoized, so the whole batch
    costs a handful of small dense solves.
    """
    verts = as_vertex_matrix(vertices)
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] != verts.shape[0]:
        raise InvalidInputError(
            f"point dimension does not match vertex dimension {verts.shape[0]}"
        )
    if not np.isfinite(pts).all():
        raise InvalidInputError("points must be finite")

    m = verts.shape[1]
    n = pts.shape[1]
    best_err = np.full(n, np.inf)
    best_bary = np.zeros((m, n))

    # Depth-first over faces; each face keeps a mask of the points it has
    # already processed so shared sub-faces are solved once per point.
    seen: dict[tuple[int, ...], np.ndarray] = {}
    stack: list[tuple[tuple[int, ...], np.ndarray]] = [(tuple(range(m)), np.arange(n))]
    while stack:
        face, idx = stack.pop()
        mask = seen.get(face)
        if mask is None:
            mask = np.zeros(n, dtype=bool)
            seen[face] = mask
        idx = idx[~mask[idx]]
        if idx.size == 0:
            continue
        mask[idx] = True

        sub = verts[:, face]
        coeffs = _affine_weights(sub, pts[:, idx])
        feasible = (coeffs >= -_NEG_TOL).all(axis=0)

        if feasible.any():
            cols = idx[feasible]
            c = np.clip(coeffs[:, feasible], 0.0, 1.0)
            c /= c.sum(axis=0, keepdims=True)
            proj = sub @ c
            err = ((pts[:, cols] - proj) ** 2).sum(axis=0)
            better = err < best_err[cols]
            target = cols[better]
            if target.size:
                best_err[target] = err[better]
                best_bary[:, target] = 0.0
                best_bary[np.ix_(list(face), target)] = c[:, better]

        if not feasible.all() and len(face) > 1:
            bad = np.where(~feasible)[0]
            neg = coeffs[:, bad] < -_NEG_TOL
            for i in range(len(face)):
                sel = bad[neg[i]]
                if sel.size:
                    stack.append((face[:i] + face[i + 1 :], idx[sel]))

    return best_bary, best_err


def project_onto_simplex(y, vertices) -> Projection:
    """Euclidean-nearest point of the closed simplex to the query ``y``."""
    verts = as_vertex_matrix(vertices)
    arr = np.asarray(y, dtype=float)
    if arr.ndim != 1 or arr.shape[0] != verts.shape[0]:
        raise InvalidInputError(
            f"query dimension does not match vertex dimension {verts.shape[0]}"
        )
    bary, err = project_points_onto_simplex(arr[:, None], verts)
    weights = bary[:, 0]
    return Projection(barycentric=weights, point=verts @ weights, sq_error=float(err[0]))
