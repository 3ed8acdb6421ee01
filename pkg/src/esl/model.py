"""Simplicial data model and its two inner optimization steps:
structured sparse coding (``encode``) and the least-squares vertex update
(``update_vertices``).

Matrix conventions: data and vertex matrices are column-oriented, shape
(d, n) and (d, V). A simplicial is an immutable pair of a vertex matrix and
a hypergraph whose hyperedges name the simplices.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InvalidInputError
from .geometry import project_points_onto_simplex, pseudo_inverse


@dataclass(frozen=True)
class Hypergraph:
    """Set of hyperedges over ``vertex_count`` vertices.

    Each hyperedge is stored as a sorted tuple of distinct vertex indices and
    names one simplex. Edges are non-empty and no two edges are the same set.
    """

    edges: tuple[tuple[int, ...], ...]
    vertex_count: int

    def __post_init__(self):
        if self.vertex_count < 1:
            raise InvalidInputError("hypergraph needs at least one vertex")
        canon = []
        for edge in self.edges:
            t = tuple(sorted(int(i) for i in edge))
            if not t:
                raise InvalidInputError("hyperedges must be non-empty")
            if len(set(t)) != len(t):
                raise InvalidInputError("hyperedge contains duplicate vertex indices")
            if t[0] < 0 or t[-1] >= self.vertex_count:
                raise InvalidInputError(
                    f"hyperedge {t} references a vertex outside [0, {self.vertex_count})"
                )
            canon.append(t)
        if not canon:
            raise InvalidInputError("hypergraph needs at least one hyperedge")
        if len(set(canon)) != len(canon):
            raise InvalidInputError("hyperedges must be distinct sets")
        object.__setattr__(self, "edges", tuple(canon))

    @property
    def edge_count(self) -> int:
        return len(self.edges)


@dataclass(frozen=True, eq=False)
class Simplicial:
    """A union of simplices: vertex positions plus hypergraph structure.

    ``vertices`` has shape (d, V) with one vertex per column; the hypergraph
    indexes those columns. Instances are immutable; operations that modify a
    simplicial return a new value.
    """

    vertices: np.ndarray
    hypergraph: Hypergraph

    def __post_init__(self):
        arr = np.array(self.vertices, dtype=float)
        if arr.ndim != 2 or arr.shape[0] < 1:
            raise InvalidInputError("vertex matrix must be 2-D with shape (d, V)")
        if not np.isfinite(arr).all():
            raise InvalidInputError("vertex coordinates must be finite")
        if arr.shape[1] != self.hypergraph.vertex_count:
            raise InvalidInputError(
                f"vertex matrix has {arr.shape[1]} columns but hypergraph expects "
                f"{self.hypergraph.vertex_count}"
            )
        arr.setflags(write=False)
        object.__setattr__(self, "vertices", arr)

    @property
    def dim(self) -> int:
        return self.vertices.shape[0]

    @property
    def vertex_count(self) -> int:
        return self.vertices.shape[1]

    @property
    def simplex_count(self) -> int:
        return self.hypergraph.edge_count

    def simplex_vertices(self, edge_index: int) -> np.ndarray:
        """Vertex matrix (d, m) of one simplex."""
        return self.vertices[:, list(self.hypergraph.edges[edge_index])]

    def structurally_equal(self, other: "Simplicial") -> bool:
        return (
            self.hypergraph.edges == other.hypergraph.edges
            and self.vertices.shape == other.vertices.shape
            and np.array_equal(self.vertices, other.vertices)
        )


@dataclass(eq=False)
class Dataset:
    """Column-oriented sample matrix (d, n) with optional integer labels."""

    points: np.ndarray
    labels: Optional[np.ndarray] = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise InvalidInputError("points must form a (d, n) matrix with n >= 1")
        if not np.isfinite(pts).all():
            raise InvalidInputError("data points must be finite")
        self.points = pts
        if self.labels is not None:
            labels = np.asarray(self.labels, dtype=int)
            if labels.ndim != 1 or labels.shape[0] != pts.shape[1]:
                raise InvalidInputError("labels must be a vector with one entry per sample")
            self.labels = labels

    @property
    def dim(self) -> int:
        return self.points.shape[0]

    @property
    def n_samples(self) -> int:
        return self.points.shape[1]

    def subset(self, index) -> "Dataset":
        """New dataset restricted to the given index array or boolean mask."""
        labels = self.labels[index] if self.labels is not None else None
        return Dataset(self.points[:, index], labels)

    def without_labels(self) -> "Dataset":
        return Dataset(self.points, None)


@dataclass
class SparseCodes:
    """Per-point barycentric codes, each supported on a single hyperedge.

    ``active_edges[i]`` is the hyperedge index chosen for point i,
    ``coefficients[i]`` the barycentric weights over that hyperedge's
    vertices (in hyperedge order) and ``sq_errors[i]`` the squared
    reconstruction error.
    """

    active_edges: np.ndarray
    coefficients: list[np.ndarray]
    sq_errors: np.ndarray

    @property
    def n_samples(self) -> int:
        return self.active_edges.shape[0]

    @property
    def total_sse(self) -> float:
        return float(self.sq_errors.sum())

    def to_matrix(self, s: Simplicial) -> np.ndarray:
        """Assemble the dense (V, n) code matrix, zero outside active groups."""
        full = np.zeros((s.vertex_count, self.n_samples))
        edges = s.hypergraph.edges
        for i in range(self.n_samples):
            full[list(edges[self.active_edges[i]]), i] = self.coefficients[i]
        return full


def encode(data: Dataset, s: Simplicial) -> tuple[SparseCodes, float]:
    """Code every sample on its nearest simplex.

    Each point is projected onto every simplex of ``s``; the projection with
    the smallest squared error wins, ties going to the lowest hyperedge
    index. Returns the codes and the summed squared error.
    """
    if data.dim != s.dim:
        raise InvalidInputError(
            f"data dimension {data.dim} does not match simplicial dimension {s.dim}"
        )
    n = data.n_samples
    best_err = np.full(n, np.inf)
    best_edge = np.zeros(n, dtype=int)
    per_edge = []
    for j, edge in enumerate(s.hypergraph.edges):
        bary, err = project_points_onto_simplex(data.points, s.vertices[:, list(edge)])
        per_edge.append(bary)
        better = err < best_err
        best_err[better] = err[better]
        best_edge[better] = j
    coeffs = [per_edge[best_edge[i]][:, i].copy() for i in range(n)]
    codes = SparseCodes(best_edge, coeffs, best_err)
    return codes, codes.total_sse


def update_vertices(data: Dataset, codes: SparseCodes, s: Simplicial) -> Simplicial:
    """Least-squares vertex update for fixed codes.

    Solves min over vertex positions of ||Y - A X||_F^2 via A = Y X^+ with X
    the dense code matrix. Vertices whose code row is entirely zero (unused
    atoms) keep their previous positions instead of collapsing to the
    origin. The hypergraph is unchanged.
    """
    if data.dim != s.dim:
        raise InvalidInputError("data dimension does not match simplicial dimension")
    if codes.n_samples != data.n_samples:
        raise InvalidInputError("codes were not produced for this dataset")
    if codes.active_edges.size and codes.active_edges.max() >= s.simplex_count:
        raise InvalidInputError("codes reference hyperedges outside this simplicial")
    full = codes.to_matrix(s)
    used = (full != 0.0).any(axis=1)
    new_vertices = np.array(s.vertices)
    if used.any():
        new_vertices[:, used] = data.points @ pseudo_inverse(full[used])
    return Simplicial(new_vertices, s.hypergraph)


def reconstruction_errors(points, s: Simplicial) -> np.ndarray:
    """Squared distance of each column of ``points`` to the simplicial."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.shape[0] != s.dim:
        raise InvalidInputError(
            f"point dimension {pts.shape[0]} does not match simplicial dimension {s.dim}"
        )
    best = np.full(pts.shape[1], np.inf)
    for edge in s.hypergraph.edges:
        _, err = project_points_onto_simplex(pts, s.vertices[:, list(edge)])
        np.minimum(best, err, out=best)
    return best


def reconstruction_error(y, s: Simplicial) -> float:
    """Squared distance from a single point to the simplicial; equals the
    ``sq_error`` that ``encode`` would assign."""
    arr = np.asarray(y, dtype=float)
    if arr.ndim != 1:
        raise InvalidInputError("expected a single point as a 1-D vector")
    return float(reconstruction_errors(arr[:, None], s)[0])
