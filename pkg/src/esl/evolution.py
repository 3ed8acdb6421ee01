"""Evolutionary search over simplicial structures.

A population of simplicials competes on the same dataset. Each generation,
survivors spawn mutated children and bred children, every individual gets
one sparse-coding / vertex-update / sparse-coding refinement pass, and the
union of parents and refined candidates is truncated to the population size
by fitness. Parents stay in the pool with their recorded fitness, so the
best fitness per generation never decreases.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import InitializationError, InvalidInputError
from .fitness import FitnessConfig, fitness_max
from .model import Dataset, Hypergraph, Simplicial, SparseCodes, encode, update_vertices


@dataclass(frozen=True)
class EvolutionConfig:
    """All knobs of the evolutionary search.

    Defaults mirror the small budgets the method needs in practice: a
    population of 10 evolved for 5 generations, 2 mutated children per
    survivor plus 5 bred children per generation.
    """

    population_size: int = 10
    generations: int = 5
    children_per_parent: int = 2
    breed_pairs: int = 5
    kmeans_k_init: int = 4
    kmeans_dim_threshold: int = 16
    vertex_jitter: float = 0.01
    seed: int = 0
    fitness: FitnessConfig = field(default_factory=FitnessConfig)

    def __post_init__(self):
        if self.population_size < 1:
            raise InvalidInputError("population_size must be positive")
        if self.breed_pairs > 0 and self.population_size < 2:
            raise InvalidInputError("breeding requires a population of at least 2")
        if self.generations < 1:
            raise InvalidInputError("generations must be a positive integer")
        if self.children_per_parent < 1:
            raise InvalidInputError("children_per_parent must be positive")
        if self.breed_pairs < 0:
            raise InvalidInputError("breed_pairs must be non-negative")
        if self.kmeans_k_init < 1:
            raise InvalidInputError("kmeans_k_init must be positive")
        if self.kmeans_dim_threshold < 1:
            raise InvalidInputError("kmeans_dim_threshold must be positive")
        if self.vertex_jitter < 0:
            raise InvalidInputError("vertex_jitter must be non-negative")
        if self.seed < 0:
            raise InvalidInputError("seed must be a non-negative integer")


@dataclass
class Member:
    """One individual: a simplicial, its fitness, and cached codes."""

    simplicial: Simplicial
    fitness: float
    codes: Optional[SparseCodes] = None


@dataclass
class Population:
    """Individuals ordered by descending fitness after each selection."""

    members: list[Member]

    @property
    def best(self) -> Member:
        return self.members[0]


def kmeans(data: Dataset, k: int, rng: np.random.Generator, max_iters: int = 100) -> np.ndarray:
    """Lloyd's algorithm; returns a (d, k) centroid matrix.

    Starts from k distinct sample indices, stops when assignments no longer
    change (or after ``max_iters``). Empty clusters are reseeded to the point
    farthest from its currently assigned centroid.
    """
    n = data.n_samples
    if k < 1 or k > n:
        raise InvalidInputError(f"k must lie in [1, {n}], got {k}")
    pts = data.points
    centroids = pts[:, rng.permutation(n)[:k]].copy()
    assign = None
    for _ in range(max_iters):
        d2 = ((pts[:, :, None] - centroids[:, None, :]) ** 2).sum(axis=0)
        new_assign = d2.argmin(axis=1)
        for c in range(k):
            if not (new_assign == c).any():
                worst = d2[np.arange(n), new_assign].argmax()
                centroids[:, c] = pts[:, worst]
                new_assign[worst] = c
                d2[worst, :] = -np.inf  # a stolen point cannot be stolen again
        if assign is not None and np.array_equal(new_assign, assign):
            break
        assign = new_assign
        for c in range(k):
            mask = assign == c
            if mask.any():
                centroids[:, c] = pts[:, mask].mean(axis=1)
    return centroids


def _point_simplicial(centroids: np.ndarray) -> Simplicial:
    """Simplicial of isolated 0-simplices, one per centroid column."""
    k = centroids.shape[1]
    return Simplicial(centroids, Hypergraph(tuple((i,) for i in range(k)), k))


def _evaluate(data: Dataset, s: Simplicial, cfg: EvolutionConfig) -> Member:
    codes, sse = encode(data, s)
    return Member(s, fitness_max(sse, s, data.n_samples, cfg.fitness), codes)


def _refine(data: Dataset, s: Simplicial, cfg: EvolutionConfig) -> Member:
    """One sparse-coding / vertex-update / sparse-coding pass plus fitness."""
    codes, _ = encode(data, s)
    updated = update_vertices(data, codes, s)
    return _evaluate(data, updated, cfg)


def init_population(data: Dataset, cfg: EvolutionConfig, rng: np.random.Generator) -> Population:
    """Build the starting population.

    Low-dimensional data starts every individual from the dataset centroid
    as a single 0-simplex; high-dimensional data starts from k-means
    centroids, doubling k until the initial SSE drops below the sample count
    (the validity condition for a meaningful search). Individuals other than
    the first are diversified by one mutation each.
    """
    n = data.n_samples
    base = None
    if data.dim <= cfg.kmeans_dim_threshold:
        centroid = data.points.mean(axis=1, keepdims=True)
        candidate = _point_simplicial(centroid)
        _, sse = encode(data, candidate)
        if sse < n:
            base = candidate
    if base is None:
        k = cfg.kmeans_k_init
        while True:
            if k > n:
                raise InitializationError(
                    "could not reach SSE below the sample count for any k <= n; "
                    "was the data normalized?"
                )
            candidate = _point_simplicial(kmeans(data, k, rng))
            _, sse = encode(data, candidate)
            if sse < n:
                base = candidate
                break
            k *= 2
    members = [_evaluate(data, base, cfg)]
    for _ in range(cfg.population_size - 1):
        members.append(_evaluate(data, mutate(base, data, rng, cfg), cfg))
    return Population(members)


# --- mutations -------------------------------------------------------------
#
# Four families: (0) grow/shrink the dimension of one simplex, (1) add or
# remove a simplex, (2) subdivide a simplex through its barycenter, and
# (3) add or remove a vertex. The family is drawn uniformly, then grow vs
# shrink uniformly where the family has both; an impossible draw falls back
# to a different family.


def _dedupe(edges: list[tuple[int, ...]]) -> list[tuple[int, ...]]:
    out, known = [], set()
    for e in edges:
        if e not in known:
            known.add(e)
            out.append(e)
    return out


def _sample_vertex(data: Dataset, rng: np.random.Generator, jitter: float) -> np.ndarray:
    point = data.points[:, rng.integers(data.n_samples)]
    return point + rng.normal(size=data.dim) * jitter


def _grow_simplex_dim(s, data, rng, cfg):
    # A simplex is the hull of affinely independent points, so more than
    # d + 1 vertices is never a simplex; growth stops there.
    candidates = [j for j, e in enumerate(s.hypergraph.edges) if len(e) <= s.dim]
    if not candidates:
        return None
    edges = list(s.hypergraph.edges)
    j = candidates[int(rng.integers(len(candidates)))]
    new_vertex = _sample_vertex(data, rng, cfg.vertex_jitter)
    vertices = np.column_stack([s.vertices, new_vertex])
    edges[j] = edges[j] + (s.vertex_count,)
    return Simplicial(vertices, Hypergraph(tuple(edges), s.vertex_count + 1))


def _shrink_simplex_dim(s, data, rng, cfg):
    candidates = [j for j, e in enumerate(s.hypergraph.edges) if len(e) >= 2]
    if not candidates:
        return None
    edges = list(s.hypergraph.edges)
    j = candidates[int(rng.integers(len(candidates)))]
    drop = edges[j][int(rng.integers(len(edges[j])))]
    edges[j] = tuple(i for i in edges[j] if i != drop)
    return Simplicial(s.vertices, Hypergraph(tuple(_dedupe(edges)), s.vertex_count))


def _add_simplex(s, data, rng, cfg):
    size = 1 + int(rng.integers(2))
    new_vertices = np.column_stack(
        [_sample_vertex(data, rng, cfg.vertex_jitter) for _ in range(size)]
    )
    vertices = np.column_stack([s.vertices, new_vertices])
    new_edge = tuple(range(s.vertex_count, s.vertex_count + size))
    edges = s.hypergraph.edges + (new_edge,)
    return Simplicial(vertices, Hypergraph(edges, s.vertex_count + size))


def _remove_simplex(s, data, rng, cfg):
    if s.simplex_count < 2:
        return None
    edges = list(s.hypergraph.edges)
    del edges[int(rng.integers(len(edges)))]
    return Simplicial(s.vertices, Hypergraph(tuple(edges), s.vertex_count))


def _subdivide_simplex(s, data, rng, cfg):
    candidates = [j for j, e in enumerate(s.hypergraph.edges) if len(e) >= 2]
    if not candidates:
        return None
    j = candidates[int(rng.integers(len(candidates)))]
    edge = s.hypergraph.edges[j]
    barycenter = s.vertices[:, list(edge)].mean(axis=1)
    vertices = np.column_stack([s.vertices, barycenter])
    w = s.vertex_count
    replacements = [tuple(i for i in edge if i != v) + (w,) for v in edge]
    edges = list(s.hypergraph.edges)
    edges[j : j + 1] = replacements
    return Simplicial(vertices, Hypergraph(tuple(_dedupe(edges)), w + 1))


def _add_vertex(s, data, rng, cfg):
    point = data.points[:, rng.integers(data.n_samples)]
    vertices = np.column_stack([s.vertices, point])
    edges = s.hypergraph.edges + ((s.vertex_count,),)
    return Simplicial(vertices, Hypergraph(edges, s.vertex_count + 1))


def _delete_vertex(s, v: int):
    """Edge list after removing vertex v, or None if nothing would remain."""
    edges = []
    for e in s.hypergraph.edges:
        shifted = tuple(i - 1 if i > v else i for i in e if i != v)
        if shifted:
            edges.append(shifted)
    edges = _dedupe(edges)
    return edges or None


def _remove_vertex(s, data, rng, cfg):
    if s.vertex_count < 2:
        return None
    eligible = [v for v in range(s.vertex_count) if _delete_vertex(s, v) is not None]
    if not eligible:
        return None
    v = eligible[int(rng.integers(len(eligible)))]
    vertices = np.delete(s.vertices, v, axis=1)
    return Simplicial(vertices, Hypergraph(tuple(_delete_vertex(s, v)), s.vertex_count - 1))


_FAMILIES = (
    (_grow_simplex_dim, _shrink_simplex_dim),
    (_add_simplex, _remove_simplex),
    (_subdivide_simplex,),
    (_add_vertex, _remove_vertex),
)


def mutate(s: Simplicial, data: Dataset, rng: np.random.Generator,
           cfg: EvolutionConfig) -> Simplicial:
    """Apply exactly one structural mutation.

    Never removes the last hyperedge or the last vertex; an impossible draw
    falls back to a different family (growing moves are always possible, so
    this terminates).
    """
    remaining = [0, 1, 2, 3]
    while True:
        if not remaining:
            remaining = [0, 1, 2, 3]
        family = remaining[int(rng.integers(len(remaining)))]
        ops = _FAMILIES[family]
        op = ops[int(rng.integers(len(ops)))] if len(ops) > 1 else ops[0]
        result = op(s, data, rng, cfg)
        if result is not None:
            return result
        remaining.remove(family)


def breed(s1: Simplicial, s2: Simplicial, rng: np.random.Generator) -> Simplicial:
    """Cross two simplicials into a child.

    A random non-empty subset of hyperedges is kept from each parent (each
    edge with probability 1/2, redrawn until non-empty); the child gets the
    referenced vertex columns of both parents side by side and the kept
    hyperedges reindexed block-diagonally, so every child simplex is a
    geometrically identical copy of a parent simplex.
    """
    if s1.dim != s2.dim:
        raise InvalidInputError("parents must share the ambient dimension")

    def keep_mask(count: int) -> np.ndarray:
        while True:
            mask = rng.random(count) < 0.5
            if mask.any():
                return mask

    def extract(s: Simplicial):
        mask = keep_mask(s.simplex_count)
        kept = [e for e, keep in zip(s.hypergraph.edges, mask) if keep]
        referenced = sorted({i for e in kept for i in e})
        remap = {old: new for new, old in enumerate(referenced)}
        return s.vertices[:, referenced], [tuple(remap[i] for i in e) for e in kept]

    verts1, edges1 = extract(s1)
    verts2, edges2 = extract(s2)
    offset = verts1.shape[1]
    edges = tuple(edges1) + tuple(tuple(i + offset for i in e) for e in edges2)
    vertices = np.column_stack([verts1, verts2])
    return Simplicial(vertices, Hypergraph(edges, vertices.shape[1]))


def _take_distinct(ranked: list[Member], size: int) -> list[Member]:
    """Top ``size`` members of a fitness-ranked pool, merging bit-identical
    duplicates (a converged parent and its refined copy) so population slots
    are not wasted on clones. Falls back to plain truncation when too few
    distinct members exist."""
    kept: list[Member] = []
    skipped: list[Member] = []
    seen: set[tuple] = set()
    for member in ranked:
        key = (member.simplicial.hypergraph.edges, member.simplicial.vertices.tobytes())
        if key in seen:
            skipped.append(member)
        else:
            seen.add(key)
            kept.append(member)
        if len(kept) == size:
            return kept
    kept.extend(skipped[: size - len(kept)])
    kept.sort(key=lambda m: -m.fitness)
    return kept


def evolve(data: Dataset, cfg: EvolutionConfig) -> tuple[Simplicial, list[float]]:
    """Run the full evolutionary search.

    Per generation: mutate each survivor ``children_per_parent`` times, breed
    ``breed_pairs`` random parent pairs, refine and score every parent and
    child, then keep the ``population_size`` fittest of parents plus
    candidates (bit-identical duplicates merged, so converged parents do not
    crowd out diversity). Parents compete with their recorded fitness, which
    makes the best-fitness history non-decreasing. Deterministic for a fixed
    seed.

    Returns the best simplicial and the per-generation best-fitness history.
    """
    rng = np.random.default_rng(cfg.seed)
    population = init_population(data, cfg, rng)
    history: list[float] = []
    for _ in range(cfg.generations):
        parents = population.members
        children: list[Simplicial] = []
        for member in parents:
            for _ in range(cfg.children_per_parent):
                children.append(mutate(member.simplicial, data, rng, cfg))
        for _ in range(cfg.breed_pairs):
            i, j = rng.choice(len(parents), size=2, replace=False)
            children.append(breed(parents[i].simplicial, parents[j].simplicial, rng))
        pool = list(parents)
        for member in parents:
            pool.append(_refine(data, member.simplicial, cfg))
        for child in children:
            pool.append(_refine(data, child, cfg))
        pool.sort(key=lambda m: -m.fitness)
        population = Population(_take_distinct(pool, cfg.population_size))
        if history:
            assert population.best.fitness >= history[-1], "elitism violated"
        history.append(population.best.fitness)
    return population.best.simplicial, history
