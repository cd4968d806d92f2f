"""Mask rewiring used by the lower-bound argument.

``donate`` moves a vertex's exclusive neighbours to another vertex without
changing the edge count; repeated donation from a low-degree vertex empties
it (``vertex_removal_step``), and iterating that shrinks any bounded-degree
mask to few vertices (``reduce_mask``).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import Mask, _subset_array
from .errors import InvalidParametersError, PreconditionError


def donate(M: Mask, v: int, u: int) -> Mask:
    """Donate(M, v -> u): every neighbour s of v not adjacent to u is rewired to u.

    The edge (v, u) itself, if present, is left alone.
    """
    deg = M.degree
    for name, x in (("v", v), ("u", u)):
        if not 1 <= x <= M.n or deg[x] == 0:
            raise InvalidParametersError(f"{name}={x} is not a vertex of the mask")
    if v == u:
        raise InvalidParametersError("donor and receiver must differ")
    nbrs = M.neighbors()
    nu = nbrs[u]
    moved = [s for s in nbrs[v] if s != u and s not in nu]
    if not moved:
        return M
    edges = M.edge_set()
    for s in moved:
        edges.discard((min(s, v), max(s, v)))
        edges.add((min(s, u), max(s, u)))
    return Mask.from_pairs(M.n, sorted(edges))


def _vertex_threshold_ok(n_vertices: int, n_edges: int, t: int) -> bool:
    # |V| >= 2t + 2 + 2|M|/t, multiplied through by t to stay in integers
    return n_vertices * t >= 2 * t * t + 2 * t + 2 * n_edges


def vertex_bound(n_edges: int, t: int) -> float:
    return 2 * t + 2 + 2 * n_edges / t


def vertex_removal_step(M: Mask, t: int) -> tuple[Mask, int]:
    """Empty the smallest low-degree vertex by donating to the other low-degree vertices.

    Requires max degree <= 2t and |V(M)| >= 2t + 2 + 2|M|/t. Returns the new
    mask and the removed vertex.
    """
    if t < 1:
        raise InvalidParametersError(f"t must be a positive integer, got {t}")
    if M.max_degree > 2 * t:
        raise PreconditionError(
            f"max degree {M.max_degree} exceeds 2t = {2 * t}", hypothesis="max_degree")
    nv = M.vertices.size
    if not _vertex_threshold_ok(nv, len(M), t):
        raise PreconditionError(
            f"|V(M)| = {nv} < 2t + 2 + 2|M|/t = {vertex_bound(len(M), t):g}",
            hypothesis="vertex_count")
    deg = M.degree
    low = [int(x) for x in M.vertices if deg[x] <= t]
    v1 = low[0]
    current = M
    for vi in low[1:]:
        if current.degree[v1] == 0:
            break
        current = donate(current, v1, vi)
    return current, v1


@dataclass(frozen=True)
class ReductionStep:
    removed_vertex: int
    vertices_before: int
    vertices_after: int
    edges: int
    max_degree: int


@dataclass(frozen=True)
class ReductionTrace:
    t: int
    steps: tuple[ReductionStep, ...] = field(default_factory=tuple)
    final_vertex_count: int = 0
    vertex_bound: float = 0.0


def reduce_mask(M: Mask, t: int) -> tuple[Mask, ReductionTrace]:
    """Apply ``vertex_removal_step`` until |V| <= 2t + 2 + 2|M|/t."""
    if t < 1:
        raise InvalidParametersError(f"t must be a positive integer, got {t}")
    if M.max_degree > 2 * t:
        raise PreconditionError(
            f"max degree {M.max_degree} exceeds 2t = {2 * t}", hypothesis="max_degree")
    steps = []
    current = M
    m = len(M)
    while current.vertices.size * t > 2 * t * t + 2 * t + 2 * m:
        before = current.vertices.size
        current, removed = vertex_removal_step(current, t)
        steps.append(ReductionStep(removed, before, int(current.vertices.size), len(current),
                                   current.max_degree))
    trace = ReductionTrace(t=t, steps=tuple(steps), final_vertex_count=int(current.vertices.size),
                           vertex_bound=vertex_bound(m, t))
    return current, trace


def restrict_mask(M: Mask, S) -> tuple[int, Mask, np.ndarray]:
    """Restrict M to the vertex subset S, relabelled to ``1..|S|`` in increasing order.

    Returns ``(n_prime, M_S, phi)`` where ``phi[i - 1]`` is the original vertex
    behind new vertex ``i``.
    """
    phi = _subset_array(M.n, S)
    n_prime = int(phi.size)
    inverse = np.zeros(M.n + 1, dtype=np.int64)
    inverse[phi] = np.arange(1, n_prime + 1)
    if len(M):
        keep = (inverse[M.edges[:, 0]] > 0) & (inverse[M.edges[:, 1]] > 0)
        new_edges = inverse[M.edges[keep]]
    else:
        new_edges = np.empty((0, 2), dtype=np.int64)
    return n_prime, Mask(n_prime, new_edges), phi
