"""Edge metrics, balls, boundaries and the local subcomplex K(e, r).

Two adjacency relations live on the edge set: ``path`` (edges sharing a
vertex) and ``copath`` (edges sharing a face). Distances are BFS hop counts,
so d(e, e) = 0 and neighbours are at distance 1. All-pairs tables are cached
per complex since complexes are immutable.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Literal

import numpy as np

from .complex import ComplexError, EdgeSet, PolygonalComplex, bits_to_mask, iter_bits, require_csc

Metric = Literal["path", "copath"]
UNREACHABLE = -1


class UnreachableError(ValueError):
    pass


@lru_cache(maxsize=64)
def _adjacency(g: PolygonalComplex, metric: Metric) -> tuple[tuple[int, ...], ...]:
    adj: list[set[int]] = [set() for _ in range(g.n_edges)]
    if metric == "path":
        groups = g.vertex_edges
    elif metric == "copath":
        groups = g.faces
    else:
        raise ValueError(f"unknown metric {metric!r}")
    for grp in groups:
        for a in grp:
            adj[a].update(grp)
    for e in range(g.n_edges):
        adj[e].discard(e)
    return tuple(tuple(sorted(s)) for s in adj)


def adjacency(g: PolygonalComplex, metric: Metric = "copath") -> tuple[tuple[int, ...], ...]:
    """Sorted neighbour lists of every edge under ``metric``."""
    return _adjacency(g, metric)


def _bfs(adj, source: int, allowed: int | None = None) -> list[int]:
    dist = [UNREACHABLE] * len(adj)
    dist[source] = 0
    q = deque([source])
    while q:
        x = q.popleft()
        for y in adj[x]:
            if dist[y] < 0 and (allowed is None or allowed >> y & 1):
                dist[y] = dist[x] + 1
                q.append(y)
    return dist


@lru_cache(maxsize=64)
def _distance_table(g: PolygonalComplex, metric: Metric) -> np.ndarray:
    adj = _adjacency(g, metric)
    table = np.array([_bfs(adj, e) for e in range(g.n_edges)], dtype=np.int64).reshape(g.n_edges, g.n_edges)
    table.setflags(write=False)
    return table


def distance_table(g: PolygonalComplex, metric: Metric = "copath") -> np.ndarray:
    """All-pairs edge distances (read-only array, -1 where unreachable)."""
    return _distance_table(g, metric)


def edge_distance(g: PolygonalComplex, e: int, f: int, metric: Metric = "copath") -> int:
    d = int(_distance_table(g, metric)[e, f])
    if d < 0:
        raise UnreachableError(f"edges {e} and {f} are unreachable under the {metric} metric")
    return d


def ball(g: PolygonalComplex, e: int, r: int, metric: Metric = "copath") -> EdgeSet:
    row = _distance_table(g, metric)[e]
    return EdgeSet.of(np.flatnonzero((row >= 0) & (row <= r)).tolist())


def diameter(g: PolygonalComplex, metric: Metric = "copath") -> int:
    table = _distance_table(g, metric)
    if (table < 0).any():
        raise UnreachableError("complex is disconnected under this metric")
    return int(table.max()) if table.size else 0


def set_distance(g: PolygonalComplex, e: int, s: EdgeSet, metric: Metric = "copath") -> int:
    """min over x in s of d(e, x); -1 for an empty set."""
    if not s:
        return UNREACHABLE
    row = _distance_table(g, metric)[e]
    return int(min(row[x] for x in s))


def shortest_path(
    g: PolygonalComplex, e: int, f: int, metric: Metric = "path", avoid: EdgeSet | None = None
) -> list[int] | None:
    """Edge sequence from ``e`` to ``f`` of minimal length, or None.

    Ties break towards the lowest edge index: neighbours are scanned in
    increasing order and the first discovery wins.
    """
    adj = _adjacency(g, metric)
    allowed = None if avoid is None else ~avoid.mask
    if allowed is not None and (not allowed >> e & 1 or not allowed >> f & 1):
        return None
    parent = {e: -1}
    q = deque([e])
    while q:
        x = q.popleft()
        if x == f:
            break
        for y in adj[x]:
            if y not in parent and (allowed is None or allowed >> y & 1):
                parent[y] = x
                q.append(y)
    if f not in parent:
        return None
    out = [f]
    while out[-1] != e:
        out.append(parent[out[-1]])
    return out[::-1]


def degrees(g: PolygonalComplex) -> tuple[int, int]:
    """(max edges at a vertex, max edges on a face)."""
    deg = max((len(es) for es in g.vertex_edges), default=0)
    fdeg = max((len(f) for f in g.faces), default=0)
    return deg, fdeg


# ---------------------------------------------------------------------------
# boundaries


def edge_coboundary(g: PolygonalComplex, s: EdgeSet) -> EdgeSet:
    """Edges with exactly one endpoint among the vertices touched by ``s``."""
    require_csc(g)
    vs = g.vertex_support(s)
    return EdgeSet.of(i for i, (u, v) in enumerate(g.edges) if (u in vs) != (v in vs))


def edge_boundary(g: PolygonalComplex, s: EdgeSet) -> EdgeSet:
    """Edges whose two faces split: one face meets ``s``, the other does not."""
    require_csc(g)
    fs = g.face_support(s)
    return EdgeSet.of(i for i, (a, b) in enumerate(g.edge_faces) if (a in fs) != (b in fs))


def copath_components(g: PolygonalComplex, s: EdgeSet) -> list[EdgeSet]:
    """Components of ``s`` where two edges are linked when they share a face.

    Components are listed by their lowest edge index.
    """
    remaining = s.mask
    comps = []
    while remaining:
        seed = (remaining & -remaining).bit_length() - 1
        comp = 1 << seed
        frontier = [seed]
        while frontier:
            x = frontier.pop()
            for fc in g.edge_faces[x]:
                new = g.face_masks[fc] & remaining & ~comp
                if new:
                    comp |= new
                    frontier.extend(iter_bits(new))
        remaining &= ~comp
        comps.append(EdgeSet(comp))
    return comps


def path_components(g: PolygonalComplex, s: EdgeSet) -> list[EdgeSet]:
    """Components of ``s`` where two edges are linked when they share a vertex."""
    remaining = s.mask
    comps = []
    while remaining:
        seed = (remaining & -remaining).bit_length() - 1
        comp = 1 << seed
        frontier = [seed]
        while frontier:
            x = frontier.pop()
            for w in g.edges[x]:
                new = bits_to_mask(g.vertex_edges[w]) & remaining & ~comp
                if new:
                    comp |= new
                    frontier.extend(iter_bits(new))
        remaining &= ~comp
        comps.append(EdgeSet(comp))
    return comps


# ---------------------------------------------------------------------------
# local subcomplex K(e, r)


@dataclass(frozen=True)
class SubComplex:
    """A subcomplex re-indexed locally, with maps back to the parent."""

    complex: PolygonalComplex
    vertex_map: tuple[int, ...]
    edge_map: tuple[int, ...]
    face_map: tuple[int, ...]
    core_faces: tuple[int, ...]  # parent indices of the faces within radius, before augmentation

    def parent_edges(self) -> EdgeSet:
        return EdgeSet.of(self.edge_map)

    def parent_faces(self) -> set[int]:
        return set(self.face_map)


def face_chain_support(g: PolygonalComplex, faces) -> int:
    """Edge mask of the GF(2) sum of face boundaries (edges in an odd number of faces)."""
    m = 0
    for f in faces:
        m ^= g.face_masks[f]
    return m


def subcomplex_K(g: PolygonalComplex, e: int, r: int, edges_from: str = "vertices") -> SubComplex:
    """Local subcomplex around edge ``e`` of copath radius ``r``.

    Core faces are those whose edges are all within copath distance ``r`` of
    ``e``. A further face joins when its boundary lies inside the GF(2)
    boundary of the core. The edge set is ``E_{V_F'}`` (every edge touching a
    vertex of a kept face) when ``edges_from="vertices"``, or just the edges
    of kept faces when ``edges_from="faces"``.
    """
    require_csc(g)
    if r < 0:
        raise ValueError("radius must be >= 0")
    row = _distance_table(g, "copath")[e]
    within = bits_to_mask(np.flatnonzero((row >= 0) & (row <= r)).tolist())
    core = [f for f in range(g.n_faces) if g.face_masks[f] & ~within == 0]
    core_set = set(core)
    bd = face_chain_support(g, core)
    kept = sorted(core_set | {f for f in range(g.n_faces) if f not in core_set and g.face_masks[f] & ~bd == 0})

    fverts = g.vertices_of_faces(kept)
    if edges_from == "vertices":
        emask = g.edges_of_vertices(fverts).mask
    elif edges_from == "faces":
        emask = g.edges_of_faces(kept).mask
    else:
        raise ValueError("edges_from must be 'vertices' or 'faces'")
    edge_map = tuple(iter_bits(emask))
    vset = sorted({w for x in edge_map for w in g.edges[x]})
    v_local = {v: i for i, v in enumerate(vset)}
    e_local = {x: i for i, x in enumerate(edge_map)}
    edges = [(v_local[g.edges[x][0]], v_local[g.edges[x][1]]) for x in edge_map]
    faces = [[e_local[x] for x in g.faces[f]] for f in kept]
    try:
        k = PolygonalComplex(len(vset), edges, faces)
    except ComplexError as exc:  # pragma: no cover - subsets of a valid complex stay valid
        raise AssertionError(f"subcomplex construction failed: {exc}") from exc
    return SubComplex(k, tuple(vset), edge_map, tuple(kept), tuple(core))


def ball_size_bounds(g: PolygonalComplex, metric: Metric = "copath") -> dict:
    """Largest ball size per radius alongside log_D |E| - 1, a lower bound on the diameter."""
    deg, fdeg = degrees(g)
    D = max(deg, fdeg)
    table = _distance_table(g, metric)
    diam = int(table.max())
    sizes = {r: int((table <= r).sum(axis=1).max()) for r in range(diam + 1)}
    return {
        "D": D,
        "diameter": diam,
        "max_ball": sizes,
        "log_bound": math.log(g.n_edges, D) - 1 if D > 1 else float("-inf"),
    }
