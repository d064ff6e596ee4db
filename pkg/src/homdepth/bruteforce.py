"""Exhaustive oracles for tiny complexes.

These enumerate the whole coset gamma + Im d2 instead of solving linear
systems, so they are independent of the GF(2) machinery they check.
"""

from __future__ import annotations

from .circuit import Circuit, light_cone_mask
from .complex import EdgeSet, PolygonalComplex
from .topology import ChainLike, as_mask

MAX_FACES = 16


def coset_members(g: PolygonalComplex, gamma: ChainLike) -> list[int]:
    """Every chain gamma + d2(F') over all face subsets F' (with repeats collapsed)."""
    if g.n_faces > MAX_FACES:
        raise ValueError(f"brute force limited to {MAX_FACES} faces")
    base = as_mask(gamma)
    members = {base}
    for fm in g.face_masks:
        members |= {m ^ fm for m in members}
    return sorted(members)


def separates_bruteforce(g: PolygonalComplex, gamma: ChainLike, x: EdgeSet | int) -> bool:
    xm = x.mask if isinstance(x, EdgeSet) else x
    return all(m & xm for m in coset_members(g, gamma))


def effective_support_A_bruteforce(g: PolygonalComplex, u: Circuit, gamma: ChainLike) -> EdgeSet:
    """Intersection of lower light cones over the full class."""
    out = (1 << g.n_edges) - 1
    for m in coset_members(g, gamma):
        out &= light_cone_mask(u, m, "down")
    return EdgeSet(out)


def path_distance_bruteforce(g: PolygonalComplex, e: int, f: int) -> int:
    """min |gamma| - 1 over simple edge paths from e to f, by depth-first enumeration."""
    if e == f:
        return 0
    best = [g.n_edges]

    def neighbours(a: int) -> list[int]:
        u, v = g.edges[a]
        return sorted(set(g.vertex_edges[u]) | set(g.vertex_edges[v]) - {a})

    def walk(a: int, used: int, length: int) -> None:
        if length >= best[0]:
            return
        for b in neighbours(a):
            if used >> b & 1:
                continue
            if b == f:
                best[0] = length
                return
            walk(b, used | 1 << b, length + 1)

    walk(e, 1 << e, 1)
    return best[0]
