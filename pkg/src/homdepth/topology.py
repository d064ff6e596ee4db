"""Chain complexes over GF(2): boundary maps, (co)homology, homology classes
and the gamma-separation decision.

A 1-chain is an edge mask. The class of a chain is the coset chain + Im d2,
so every question of the form "is there a class member avoiding X" is a
linear feasibility problem restricted to the rows of X.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence, Union

from .complex import EdgeSet, PolygonalComplex, bits_to_mask, iter_bits, require_csc
from .gf2 import Echelon, Gf2Matrix, kernel_basis
from .metric import (
    ball,
    copath_components,
    face_chain_support,
    path_components,
    subcomplex_K,
)


class PreconditionError(ValueError):
    """An operation's documented precondition does not hold."""


class CounterexampleError(RuntimeError):
    """A verified property failed; the message carries the witness."""


@dataclass(frozen=True)
class Chain:
    """GF(2) chain of a given grade (0 vertices, 1 edges, 2 faces)."""

    grade: int
    mask: int

    def __post_init__(self):
        if self.grade not in (0, 1, 2):
            raise ValueError("grade must be 0, 1 or 2")

    def support(self) -> list[int]:
        return list(iter_bits(self.mask))

    def __add__(self, other: "Chain") -> "Chain":
        if self.grade != other.grade:
            raise ValueError("cannot add chains of different grade")
        return Chain(self.grade, self.mask ^ other.mask)

    def __len__(self) -> int:
        return self.mask.bit_count()


ChainLike = Union[Chain, EdgeSet, int, Sequence[int]]


def as_mask(c: ChainLike) -> int:
    """Edge mask of a 1-chain given as Chain, EdgeSet, int or an edge sequence.

    Sequences are read as walks: an edge used twice cancels.
    """
    if isinstance(c, Chain):
        if c.grade != 1:
            raise ValueError("expected a 1-chain")
        return c.mask
    if isinstance(c, EdgeSet):
        return c.mask
    if isinstance(c, int):
        return c
    m = 0
    for e in c:
        m ^= 1 << e
    return m


# ---------------------------------------------------------------------------
# boundary matrices and homology


def boundary_matrices(g: PolygonalComplex) -> tuple[Gf2Matrix, Gf2Matrix]:
    """(d1, d2): d1 is |V| x |E| vertex incidence, d2 is |E| x |F| face incidence."""
    d1 = Gf2Matrix(tuple(bits_to_mask(es) for es in g.vertex_edges), g.n_edges)
    d2 = Gf2Matrix(tuple(bits_to_mask(fs) for fs in g.edge_faces), g.n_faces)
    return d1, d2


def coboundary_matrices(g: PolygonalComplex) -> tuple[Gf2Matrix, Gf2Matrix]:
    """(delta0, delta1) = (d1^T, d2^T)."""
    d1, d2 = boundary_matrices(g)
    return d1.T, d2.T


@dataclass(frozen=True)
class HomologyReport:
    dims: tuple[int, int, int]
    codims: tuple[int, int, int]
    euler: int
    rank_d1: int
    rank_d2: int

    def to_dict(self) -> dict:
        return {
            "H": list(self.dims),
            "cohomology": list(self.codims),
            "euler": self.euler,
            "rank_d1": self.rank_d1,
            "rank_d2": self.rank_d2,
        }


@lru_cache(maxsize=256)
def homology(g: PolygonalComplex) -> HomologyReport:
    d1, d2 = boundary_matrices(g)
    r1, r2 = d1.rank(), d2.rank()
    nv, ne, nf = g.n_vertices, g.n_edges, g.n_faces
    dims = (nv - r1, ne - r1 - r2, nf - r2)
    # cohomology from the transposed maps, ranked independently
    c0, c1 = d1.T.rank(), d2.T.rank()
    codims = (nv - c0, ne - c1 - c0, nf - c1)
    return HomologyReport(dims, codims, nv - ne + nf, r1, r2)


def boundary_of_faces(g: PolygonalComplex, faces: Iterable[int]) -> EdgeSet:
    """supp d2(F'): edges lying in an odd number of the given faces."""
    return EdgeSet(face_chain_support(g, faces))


def coboundary_of_vertices(g: PolygonalComplex, vertices: Iterable[int]) -> EdgeSet:
    """supp delta0(W): edges with exactly one endpoint in W."""
    m = 0
    for v in vertices:
        m ^= bits_to_mask(g.vertex_edges[v])
    return EdgeSet(m)


def is_cycle(g: PolygonalComplex, c: ChainLike) -> bool:
    m = as_mask(c)
    return all((m & bits_to_mask(es)).bit_count() % 2 == 0 for es in g.vertex_edges)


def is_cocycle(g: PolygonalComplex, c: ChainLike) -> bool:
    m = as_mask(c)
    return all((m & fm).bit_count() % 2 == 0 for fm in g.face_masks)


@lru_cache(maxsize=64)
def _face_echelon(g: PolygonalComplex) -> Echelon:
    return Echelon(g.face_masks)


def homology_basis(g: PolygonalComplex) -> list[EdgeSet]:
    """Cycles whose classes form a basis of H1 (deterministic)."""
    d1, _ = boundary_matrices(g)
    cycles = kernel_basis(d1.columns())
    ech = Echelon(g.face_masks)
    out = []
    for z in cycles:
        if ech.add(z):
            out.append(EdgeSet(z))
    return out


def cohomology_basis(g: PolygonalComplex) -> list[EdgeSet]:
    """Cocycles whose classes form a basis of H^1 (deterministic)."""
    _, d2 = boundary_matrices(g)
    cocycles = kernel_basis(d2.rows)  # edge masks z with z . face even for every face
    ech = Echelon(bits_to_mask(es) for es in g.vertex_edges)
    out = []
    for z in cocycles:
        if ech.add(z):
            out.append(EdgeSet(z))
    return out


# ---------------------------------------------------------------------------
# homology classes


def same_class(g: PolygonalComplex, a: ChainLike, b: ChainLike) -> tuple[bool, tuple[int, ...] | None]:
    """Whether a + b is a boundary; on success also a face set whose boundary it is."""
    combo = _face_echelon(g).solve(as_mask(a) ^ as_mask(b))
    if combo is None:
        return False, None
    return True, tuple(iter_bits(combo))


@dataclass(frozen=True)
class ClassMember:
    chain: EdgeSet
    faces: tuple[int, ...]  # witness: chain = gamma + d2(faces)


def class_member_avoiding(g: PolygonalComplex, gamma: ChainLike, x: EdgeSet) -> ClassMember | None:
    """A member of [gamma] disjoint from ``x``, or None when ``x`` is gamma-separating.

    Only faces touching ``x`` can change the chain on ``x``; their boundaries
    restricted to ``x`` must sum to gamma restricted to ``x``.
    """
    gm = as_mask(gamma)
    xm = x.mask
    faces = sorted(g.face_support(x))
    ech = Echelon(g.face_masks[f] & xm for f in faces)
    combo = ech.solve(gm & xm)
    if combo is None:
        return None
    used = tuple(faces[i] for i in iter_bits(combo))
    return ClassMember(EdgeSet(gm ^ face_chain_support(g, used)), used)


def class_member_within(g: PolygonalComplex, gamma: ChainLike, b: EdgeSet) -> ClassMember | None:
    """A member of [gamma] supported inside ``b``, or None if there is none."""
    return class_member_avoiding(g, gamma, g.all_edges() - b)


def is_gamma_separating(g: PolygonalComplex, gamma: ChainLike, x: EdgeSet) -> bool:
    return class_member_avoiding(g, gamma, x) is None


class SeparationOracle:
    """Repeated separation queries for a fixed gamma.

    Caches nothing about x; exists so callers can hold the mask once.
    """

    def __init__(self, g: PolygonalComplex, gamma: ChainLike):
        self.g = g
        self.gamma = as_mask(gamma)

    def separates(self, x: EdgeSet | int) -> bool:
        xm = x.mask if isinstance(x, EdgeSet) else x
        g = self.g
        fs = {f for e in iter_bits(xm) for f in g.edge_faces[e]}
        ech = Echelon(g.face_masks[f] & xm for f in sorted(fs))
        return not ech.contains(self.gamma & xm)


def reduce_to_connected_separator(g: PolygonalComplex, gamma: ChainLike, x: EdgeSet) -> EdgeSet:
    """Shrink a gamma-separating set to one of its copath components that still separates.

    Components are tried for removal lowest index first; one is dropped
    whenever the remainder still separates.
    """
    if not is_gamma_separating(g, gamma, x):
        raise PreconditionError("input not separating")
    current = x
    for comp in copath_components(g, x):
        rest = current - comp
        if rest and is_gamma_separating(g, gamma, rest):
            current = rest
    remaining = copath_components(g, current)
    if len(remaining) != 1:
        raise CounterexampleError(
            f"no single separating component: {len(remaining)} components remain in {current!r}"
        )
    return current


# ---------------------------------------------------------------------------
# r-simple connectedness and detours


def subcomplex_homology_trivial(k: PolygonalComplex) -> bool:
    rep = homology(k)
    return rep.dims[1] == 0 and rep.codims[1] == 0


@lru_cache(maxsize=4096)
def _k_trivial(g: PolygonalComplex, e: int, r: int, edges_from: str) -> bool:
    return subcomplex_homology_trivial(subcomplex_K(g, e, r, edges_from).complex)


def r_simply_connected(g: PolygonalComplex, r: int, edges_from: str = "vertices") -> tuple[bool, int | None]:
    """Whether every K(e, r) has vanishing first homology and cohomology.

    Returns (True, None) or (False, first failing edge).
    """
    require_csc(g)
    for e in range(g.n_edges):
        if not _k_trivial(g, e, r, edges_from):
            return False, e
    return True, None


def k_simply_connected(g: PolygonalComplex, e: int, r: int, edges_from: str = "vertices") -> bool:
    return _k_trivial(g, e, r, edges_from)


def _path_endpoints(gamma) -> tuple[int, int] | None:
    if isinstance(gamma, (list, tuple)) and gamma and all(isinstance(x, int) for x in gamma):
        return gamma[0], gamma[-1]
    return None


def detour_path(
    g: PolygonalComplex,
    gamma: ChainLike,
    x0: int,
    r: int,
    endpoints: tuple[int, int] | None = None,
    edges_from: str = "vertices",
    endpoint_margin: int = 1,
) -> ClassMember | None:
    """A member of [gamma] avoiding the copath ball of radius ``r`` around ``x0``.

    ``gamma`` is a walk (edge sequence) or a chain with ``endpoints`` given.
    Raises PreconditionError when an endpoint lies within copath distance
    ``r + endpoint_margin`` of ``x0`` or K(x0, r+1) has nontrivial first
    (co)homology. With ``endpoint_margin=0`` an endpoint may sit right on
    the ball's rim, where it can be cut off from every other edge outside
    the ball and no detour exists. A None result under valid preconditions
    is a counterexample for the caller to report.
    """
    ends = endpoints or _path_endpoints(gamma)
    if ends is None:
        raise PreconditionError("endpoints required for a chain given as a mask")
    b = ball(g, x0, r)
    outer = ball(g, x0, r + endpoint_margin)
    bad = [e for e in ends if e in outer]
    if bad:
        raise PreconditionError(
            f"precondition: endpoint {bad[0]} lies within distance {r + endpoint_margin} of {x0}"
        )
    if not k_simply_connected(g, x0, r + 1, edges_from):
        raise PreconditionError(f"precondition: K({x0}, {r + 1}) is not simply connected")
    return class_member_avoiding(g, gamma, b)


@dataclass
class DetourCertificate:
    """Outcome of checking every simple path between edges outside a ball at once."""

    x0: int
    r: int
    holds: bool
    failing_cycle: int | None = None  # a cycle mask whose restriction cannot be removed
    failing_vertices: tuple[int, int] | None = None
    outside_vertices: int = 0
    checked_cycles: int = 0
    notes: list[str] = field(default_factory=list)


def detour_certificate(g: PolygonalComplex, x0: int, r: int, endpoint_margin: int = 1) -> DetourCertificate:
    """Decide the detour property for all simple paths between edges outside Ball(x0, r + endpoint_margin).

    Let S be the span of face boundaries restricted to the ball B. A simple
    path from e to f (both outside B) differs from a spanning-tree path
    between its outer endpoints by a cycle plus edges outside B. So every
    such path has a class member avoiding B when (a) every cycle restricted
    to B lies in S, and (b) the tree potential phi(v) = reduction of
    (tree path root->v) restricted to B is the same for all vertices touched
    by endpoint-eligible edges. Both conditions are linear and checked exactly; they
    are sufficient, and :func:`detour_path` cross-checks individual tuples.
    """
    b = ball(g, x0, r).mask
    faces = sorted(g.face_support(EdgeSet(b)))
    ech = Echelon(g.face_masks[f] & b for f in faces)
    cert = DetourCertificate(x0, r, True)

    d1, _ = boundary_matrices(g)
    cycles = kernel_basis(d1.columns())
    cert.checked_cycles = len(cycles)
    for z in cycles:
        if not ech.contains(z & b):
            cert.holds = False
            cert.failing_cycle = z
            return cert

    # spanning tree potentials, BFS from vertex 0 scanning edges in index order
    phi: dict[int, int] = {0: 0}
    order = [0]
    for v in order:
        for e in g.vertex_edges[v]:
            a, c = g.edges[e]
            w = c if a == v else a
            if w not in phi:
                step = phi[v] ^ ((1 << e) & b)
                phi[w] = ech.reduce_full(step)[0]
                order.append(w)
    eligible = g.all_edges() - ball(g, x0, r + endpoint_margin)
    outside = g.vertex_support(eligible)
    cert.outside_vertices = len(outside)
    ref_v = None
    for v in sorted(outside):
        if ref_v is None:
            ref_v = v
        elif phi[v] != phi[ref_v]:
            cert.holds = False
            cert.failing_vertices = (ref_v, v)
            return cert
    return cert


@dataclass(frozen=True)
class BoundaryCheck:
    precondition: bool
    connected: bool | None
    reason: str = ""
    components: int = 0


def connected_boundary_check(g: PolygonalComplex, e: int, r: int, edges_from: str = "faces") -> BoundaryCheck:
    """Whether supp d2(F') of K(e, r) is path connected, given its preconditions.

    Preconditions: K is copath connected and has H1(K) = 0. Copath
    connectivity is read on K's own faces, so edges of K outside every face
    count as separate components.
    """
    sub = subcomplex_K(g, e, r, edges_from)
    k = sub.complex
    if k.n_faces == 0:
        return BoundaryCheck(True, True, "no faces", 0)
    comps = copath_components(k, k.all_edges())
    if len(comps) != 1:
        return BoundaryCheck(False, None, f"K has {len(comps)} copath components")
    if homology(k).dims[1] != 0:
        return BoundaryCheck(False, None, "H1(K) != 0")
    bd = EdgeSet(face_chain_support(k, range(k.n_faces)))
    n = len(path_components(k, bd))
    return BoundaryCheck(True, n <= 1, "", n)
