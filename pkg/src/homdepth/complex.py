"""Polygonal complexes, closed surface complexes and their builders.

A complex is stored as plain index lists: ``n_vertices`` vertices, ``edges`` as
unordered vertex pairs, ``faces`` as cyclic sequences of edge indices. Every
other module indexes into these lists, so the indices are part of the public
contract and builders assign them deterministically.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Iterator, Sequence


class ComplexError(ValueError):
    """Raised for structurally malformed complexes (parse or construction)."""


class EdgeSet:
    """Immutable set of edge indices backed by an int bitmask."""

    __slots__ = ("mask", "_size")

    def __init__(self, mask: int = 0):
        if mask < 0:
            raise ValueError("mask must be non-negative")
        self.mask = mask
        self._size = mask.bit_count()

    @classmethod
    def of(cls, indices: Iterable[int]) -> "EdgeSet":
        m = 0
        for i in indices:
            m |= 1 << i
        return cls(m)

    @classmethod
    def full(cls, n: int) -> "EdgeSet":
        return cls((1 << n) - 1)

    def __len__(self) -> int:
        return self._size

    def __iter__(self) -> Iterator[int]:
        return iter_bits(self.mask)

    def __contains__(self, i: object) -> bool:
        return isinstance(i, int) and i >= 0 and bool(self.mask >> i & 1)

    def __bool__(self) -> bool:
        return self.mask != 0

    def __or__(self, other: "EdgeSet") -> "EdgeSet":
        return EdgeSet(self.mask | other.mask)

    def __and__(self, other: "EdgeSet") -> "EdgeSet":
        return EdgeSet(self.mask & other.mask)

    def __sub__(self, other: "EdgeSet") -> "EdgeSet":
        return EdgeSet(self.mask & ~other.mask)

    def __xor__(self, other: "EdgeSet") -> "EdgeSet":
        return EdgeSet(self.mask ^ other.mask)

    def __le__(self, other: "EdgeSet") -> bool:
        return self.mask & ~other.mask == 0

    def __ge__(self, other: "EdgeSet") -> bool:
        return other <= self

    def isdisjoint(self, other: "EdgeSet") -> bool:
        return self.mask & other.mask == 0

    def __eq__(self, other: object) -> bool:
        if isinstance(other, EdgeSet):
            return self.mask == other.mask
        if isinstance(other, (set, frozenset)):
            return set(self) == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.mask)

    def __repr__(self) -> str:
        return f"EdgeSet({sorted(self)})"

    def to_list(self) -> list[int]:
        return list(self)


def iter_bits(mask: int) -> Iterator[int]:
    """Yield set bit positions of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def bits_to_mask(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


@dataclass(frozen=True, eq=False)
class PolygonalComplex:
    """Vertex/edge/face incidence structure.

    Construction validates the polygonal-complex conditions: edges join two
    distinct vertices, no edge repeats, every face is a closed simple edge
    cycle of length at least three, and two distinct faces meet in nothing,
    a single vertex, or a single edge. Connectivity is *not* required here
    (local subcomplexes may be disconnected); :func:`validate_csc` checks it.
    """

    n_vertices: int
    edges: tuple[tuple[int, int], ...]
    faces: tuple[tuple[int, ...], ...]
    face_vertices: tuple[tuple[int, ...], ...] = field(init=False, repr=False)
    vertex_edges: tuple[tuple[int, ...], ...] = field(init=False, repr=False)
    vertex_faces: tuple[tuple[int, ...], ...] = field(init=False, repr=False)
    edge_faces: tuple[tuple[int, ...], ...] = field(init=False, repr=False)
    face_masks: tuple[int, ...] = field(init=False, repr=False)

    def __init__(self, n_vertices: int, edges: Sequence[Sequence[int]], faces: Sequence[Sequence[int]]):
        set_ = object.__setattr__
        set_(self, "n_vertices", int(n_vertices))
        set_(self, "edges", tuple((int(u), int(v)) for u, v in edges))
        set_(self, "faces", tuple(tuple(int(e) for e in f) for f in faces))
        self._validate_edges()
        set_(self, "face_vertices", tuple(self._face_cycle(i, f) for i, f in enumerate(self.faces)))

        v_edges: list[list[int]] = [[] for _ in range(self.n_vertices)]
        for i, (u, v) in enumerate(self.edges):
            v_edges[u].append(i)
            v_edges[v].append(i)
        e_faces: list[list[int]] = [[] for _ in self.edges]
        v_faces: list[list[int]] = [[] for _ in range(self.n_vertices)]
        for fi, f in enumerate(self.faces):
            for e in f:
                e_faces[e].append(fi)
            for v in self.face_vertices[fi]:
                v_faces[v].append(fi)
        set_(self, "vertex_edges", tuple(map(tuple, v_edges)))
        set_(self, "edge_faces", tuple(map(tuple, e_faces)))
        set_(self, "vertex_faces", tuple(map(tuple, v_faces)))
        set_(self, "face_masks", tuple(bits_to_mask(f) for f in self.faces))
        self._validate_face_pairs()

    # -- validation -----------------------------------------------------
    def _validate_edges(self) -> None:
        if self.n_vertices < 0:
            raise ComplexError("vertices: negative count")
        seen: dict[tuple[int, int], int] = {}
        for i, (u, v) in enumerate(self.edges):
            for w in (u, v):
                if not 0 <= w < self.n_vertices:
                    raise ComplexError(f"edges[{i}]: dangling index {w} (vertices={self.n_vertices})")
            if u == v:
                raise ComplexError(f"edges[{i}]: self-edge on vertex {u}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise ComplexError(f"edges[{i}]: duplicate edge, same as edges[{seen[key]}]")
            seen[key] = i

    def _face_cycle(self, fi: int, face: tuple[int, ...]) -> tuple[int, ...]:
        n_e = len(self.edges)
        k = len(face)
        for j, e in enumerate(face):
            if not 0 <= e < n_e:
                raise ComplexError(f"faces[{fi}][{j}]: dangling index {e} (edges={n_e})")
        if k < 3:
            raise ComplexError(f"faces[{fi}]: degenerate face with {k} edges")
        if len(set(face)) != k:
            raise ComplexError(f"faces[{fi}]: repeated edge")
        verts = []
        for j in range(k):
            a, b = self.edges[face[j - 1]], self.edges[face[j]]
            shared = set(a) & set(b)
            if len(shared) != 1:
                raise ComplexError(f"faces[{fi}][{j}]: edges {face[j - 1]} and {face[j]} are not consecutive in a cycle")
            verts.append(shared.pop())
        if len(set(verts)) != k:
            raise ComplexError(f"faces[{fi}]: cycle is not simple")
        for j in range(k):
            if set(self.edges[face[j]]) != {verts[j], verts[(j + 1) % k]}:
                raise ComplexError(f"faces[{fi}][{j}]: edge {face[j]} breaks the cycle")
        return tuple(verts)

    def _validate_face_pairs(self) -> None:
        checked = set()
        for v in range(self.n_vertices):
            fs = self.vertex_faces[v]
            for a in range(len(fs)):
                for b in range(a + 1, len(fs)):
                    pair = (fs[a], fs[b])
                    if pair in checked:
                        continue
                    checked.add(pair)
                    f1, f2 = pair
                    common_e = (self.face_masks[f1] & self.face_masks[f2]).bit_count()
                    common_v = len(set(self.face_vertices[f1]) & set(self.face_vertices[f2]))
                    ok = (common_e == 0 and common_v <= 1) or (common_e == 1 and common_v == 2)
                    if not ok:
                        raise ComplexError(
                            f"faces[{f1}] and faces[{f2}] intersect in {common_e} edges and {common_v} vertices"
                        )

    # -- accessors ------------------------------------------------------
    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    @property
    def euler_characteristic(self) -> int:
        return self.n_vertices - self.n_edges + self.n_faces

    def all_edges(self) -> EdgeSet:
        return EdgeSet.full(self.n_edges)

    def face_edge_set(self, f: int) -> EdgeSet:
        return EdgeSet(self.face_masks[f])

    def vertex_support(self, s: EdgeSet) -> set[int]:
        """V_X: vertices touched by an edge of ``s``."""
        return {w for e in s for w in self.edges[e]}

    def face_support(self, s: EdgeSet) -> set[int]:
        """F_X: faces containing an edge of ``s``."""
        return {f for e in s for f in self.edge_faces[e]}

    def edges_of_vertices(self, vs: Iterable[int]) -> EdgeSet:
        """E_Y for a vertex set Y."""
        return EdgeSet.of(e for v in vs for e in self.vertex_edges[v])

    def edges_of_faces(self, fs: Iterable[int]) -> EdgeSet:
        """E_Y' for a face set Y'."""
        m = 0
        for f in fs:
            m |= self.face_masks[f]
        return EdgeSet(m)

    def vertices_of_faces(self, fs: Iterable[int]) -> set[int]:
        return {v for f in fs for v in self.face_vertices[f]}

    def is_connected(self) -> bool:
        if self.n_vertices == 0:
            return True
        seen = {0}
        stack = [0]
        while stack:
            v = stack.pop()
            for e in self.vertex_edges[v]:
                for w in self.edges[e]:
                    if w not in seen:
                        seen.add(w)
                        stack.append(w)
        return len(seen) == self.n_vertices

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PolygonalComplex):
            return NotImplemented
        return (self.n_vertices, self.edges, self.faces) == (other.n_vertices, other.edges, other.faces)

    def __hash__(self) -> int:
        return hash((self.n_vertices, self.edges, self.faces))

    def __repr__(self) -> str:
        return f"PolygonalComplex(V={self.n_vertices}, E={self.n_edges}, F={self.n_faces})"

    def to_dict(self) -> dict:
        return {
            "vertices": self.n_vertices,
            "edges": [list(e) for e in self.edges],
            "faces": [list(f) for f in self.faces],
        }


# ---------------------------------------------------------------------------
# CSC validation


@dataclass(frozen=True)
class CscCertificate:
    is_csc: bool
    edge_orders: tuple[tuple[int, ...], ...] = ()
    face_orders: tuple[tuple[int, ...], ...] = ()
    witness: tuple[int, str] | None = None


def _vertex_fan(g: PolygonalComplex, v: int) -> tuple[tuple[int, ...], tuple[int, ...]] | str:
    """Cyclic (edges, faces) orderings around ``v`` or a failure reason."""
    ev, fv = g.vertex_edges[v], g.vertex_faces[v]
    if len(ev) != len(fv):
        return f"|E_v|={len(ev)} != |F_v|={len(fv)}"
    if len(ev) < 2:
        return f"|E_v|={len(ev)} < 2"
    for e in ev:
        if len(g.edge_faces[e]) != 2:
            return f"edge {e} lies in {len(g.edge_faces[e])} faces"
    ev_mask = bits_to_mask(ev)
    # walk the link: f_1 -e_1- f_2 -e_2- ... where e_i is the edge shared by f_i, f_{i+1}
    f_start = fv[0]
    faces_order: list[int] = []
    edges_order: list[int] = []
    f, e = f_start, min(iter_bits(g.face_masks[f_start] & ev_mask))
    for _ in range(len(fv)):
        faces_order.append(f)
        edges_order.append(e)
        a, b = g.edge_faces[e]
        f = b if a == f else a
        if f == f_start:
            break
        rest = list(iter_bits(g.face_masks[f] & ev_mask & ~(1 << e)))
        if len(rest) != 1:
            return f"face {f} does not pass through vertex along two edges"
        e = rest[0]
    if f != f_start or len(faces_order) != len(fv) or len(set(edges_order)) != len(ev):
        return "faces around vertex do not form a single cycle"
    k = len(fv)
    for i in range(k):
        for j in range(i + 1, k):
            common = g.face_masks[faces_order[i]] & g.face_masks[faces_order[j]]
            if j == i + 1 or (i == 0 and j == k - 1):
                expect = 1 << (edges_order[i] if j == i + 1 else edges_order[k - 1])
                if common != expect:
                    return f"faces {faces_order[i]},{faces_order[j]} do not meet exactly in the fan edge"
            elif common:
                return f"non-consecutive faces {faces_order[i]},{faces_order[j]} share an edge"
    return tuple(edges_order), tuple(faces_order)


@lru_cache(maxsize=128)
def validate_csc(g: PolygonalComplex) -> CscCertificate:
    """Check the closed-surface conditions at every vertex plus connectivity.

    Simple connectivity is a homological condition and is checked separately
    (``topology.homology``); this function only inspects local fans.
    """
    e_orders, f_orders = [], []
    for v in range(g.n_vertices):
        res = _vertex_fan(g, v)
        if isinstance(res, str):
            return CscCertificate(False, witness=(v, res))
        e_orders.append(res[0])
        f_orders.append(res[1])
    if not g.is_connected():
        return CscCertificate(False, witness=(0, "complex is not connected"))
    return CscCertificate(True, tuple(e_orders), tuple(f_orders))


def require_csc(g: PolygonalComplex) -> None:
    cert = validate_csc(g)
    if not cert.is_csc:
        raise ComplexError(f"not a closed surface complex: vertex {cert.witness[0]}: {cert.witness[1]}")


# ---------------------------------------------------------------------------
# builders


class _Indexer:
    def __init__(self):
        self.index: dict = {}

    def __call__(self, key) -> int:
        if key not in self.index:
            self.index[key] = len(self.index)
        return self.index[key]


# cube faces in documented order: +x, -x, +y, -y, +z, -z
_CUBE_FACES = ((0, 1), (0, 0), (1, 1), (1, 0), (2, 1), (2, 0))


def build_cube(n: int) -> PolygonalComplex:
    """Surface of an n x n x n cube tessellated by unit squares (T_n).

    Squares are visited in face order +x, -x, +y, -y, +z, -z and row-major
    within a face (rows along the lower free axis); vertices and edges take
    the index of their first visit, so a seam edge belongs to the
    lexicographically smallest (face, row, col) that contains it.
    """
    if n < 1:
        raise ValueError("cube size must be >= 1")
    vid, eid = _Indexer(), _Indexer()
    edges: list[tuple[int, int]] = []
    faces: list[list[int]] = []
    for axis, side in _CUBE_FACES:
        b, c = [a for a in range(3) if a != axis]
        fixed = n * side

        def point(i: int, j: int) -> tuple[int, int, int]:
            p = [0, 0, 0]
            p[axis], p[b], p[c] = fixed, i, j
            return tuple(p)

        for i in range(n):
            for j in range(n):
                corners = [point(i, j), point(i + 1, j), point(i + 1, j + 1), point(i, j + 1)]
                cyc = []
                for k in range(4):
                    p, q = corners[k], corners[(k + 1) % 4]
                    key = (min(p, q), max(p, q))
                    before = len(eid.index)
                    idx = eid(key)
                    if idx == before:
                        edges.append((vid(p), vid(q)))
                    cyc.append(idx)
                faces.append(cyc)
    return PolygonalComplex(len(vid.index), edges, faces)


def build_torus(n: int) -> PolygonalComplex:
    """n x n periodic square grid. Edge 2(i*n+j) is horizontal, 2(i*n+j)+1 vertical."""
    if n < 3:
        raise ValueError("torus size must be >= 3")

    def vert(i: int, j: int) -> int:
        return (i % n) * n + (j % n)

    def h(i: int, j: int) -> int:
        return 2 * vert(i, j)

    def v(i: int, j: int) -> int:
        return 2 * vert(i, j) + 1

    edges = []
    for i in range(n):
        for j in range(n):
            edges.append((vert(i, j), vert(i, j + 1)))
            edges.append((vert(i, j), vert(i + 1, j)))
    faces = [[h(i, j), v(i, j + 1), h(i + 1, j), v(i, j)] for i in range(n) for j in range(n)]
    return PolygonalComplex(n * n, edges, faces)


def build_tetrahedron() -> PolygonalComplex:
    edges = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
    faces = [[0, 3, 1], [0, 4, 2], [1, 5, 2], [3, 5, 4]]
    return PolygonalComplex(4, edges, faces)


# ---------------------------------------------------------------------------
# JSON I/O


def complex_from_dict(data: dict) -> PolygonalComplex:
    for key in ("vertices", "edges", "faces"):
        if key not in data:
            raise ComplexError(f"missing key {key!r}")
    if not isinstance(data["vertices"], int):
        raise ComplexError("vertices: expected an integer count")
    for i, e in enumerate(data["edges"]):
        if not (isinstance(e, list) and len(e) == 2 and all(isinstance(x, int) for x in e)):
            raise ComplexError(f"edges[{i}]: expected a pair of integers")
    for i, f in enumerate(data["faces"]):
        if not (isinstance(f, list) and all(isinstance(x, int) for x in f)):
            raise ComplexError(f"faces[{i}]: expected a list of edge indices")
    return PolygonalComplex(data["vertices"], data["edges"], data["faces"])


def dumps_complex(g: PolygonalComplex) -> str:
    return json.dumps(g.to_dict()) + "\n"


def save_complex(g: PolygonalComplex, path: str | Path) -> None:
    Path(path).write_text(dumps_complex(g), encoding="utf-8")


def load_complex(path: str | Path) -> PolygonalComplex:
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ComplexError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
    try:
        return complex_from_dict(data)
    except ComplexError as exc:
        raise ComplexError(f"{path}: {exc}") from exc
