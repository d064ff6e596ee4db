"""Surface codes on closed surface complexes, encoder synthesis and the
Pauli-level verification of the light-cone lemmas.

Star operators A_v put X on the edges at a vertex, plaquettes B_f put Z on
the edges of a face. Every check here is exact stabilizer arithmetic.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from math import comb
from typing import Sequence

import numpy as np

from .circuit import (
    Circuit,
    Gate,
    conjugated_support,
    effective_support_A,
    effective_support_B,
)
from .complex import EdgeSet, PolygonalComplex, bits_to_mask, iter_bits, require_csc
from .gf2 import Echelon
from .metric import edge_distance
from .pauli import Pauli, symplectic_vector
from .tableau import PauliTable, Tableau, displaced_states_equal, run_circuit, states_equal
from .topology import ChainLike, as_mask, class_member_within, cohomology_basis, homology_basis


class EncoderError(ValueError):
    pass


@dataclass(frozen=True)
class StabilizerGroupSpec:
    n: int
    generators: tuple[Pauli, ...]
    labels: tuple[str, ...]
    rank: int

    @property
    def logical_count(self) -> int:
        return self.n - self.rank

    @property
    def code_dimension(self) -> int:
        return 2**self.logical_count


def symplectic_rank(paulis: Sequence[Pauli]) -> int:
    return Echelon(symplectic_vector(p) for p in paulis).rank


def first_anticommuting_pair(paulis: Sequence[Pauli]) -> tuple[int, int] | None:
    for i in range(len(paulis)):
        for j in range(i + 1, len(paulis)):
            if not paulis[i].commutes(paulis[j]):
                return i, j
    return None


def star(g: PolygonalComplex, v: int) -> Pauli:
    return Pauli(g.n_edges, x=bits_to_mask(g.vertex_edges[v]))


def plaquette(g: PolygonalComplex, f: int) -> Pauli:
    return Pauli(g.n_edges, z=g.face_masks[f])


def surface_generators(g: PolygonalComplex) -> StabilizerGroupSpec:
    require_csc(g)
    gens = [star(g, v) for v in range(g.n_vertices)] + [plaquette(g, f) for f in range(g.n_faces)]
    labels = [f"A{v}" for v in range(g.n_vertices)] + [f"B{f}" for f in range(g.n_faces)]
    return StabilizerGroupSpec(g.n_edges, tuple(gens), tuple(labels), symplectic_rank(gens))


def logical_z_operators(g: PolygonalComplex) -> list[Pauli]:
    """Z on a cycle basis of first homology: commute with every star, not products of plaquettes."""
    return [Pauli.zs(g.n_edges, z) for z in homology_basis(g)]


def logical_x_operators(g: PolygonalComplex) -> list[Pauli]:
    """X on a cocycle basis of first cohomology."""
    return [Pauli.xs(g.n_edges, c) for c in cohomology_basis(g)]


def pinned_generators(g: PolygonalComplex, signs: Sequence[int] | None = None) -> StabilizerGroupSpec:
    """Surface generators plus logical Z operators with the given signs (default all +1)."""
    spec = surface_generators(g)
    lz = logical_z_operators(g)
    signs = list(signs) if signs is not None else [1] * len(lz)
    if len(signs) != len(lz):
        raise ValueError(f"expected {len(lz)} logical signs")
    extra = [p.with_sign(s) for p, s in zip(lz, signs)]
    gens = list(spec.generators) + extra
    labels = list(spec.labels) + [f"Zbar{i}" for i in range(len(extra))]
    return StabilizerGroupSpec(spec.n, tuple(gens), tuple(labels), symplectic_rank(gens))


def _single(name: str, q: int) -> Gate:
    return Gate(name, (q,))


def synthesize_encoder(generators: Sequence[Pauli], n: int) -> Circuit:
    """Clifford U with U|0^n> stabilized (+1) by every generator.

    The generators are reduced to single-qubit +Z operators by a Clifford
    C (conjugating as we go), then U = C^dagger. Redundant generators are
    accepted when consistent; anticommuting generators, a group that
    contains -I, or fewer than n independent generators raise EncoderError.
    """
    gens = list(generators)
    for p in gens:
        if p.n != n:
            raise EncoderError("generator qubit count differs from n")
        if not p.is_hermitian:
            raise EncoderError(f"generator {p} is not Hermitian")
    pair = first_anticommuting_pair(gens)
    if pair is not None:
        raise EncoderError(f"generators {pair[0]} and {pair[1]} anticommute")

    table = PauliTable.from_paulis(gens, n) if gens else None
    ops: list[Gate] = []

    def apply(gate: Gate) -> None:
        ops.append(gate)
        table.apply_gate(gate)

    pivots: dict[int, int] = {}  # qubit -> row
    for i in range(len(gens)):
        free = [q for q in np.flatnonzero(table.x[i] | table.z[i]).tolist() if q not in pivots]
        if not free:
            # supported on pivot qubits only, where it is Z-type: a product of earlier rows
            sel = np.zeros(len(gens), dtype=bool)
            for q in np.flatnonzero(table.z[i]).tolist():
                sel[pivots[q]] = True
            prod = table.product(sel)
            row = table.row(i)
            if (prod.x, prod.z) != (row.x, row.z):  # pragma: no cover - commutation forbids this
                raise AssertionError("dependent row does not factor over pivots")
            if (row.k - prod.k) % 4 != 0:
                raise EncoderError(f"generator {i} is inconsistent with earlier generators (-I in the group)")
            continue
        q = free[0]
        # map every free non-identity position to Z
        for r in free:
            xr, zr = table.x[i, r], table.z[i, r]
            if xr and zr:
                apply(_single("SDG", r))
                apply(_single("H", r))
            elif xr:
                apply(_single("H", r))
        for r in free[1:]:
            apply(Gate("CX", (r, q)))
        # Z on earlier pivots: multiply those rows in rather than touching pivot qubits
        zs = [p for p in np.flatnonzero(table.z[i]).tolist() if p in pivots]
        for p in zs:
            sel = np.zeros(len(gens), dtype=bool)
            sel[i] = True
            table.multiply_into(sel, pivots[p])
        pivots[q] = i
        others = table.z[:, q].astype(bool)
        others[i] = False
        table.multiply_into(others, i)
    if len(pivots) < n:
        raise EncoderError(f"generators have rank {len(pivots)} < {n}; pin the logical qubits first")
    for q, i in sorted(pivots.items()):
        if table.k[i] % 4 == 2:
            apply(_single("X", q))
    return Circuit.from_gates(n, ops).inverse()


def code_state_encoder(g: PolygonalComplex, signs: Sequence[int] | None = None) -> Circuit:
    """Encoder for the code state (logical Z operators pinned when the code is degenerate)."""
    spec = pinned_generators(g, signs)
    return synthesize_encoder(spec.generators, spec.n)


def css_encoder(g: PolygonalComplex, root: int = 0) -> Circuit:
    """Shallower encoder preparing prod_v (1 + A_v)|0^n> over a BFS spanning tree.

    Vertices are processed deepest first; each star fans out from the
    edge to its parent, which no earlier star has touched. The result is
    stabilized by every plaquette (|0^n> is) and every logical Z cycle,
    and its light cones stay far smaller than those of
    :func:`synthesize_encoder`.
    """
    require_csc(g)
    parent_edge: dict[int, int] = {}
    depth = {root: 0}
    queue = deque([root])
    order = []
    while queue:
        v = queue.popleft()
        order.append(v)
        for e in g.vertex_edges[v]:
            a, b = g.edges[e]
            w = b if a == v else a
            if w not in depth:
                depth[w] = depth[v] + 1
                parent_edge[w] = e
                queue.append(w)
    ops: list[Gate] = []
    for v in sorted((v for v in order if v != root), key=lambda v: -depth[v]):
        p = parent_edge[v]
        ops.append(_single("H", p))
        ops.extend(Gate("CX", (p, e)) for e in g.vertex_edges[v] if e != p)
    return Circuit.from_gates(g.n_edges, ops)


def is_code_state(g: PolygonalComplex, t: Tableau) -> bool:
    return all(t.stabilizes(p) for p in surface_generators(g).generators)


# ---------------------------------------------------------------------------
# anticommutation helpers


def coboundary_operator(g: PolygonalComplex, vertices: Sequence[int]) -> Pauli:
    """Product of stars over ``vertices``: X on the edges with one endpoint inside."""
    p = Pauli(g.n_edges)
    for v in vertices:
        p = p * star(g, v)
    return p


def stabilizing_candidates(g: PolygonalComplex, b: EdgeSet, rng: random.Random, count: int) -> list[Pauli]:
    """Operators in the code stabilizer group (Z-logicals included) supported outside ``b``.

    Mixes products of generators lying outside ``b``, coboundaries of unions
    of components of the graph (V, b) and Z on cycles of the graph
    (V, E minus b); the identity is always first.
    """
    n = g.n_edges
    outside = ((1 << n) - 1) & ~b.mask
    gens = [star(g, v) for v in range(g.n_vertices)] + [plaquette(g, f) for f in range(g.n_faces)]
    free = [p for p in gens if not (p.x | p.z) & b.mask]
    # vertex clusters joined by edges of b: their coboundaries avoid b
    seen: dict[int, int] = {}
    for v in range(g.n_vertices):
        if v in seen:
            continue
        seen[v] = v
        stack = [v]
        while stack:
            w = stack.pop()
            for e in g.vertex_edges[w]:
                if b.mask >> e & 1:
                    x, y = g.edges[e]
                    o = y if x == w else x
                    if o not in seen:
                        seen[o] = v
                        stack.append(o)
    clusters: dict[int, list[int]] = {}
    for v, c in seen.items():
        clusters.setdefault(c, []).append(v)
    cluster_list = list(clusters.values())
    # cycle space of the graph (V, E \ b) via the kernel of its boundary map
    cols = [(1 << g.edges[e][0]) | (1 << g.edges[e][1]) for e in iter_bits(outside)]
    ids = list(iter_bits(outside))
    ech = Echelon(cols)
    cycles = []
    for combo in ech.kernel:
        cycles.append(sum(1 << ids[i] for i in iter_bits(combo)))
    out = [Pauli(n)]
    seen_ops = {(0, 0)}
    kinds = [k for k, pool in (("gens", free), ("cobound", cluster_list), ("cycle", cycles)) if pool]
    attempts = 0
    while len(out) < count and kinds and attempts < 4 * count:
        kind = rng.choice(kinds)
        if kind == "gens":
            p = Pauli(n)
            for q in rng.sample(free, rng.randint(1, min(4, len(free)))):
                p = p * q
        elif kind == "cobound":
            chosen = [v for c in rng.sample(cluster_list, rng.randint(1, len(cluster_list))) for v in c]
            p = coboundary_operator(g, chosen)
        else:
            z = 0
            for c in rng.sample(cycles, rng.randint(1, min(3, len(cycles)))):
                z ^= c
            p = Pauli.zs(n, z)
            if free and rng.random() < 0.5:
                p = p * rng.choice(free)
        attempts += 1
        if (p.x, p.z) not in seen_ops:
            seen_ops.add((p.x, p.z))
            out.append(p)
    return out


# ---------------------------------------------------------------------------
# commuting-operator lemma


@dataclass
class ComutResult:
    status: str  # "verified", "violated" or "precondition"
    premise: str = ""
    detail: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status == "verified"


def verify_comut_op(
    g: PolygonalComplex,
    u: Circuit,
    gamma: ChainLike,
    p: Pauli,
    tableau: Tableau | None = None,
    b: EdgeSet | None = None,
) -> ComutResult:
    """Check P gamma_Z |psi> == gamma_Z P |psi> for psi = U|0^n>.

    Premises (each reported separately when it fails): psi is a code state,
    P stabilizes psi, supp(P) avoids the upper effective support B. The
    equality is decided exactly, global sign included, as
    (gamma_Z P)^dagger (P gamma_Z) stabilizing psi.
    """
    t = tableau if tableau is not None else run_circuit(u)
    if not is_code_state(g, t):
        return ComutResult("precondition", "psi is not a code state")
    if not t.stabilizes(p):
        return ComutResult("precondition", "P does not stabilize psi")
    if b is None:
        b = effective_support_B(g, u, gamma)
    if (p.x | p.z) & b.mask:
        return ComutResult("precondition", "supp(P) meets B", {"overlap": sorted(EdgeSet((p.x | p.z) & b.mask))})
    gz = Pauli.zs(g.n_edges, as_mask(gamma))
    lhs, rhs = p * gz, gz * p
    equal = displaced_states_equal(t, lhs, rhs)
    # up to global phase the two states always agree; kept as a sanity check
    phase_free = states_equal(t.copy().apply_pauli(lhs), t.copy().apply_pauli(rhs))
    detail = {"weight": p.weight, "B": len(b), "phase_free_equal": phase_free}
    return ComutResult("verified" if equal else "violated", "", detail)


# ---------------------------------------------------------------------------
# large effective support


@dataclass
class LargeBResult:
    status: str  # "verified" or "violated"
    member: EdgeSet | None
    size_A: int
    size_B: int
    distance: int
    c: int
    depth: int
    checks: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status == "verified"


def verify_large_B(
    g: PolygonalComplex,
    u: Circuit,
    gamma: ChainLike,
    e: int,
    f: int,
    b_override: EdgeSet | None = None,
    check_code_state: bool = True,
) -> LargeBResult:
    """Find a class member inside B and check |B| >= d(e, f) and |A| >= d(e, f) / c^d.

    ``b_override`` replaces the computed B (used to exercise the failure path).
    """
    if check_code_state and not is_code_state(g, run_circuit(u)):
        raise ValueError("precondition: circuit output is not a code state")
    a = effective_support_A(g, u, gamma)
    b = effective_support_B(g, u, gamma, a) if b_override is None else b_override
    d = edge_distance(g, e, f, "path")
    c, depth = u.locality, u.depth
    member = class_member_within(g, gamma, b)
    checks = {
        "member_in_B": member is not None,
        "B_at_least_distance": len(b) >= d,
        # |A| * c^d >= d, kept in integers
        "A_at_least_distance_over_cd": len(a) * c**depth >= d,
        "e_in_A": e in a,
        "f_in_A": f in a,
    }
    core = ("member_in_B", "B_at_least_distance", "A_at_least_distance_over_cd")
    status = "verified" if all(checks[k] for k in core) else "violated"
    return LargeBResult(status, member.chain if member else None, len(a), len(b), d, c, depth, checks)


# ---------------------------------------------------------------------------
# commuting local Hamiltonian of a Clifford circuit


@dataclass
class ParentHamiltonian:
    terms: list[Pauli]
    supports: list[EdgeSet]
    checks: dict

    @property
    def ok(self) -> bool:
        return all(self.checks.values())


def appendix_a_hamiltonian(u: Circuit) -> ParentHamiltonian:
    """Terms H_i = U Z_i U^dagger of K = -sum_i H_i, with the exact checks.

    For n independent commuting +-1 terms the spectrum of K is
    {-n + 2m : m = number of violated terms}, every m attainable, so the
    ground state is unique with energy -n and the gap is exactly 2.
    """
    n = u.n_qubits
    t = run_circuit(u)
    terms = t.stabilizers()
    supports = [p.support for p in terms]
    bound = u.locality**u.depth
    commuting = first_anticommuting_pair(terms) is None
    rank = symplectic_rank(terms)
    energies = [t.expectation_sign(p) for p in terms]
    cones_ok = all(supports[i] <= conjugated_support(u, Pauli.zs(n, [i])) for i in range(n))
    # direct conjugation agrees with the tableau rows
    direct_ok = all(Pauli.zs(n, [i]).conjugate_circuit(u) == terms[i] for i in range(n)) if n <= 64 else True
    ground_energy = -sum(energies)
    unique = commuting and rank == n
    checks = {
        "commuting": commuting,
        "support_bound": all(len(s) <= bound for s in supports),
        "support_within_cone": cones_ok,
        "conjugation_matches": direct_ok,
        "ground_energy": ground_energy == -n,
        "unique_ground_state": unique,
        "gap_two": unique,  # levels -n + 2m with m = 0, 1, ... are all present
    }
    return ParentHamiltonian(terms, supports, checks)


def spectrum_levels(n: int) -> list[tuple[int, int]]:
    """(energy, degeneracy) of -sum of n independent commuting +-1 terms."""
    return [(-n + 2 * m, comb(n, m)) for m in range(n + 1)]
