"""Stabilizer tableau simulation with exact phases.

Rows use the same convention as :class:`Pauli`: i^k X^x Z^z. A
:class:`PauliTable` is a stack of such rows held in numpy arrays so a gate
is a handful of column operations. :class:`Tableau` keeps n destabilizer
rows above n stabilizer rows, starting from |0...0>.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .circuit import Circuit, Gate
from .dense import pauli_matrix
from .gf2 import Echelon
from .pauli import Pauli


class NonCliffordError(ValueError):
    pass


def mask_to_bits(m: int, n: int) -> np.ndarray:
    if n == 0:
        return np.zeros(0, dtype=np.uint8)
    raw = np.frombuffer(m.to_bytes((n + 7) // 8, "little"), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little")[:n].copy()


def bits_to_int(bits: np.ndarray) -> int:
    if bits.size == 0:
        return 0
    return int.from_bytes(np.packbits(bits.astype(np.uint8), bitorder="little").tobytes(), "little")


class PauliTable:
    """Mutable stack of Pauli rows with vectorized Clifford conjugation."""

    def __init__(self, x: np.ndarray, z: np.ndarray, k: np.ndarray):
        self.x = np.asarray(x, dtype=np.uint8)
        self.z = np.asarray(z, dtype=np.uint8)
        self.k = np.asarray(k, dtype=np.int64) % 4
        self.n = self.x.shape[1]

    @classmethod
    def from_paulis(cls, paulis: Sequence[Pauli], n: int) -> "PauliTable":
        m = len(paulis)
        x = np.zeros((m, n), dtype=np.uint8)
        z = np.zeros((m, n), dtype=np.uint8)
        k = np.zeros(m, dtype=np.int64)
        for i, p in enumerate(paulis):
            if p.n != n:
                raise ValueError("qubit count mismatch")
            x[i] = mask_to_bits(p.x, n)
            z[i] = mask_to_bits(p.z, n)
            k[i] = p.k
        return cls(x, z, k)

    def copy(self) -> "PauliTable":
        return PauliTable(self.x.copy(), self.z.copy(), self.k.copy())

    def __len__(self) -> int:
        return self.x.shape[0]

    def row(self, i: int) -> Pauli:
        return Pauli(self.n, bits_to_int(self.x[i]), bits_to_int(self.z[i]), int(self.k[i]))

    def rows(self) -> list[Pauli]:
        return [self.row(i) for i in range(len(self))]

    # -- conjugation -----------------------------------------------------
    def apply(self, name: str, qubits: tuple[int, ...]) -> None:
        x, z = self.x, self.z
        if name == "I":
            return
        if name == "CX":
            c, t = qubits
            x[:, t] ^= x[:, c]
            z[:, c] ^= z[:, t]
            return
        if name == "CZ":
            a, b = qubits
            self.k += 2 * (x[:, a] & x[:, b])
            z[:, a] ^= x[:, b]
            z[:, b] ^= x[:, a]
            self.k %= 4
            return
        if name == "SWAP":
            a, b = qubits
            x[:, [a, b]] = x[:, [b, a]]
            z[:, [a, b]] = z[:, [b, a]]
            return
        if len(qubits) != 1:
            raise NonCliffordError(f"unsupported gate {name}{list(qubits)}")
        (a,) = qubits
        xa, za = x[:, a], z[:, a]
        if name == "H":
            self.k += 2 * (xa & za)
            tmp = xa.copy()
            x[:, a] = za
            z[:, a] = tmp
        elif name == "S":
            self.k += xa
            z[:, a] ^= xa
        elif name == "SDG":
            self.k += 3 * xa
            z[:, a] ^= xa
        elif name == "X":
            self.k += 2 * za
        elif name == "Z":
            self.k += 2 * xa
        elif name == "Y":
            self.k += 2 * (xa ^ za)
        else:
            raise NonCliffordError(f"not a Clifford primitive: {name!r}")
        self.k %= 4

    def apply_gate(self, gate: Gate) -> None:
        for name, qs in gate.primitives():
            self.apply(name, qs)

    def apply_circuit(self, u: Circuit) -> None:
        if u.n_qubits != self.n:
            raise ValueError(f"circuit has {u.n_qubits} qubits, table has {self.n}")
        for gate in u.gates():
            self.apply_gate(gate)

    # -- row arithmetic --------------------------------------------------
    def anticommutes_with(self, p: Pauli) -> np.ndarray:
        px = mask_to_bits(p.x, self.n)
        pz = mask_to_bits(p.z, self.n)
        return ((self.x @ pz + self.z @ px) & 1).astype(bool) if self.n else np.zeros(len(self), bool)

    def product(self, select: np.ndarray) -> Pauli:
        """Ordered product of the selected rows (lowest index leftmost)."""
        idx = np.flatnonzero(select)
        if idx.size == 0:
            return Pauli(self.n)
        xs, zs = self.x[idx], self.z[idx]
        # z accumulated over earlier rows, XOR-prefix
        zprefix = np.bitwise_xor.accumulate(zs, axis=0)
        cross = (zprefix[:-1] & xs[1:]).sum(axis=1) if idx.size > 1 else np.zeros(0, dtype=np.int64)
        k = int(self.k[idx].sum()) + 2 * int(cross.sum())
        return Pauli(self.n, bits_to_int(np.bitwise_xor.reduce(xs, axis=0)), bits_to_int(zprefix[-1]), k)

    def multiply_into(self, targets: np.ndarray, i: int) -> None:
        """row_j <- row_j * row_i for every selected j."""
        j = np.flatnonzero(targets)
        if j.size == 0:
            return
        cross = (self.z[j] & self.x[i]).sum(axis=1)
        self.k[j] = (self.k[j] + self.k[i] + 2 * cross) % 4
        self.x[j] ^= self.x[i]
        self.z[j] ^= self.z[i]


@dataclass
class Tableau:
    """Destabilizer rows 0..n-1 and stabilizer rows n..2n-1 of a pure stabilizer state."""

    table: PauliTable

    @classmethod
    def zero_state(cls, n: int) -> "Tableau":
        eye = np.eye(n, dtype=np.uint8)
        zero = np.zeros((n, n), dtype=np.uint8)
        x = np.vstack([eye, zero])
        z = np.vstack([zero, eye])
        return cls(PauliTable(x, z, np.zeros(2 * n, dtype=np.int64)))

    @property
    def n(self) -> int:
        return self.table.n

    def copy(self) -> "Tableau":
        return Tableau(self.table.copy())

    def apply_circuit(self, u: Circuit) -> "Tableau":
        self.table.apply_circuit(u)
        return self

    def apply_pauli(self, p: Pauli) -> "Tableau":
        """State p|psi>: rows anticommuting with p change sign."""
        flip = self.table.anticommutes_with(p)
        self.table.k = (self.table.k + 2 * flip) % 4
        return self

    def stabilizers(self) -> list[Pauli]:
        return [self.table.row(i) for i in range(self.n, 2 * self.n)]

    def destabilizers(self) -> list[Pauli]:
        return [self.table.row(i) for i in range(self.n)]

    def expectation_sign(self, p: Pauli) -> int:
        """+1 or -1 if +-p is in the stabilizer group, 0 otherwise (expectation value)."""
        if not p.is_hermitian:
            raise ValueError("expected a Hermitian Pauli")
        n = self.n
        anti = self.table.anticommutes_with(p)
        if anti[n:].any():
            return 0
        sel = np.zeros(2 * n, dtype=bool)
        sel[n:] = anti[:n]
        prod = self.table.product(sel)
        if prod.x != p.x or prod.z != p.z:  # pragma: no cover - tableau invariant
            raise AssertionError("stabilizer decomposition mismatch")
        diff = (p.k - prod.k) % 4
        if diff == 0:
            return 1
        if diff == 2:
            return -1
        raise AssertionError("non-Hermitian product of stabilizers")  # pragma: no cover

    def stabilizes(self, p: Pauli) -> bool:
        """Exact p|psi> == +|psi> (sign included)."""
        if not p.is_hermitian:
            return False
        return self.expectation_sign(p) == 1

    def canonical_form(self) -> tuple[tuple[int, int, int], ...]:
        """Reduced row echelon form of the stabilizer rows, phases included."""
        rows = self.stabilizers()
        n = self.n
        pivot_row = 0
        # columns ordered x_0..x_{n-1}, z_0..z_{n-1}
        for col in range(2 * n):
            bit_of = (lambda p, c=col: p.x >> c & 1) if col < n else (lambda p, c=col - n: p.z >> c & 1)
            hit = next((i for i in range(pivot_row, len(rows)) if bit_of(rows[i])), None)
            if hit is None:
                continue
            rows[pivot_row], rows[hit] = rows[hit], rows[pivot_row]
            for i in range(len(rows)):
                if i != pivot_row and bit_of(rows[i]):
                    rows[i] = rows[i] * rows[pivot_row]
            pivot_row += 1
        return tuple((p.x, p.z, p.k) for p in rows)


def run_circuit(u: Circuit) -> Tableau:
    """Tableau of U|0^n>."""
    return Tableau.zero_state(u.n_qubits).apply_circuit(u)


def states_equal(a: Tableau, b: Tableau) -> bool:
    return a.n == b.n and a.canonical_form() == b.canonical_form()


def displaced_states_equal(t: Tableau, q1: Pauli, q2: Pauli) -> bool:
    """Whether q1|psi> == q2|psi>, via q2^dagger q1 stabilizing |psi> with +1."""
    m = q2.dagger() * q1
    if not m.is_hermitian:
        return False
    return t.stabilizes(m)


def stabilizer_rdm(t: Tableau, keep: Sequence[int]) -> np.ndarray:
    """Reduced density matrix on ``keep`` (first listed qubit most significant).

    rho_K = 2^-|K| * sum of the stabilizer group elements supported in K,
    restricted to K. The subgroup is found as the kernel of the generator
    components outside K.
    """
    keep = list(keep)
    n = t.n
    gens = t.stabilizers()
    outside = ((1 << n) - 1) & ~sum(1 << q for q in keep)
    vecs = [(p.x & outside) | ((p.z & outside) << n) for p in gens]
    ech = Echelon(vecs)
    basis = ech.kernel  # combinations of generators with no support outside K
    sub = [Pauli(n)]
    for combo in basis:
        g = Pauli(n)
        for i in range(len(gens)):
            if combo >> i & 1:
                g = g * gens[i]
        sub = sub + [g * s for s in sub]
    dim = 2 ** len(keep)
    rho = np.zeros((dim, dim), dtype=complex)
    for g in sub:
        rho += pauli_matrix(g.restrict(keep))
    return rho / dim
