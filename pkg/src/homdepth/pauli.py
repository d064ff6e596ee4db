"""Pauli operators as P = i^k X^x Z^z with integer bitmasks.

X^x means the product of X on every qubit set in ``x``, and likewise for Z,
with all X factors written to the left of all Z factors. Under this
convention Y = i X Z, so a Y on one qubit is (k=1, x=1, z=1).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .complex import EdgeSet

_LETTER = {(0, 0): "I", (1, 0): "X", (0, 1): "Z", (1, 1): "Y"}


def _pc(m: int) -> int:
    return m.bit_count()


@dataclass(frozen=True)
class Pauli:
    n: int
    x: int = 0
    z: int = 0
    k: int = 0

    def __post_init__(self):
        object.__setattr__(self, "k", self.k % 4)
        limit = 1 << self.n
        if self.x < 0 or self.z < 0 or self.x >= limit or self.z >= limit:
            raise ValueError("mask exceeds qubit count")

    # -- constructors ----------------------------------------------------
    @classmethod
    def identity(cls, n: int) -> "Pauli":
        return cls(n)

    @classmethod
    def from_label(cls, label: str) -> "Pauli":
        """Parse e.g. '-XIZY' or '+iZZ'; character j acts on qubit j."""
        k = 0
        s = label
        if s.startswith("+"):
            s = s[1:]
        elif s.startswith("-"):
            k += 2
            s = s[1:]
        if s.startswith("i"):
            k += 1
            s = s[1:]
        x = z = 0
        for j, ch in enumerate(s):
            if ch in "XY":
                x |= 1 << j
            if ch in "ZY":
                z |= 1 << j
            if ch == "Y":
                k += 1
            elif ch not in "IXZ":
                raise ValueError(f"bad Pauli letter {ch!r}")
        return cls(len(s), x, z, k)

    @classmethod
    def from_sparse(cls, n: int, ops: Mapping[int, str], sign: int = 1) -> "Pauli":
        x = z = 0
        k = 0 if sign == 1 else 2
        for q, ch in ops.items():
            if ch in "XY":
                x |= 1 << q
            if ch in "ZY":
                z |= 1 << q
            if ch == "Y":
                k += 1
        return cls(n, x, z, k)

    @classmethod
    def xs(cls, n: int, qubits: EdgeSet | Iterable[int] | int) -> "Pauli":
        """X on every listed qubit (the X-type operator of an edge set)."""
        return cls(n, x=_mask(qubits))

    @classmethod
    def zs(cls, n: int, qubits: EdgeSet | Iterable[int] | int) -> "Pauli":
        return cls(n, z=_mask(qubits))

    # -- algebra ---------------------------------------------------------
    def __mul__(self, other: "Pauli") -> "Pauli":
        if self.n != other.n:
            raise ValueError("qubit counts differ")
        k = self.k + other.k + 2 * _pc(self.z & other.x)
        return Pauli(self.n, self.x ^ other.x, self.z ^ other.z, k)

    def dagger(self) -> "Pauli":
        return Pauli(self.n, self.x, self.z, -self.k + 2 * _pc(self.x & self.z))

    def commutes(self, other: "Pauli") -> bool:
        return (_pc(self.x & other.z) + _pc(self.z & other.x)) % 2 == 0

    @property
    def is_hermitian(self) -> bool:
        return (self.k - _pc(self.x & self.z)) % 2 == 0

    @property
    def sign(self) -> int:
        """+1 or -1 for Hermitian operators written with Y letters."""
        if not self.is_hermitian:
            raise ValueError("sign is only defined for Hermitian Paulis")
        return 1 if (self.k - _pc(self.x & self.z)) % 4 == 0 else -1

    def with_sign(self, sign: int) -> "Pauli":
        base = _pc(self.x & self.z)
        return Pauli(self.n, self.x, self.z, base + (0 if sign == 1 else 2))

    def negate(self) -> "Pauli":
        return Pauli(self.n, self.x, self.z, self.k + 2)

    @property
    def support(self) -> EdgeSet:
        return EdgeSet(self.x | self.z)

    @property
    def weight(self) -> int:
        return _pc(self.x | self.z)

    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    def letters(self) -> str:
        return "".join(_LETTER[(self.x >> j & 1, self.z >> j & 1)] for j in range(self.n))

    def label(self) -> str:
        if self.is_hermitian:
            return ("+" if self.sign == 1 else "-") + self.letters()
        s = (self.k - _pc(self.x & self.z)) % 4
        return ("+i" if s == 1 else "-i") + self.letters()

    def restrict(self, keep: Iterable[int]) -> "Pauli":
        """Tensor factor on ``keep`` (in that order), keeping the Y-aware sign."""
        keep = list(keep)
        x = z = 0
        for j, q in enumerate(keep):
            if self.x >> q & 1:
                x |= 1 << j
            if self.z >> q & 1:
                z |= 1 << j
        outside = ~_mask(keep)
        if (self.x | self.z) & outside:
            raise ValueError("operator acts outside the kept qubits")
        # the Y-aware sign does not depend on qubit order
        return Pauli(len(keep), x, z, self.k - _pc(self.x & self.z) + _pc(x & z))

    def conjugate(self, name: str, qubits: tuple[int, ...]) -> "Pauli":
        """U P U^dagger for a primitive Clifford U."""
        x, z, k = self.x, self.z, self.k
        if name == "I":
            return self
        if name in ("CX", "CZ", "SWAP"):
            a, b = qubits
            xa, xb, za, zb = x >> a & 1, x >> b & 1, z >> a & 1, z >> b & 1
            if name == "CX":
                x ^= xa << b
                z ^= zb << a
            elif name == "CZ":
                k += 2 * (xa & xb)
                z ^= (xb << a) | (xa << b)
            else:
                if xa != xb:
                    x ^= (1 << a) | (1 << b)
                if za != zb:
                    z ^= (1 << a) | (1 << b)
            return Pauli(self.n, x, z, k)
        (a,) = qubits
        xa, za = x >> a & 1, z >> a & 1
        if name == "H":
            k += 2 * (xa & za)
            if xa != za:
                x ^= 1 << a
                z ^= 1 << a
        elif name == "S":
            k += xa
            z ^= xa << a
        elif name == "SDG":
            k += 3 * xa
            z ^= xa << a
        elif name == "X":
            k += 2 * za
        elif name == "Z":
            k += 2 * xa
        elif name == "Y":
            k += 2 * (xa ^ za)
        else:
            raise ValueError(f"not a Clifford primitive: {name!r}")
        return Pauli(self.n, x, z, k)

    def conjugate_circuit(self, u) -> "Pauli":
        """U P U^dagger for a whole circuit (layers applied in order)."""
        p = self
        for gate in u.gates():
            for name, qs in gate.primitives():
                p = p.conjugate(name, qs)
        return p

    def __repr__(self) -> str:
        return f"Pauli({self.label()})"


def _mask(qubits) -> int:
    if isinstance(qubits, EdgeSet):
        return qubits.mask
    if isinstance(qubits, int):
        return qubits
    m = 0
    for q in qubits:
        m |= 1 << q
    return m


def symplectic_vector(p: Pauli) -> int:
    """x | z << n, the phase-free GF(2) image used for rank computations."""
    return p.x | (p.z << p.n)


def intersection_parity(a: EdgeSet, b: EdgeSet) -> int:
    """|a & b| mod 2; odd means Z on a and X on b anticommute."""
    return (a.mask & b.mask).bit_count() & 1
