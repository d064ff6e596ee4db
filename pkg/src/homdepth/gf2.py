"""Bit-packed linear algebra over GF(2).

Vectors are Python ints (bit i = coordinate i). A matrix is a list of row
ints plus a column count. Elimination picks the lowest set bit as pivot,
which keeps every result deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


def popcount(x: int) -> int:
    return x.bit_count()


def parity(x: int) -> int:
    return x.bit_count() & 1


@dataclass(frozen=True)
class Gf2Matrix:
    """Dense GF(2) matrix with rows stored as int bitmasks."""

    rows: tuple[int, ...]
    ncols: int

    @classmethod
    def from_rows(cls, rows: Iterable[int], ncols: int) -> "Gf2Matrix":
        rows = tuple(rows)
        limit = 1 << ncols
        for r in rows:
            if r < 0 or r >= limit:
                raise ValueError("row has bits beyond ncols")
        return cls(rows, ncols)

    @classmethod
    def from_array(cls, a) -> "Gf2Matrix":
        a = np.asarray(a, dtype=np.uint8) & 1
        nr, nc = a.shape
        rows = []
        for i in range(nr):
            idx = np.flatnonzero(a[i])
            m = 0
            for j in idx.tolist():
                m |= 1 << j
            rows.append(m)
        return cls(tuple(rows), nc)

    @classmethod
    def from_columns(cls, cols: Sequence[int], nrows: int) -> "Gf2Matrix":
        rows = [0] * nrows
        for j, c in enumerate(cols):
            while c:
                low = c & -c
                rows[low.bit_length() - 1] |= 1 << j
                c ^= low
        return cls(tuple(rows), len(cols))

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    def to_array(self) -> np.ndarray:
        out = np.zeros(self.shape, dtype=np.uint8)
        for i, r in enumerate(self.rows):
            j = 0
            while r:
                if r & 1:
                    out[i, j] = 1
                r >>= 1
                j += 1
        return out

    def transpose(self) -> "Gf2Matrix":
        return Gf2Matrix.from_columns(self.rows, self.ncols)

    @property
    def T(self) -> "Gf2Matrix":
        return self.transpose()

    def columns(self) -> list[int]:
        return list(self.transpose().rows)

    def matvec(self, v: int) -> int:
        out = 0
        for i, r in enumerate(self.rows):
            if parity(r & v):
                out |= 1 << i
        return out

    def __matmul__(self, other: "Gf2Matrix") -> "Gf2Matrix":
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        out = []
        for r in self.rows:
            acc = 0
            while r:
                low = r & -r
                acc ^= other.rows[low.bit_length() - 1]
                r ^= low
            out.append(acc)
        return Gf2Matrix(tuple(out), other.ncols)

    def is_zero(self) -> bool:
        return not any(self.rows)

    def rank(self) -> int:
        return Echelon(self.rows).rank

    def select_rows(self, idx: Iterable[int]) -> "Gf2Matrix":
        return Gf2Matrix(tuple(self.rows[i] for i in idx), self.ncols)

    def restrict_rows(self, mask: int) -> "Gf2Matrix":
        """Zero every row whose index is not in ``mask`` (shape unchanged)."""
        return Gf2Matrix(tuple(r if mask >> i & 1 else 0 for i, r in enumerate(self.rows)), self.ncols)


class Echelon:
    """Incremental basis of a span of int vectors, tracking combinations.

    ``add`` inserts vectors in order; a vector already in the span is not
    kept, so solutions expressed through ``solve`` only use independent
    inputs and set every dependent (free) input to zero.
    """

    def __init__(self, vectors: Iterable[int] = ()):
        self._pivots: dict[int, tuple[int, int]] = {}  # pivot bit -> (vector, combination)
        self._order: list[int] = []
        self.n_inputs = 0
        self.independent: list[int] = []
        self.kernel: list[int] = []  # input combinations summing to zero
        for v in vectors:
            self.add(v)

    @property
    def rank(self) -> int:
        return len(self._pivots)

    def add(self, v: int) -> bool:
        """Insert ``v``; return True if it enlarged the span."""
        idx = self.n_inputs
        self.n_inputs += 1
        res, combo = self.reduce_full(v)
        combo ^= 1 << idx
        if res == 0:
            self.kernel.append(combo)
            return False
        p = (res & -res).bit_length() - 1
        self._pivots[p] = (res, combo)
        self._order.append(p)
        self.independent.append(idx)
        return True

    def reduce_full(self, v: int) -> tuple[int, int]:
        """Fully reduce ``v`` against the basis: residual has no pivot bits."""
        combo = 0
        res = 0
        while v:
            low = v & -v
            hit = self._pivots.get(low.bit_length() - 1)
            if hit is None:
                res |= low
                v ^= low
            else:
                v ^= hit[0]
                combo ^= hit[1]
        return res, combo

    def contains(self, v: int) -> bool:
        return self.reduce_full(v)[0] == 0

    def solve(self, v: int) -> int | None:
        """Combination of inputs summing to ``v``, or None if ``v`` is outside the span."""
        res, combo = self.reduce_full(v)
        return combo if res == 0 else None

    def basis(self) -> list[int]:
        return [self._pivots[p][0] for p in self._order]


def rank(rows: Iterable[int]) -> int:
    return Echelon(rows).rank


def kernel_basis(columns: Sequence[int]) -> list[int]:
    """Basis of {w : sum_j w_j columns[j] = 0}, as masks over column indices."""
    return Echelon(columns).kernel


def complement_checks(basis_vectors: Sequence[int], nbits: int) -> list[int]:
    """Rows h spanning the annihilator of span(basis_vectors) within ``nbits`` coordinates.

    v lies in the span iff parity(h & v) == 0 for every returned h.
    """
    m = Gf2Matrix.from_columns(list(basis_vectors), nbits)  # nbits x k
    # annihilator = kernel of m^T acting on row vectors, i.e. combinations of rows of m summing to 0
    return kernel_basis(m.rows)
