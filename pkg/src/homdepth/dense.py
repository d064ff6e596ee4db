"""Small dense state-vector engine (at most 14 qubits).

Qubit 0 is the most significant bit of a basis index, so a state of n
qubits reshapes to an n-axis tensor whose axis j is qubit j.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .circuit import Circuit
from .pauli import Pauli

MAX_QUBITS = 14
NORM_TOL = 1e-12

_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
_S = np.diag([1, 1j]).astype(complex)
_SDG = np.diag([1, -1j]).astype(complex)
_CX = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
_CZ = np.diag([1, 1, 1, -1]).astype(complex)
_SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)

GATE_MATRICES = {
    "I": _I2,
    "X": _X,
    "Y": _Y,
    "Z": _Z,
    "H": _H,
    "S": _S,
    "SDG": _SDG,
    "CX": _CX,
    "CZ": _CZ,
    "SWAP": _SWAP,
}


class DenseSizeError(ValueError):
    pass


def _check_size(n: int) -> None:
    if n > MAX_QUBITS:
        raise DenseSizeError(f"{n} qubits exceeds the dense limit of {MAX_QUBITS}")


@dataclass
class DenseState:
    n: int
    amp: np.ndarray = field(repr=False)

    def __post_init__(self):
        _check_size(self.n)
        self.amp = np.asarray(self.amp, dtype=complex).reshape(2**self.n)
        norm = np.linalg.norm(self.amp)
        if abs(norm - 1) > 1e-10:
            raise ValueError(f"state norm {norm} differs from 1")

    @classmethod
    def zero(cls, n: int) -> "DenseState":
        _check_size(n)
        a = np.zeros(2**n, dtype=complex)
        a[0] = 1
        return cls(n, a)

    @classmethod
    def basis(cls, n: int, index: int) -> "DenseState":
        _check_size(n)
        a = np.zeros(2**n, dtype=complex)
        a[index] = 1
        return cls(n, a)

    def copy(self) -> "DenseState":
        return DenseState(self.n, self.amp.copy())

    def apply_matrix(self, m: np.ndarray, qubits: Sequence[int]) -> "DenseState":
        k = len(qubits)
        psi = self.amp.reshape((2,) * self.n)
        mt = np.asarray(m, dtype=complex).reshape((2,) * (2 * k))
        out = np.tensordot(mt, psi, axes=(list(range(k, 2 * k)), list(qubits)))
        # tensordot puts the gate's output axes first; move them back into place
        out = np.moveaxis(out, list(range(k)), list(qubits))
        self.amp = out.reshape(2**self.n)
        return self

    def apply_gate(self, name: str, qubits: Sequence[int]) -> "DenseState":
        return self.apply_matrix(GATE_MATRICES[name], qubits)

    def apply_circuit(self, u: Circuit) -> "DenseState":
        if u.n_qubits != self.n:
            raise ValueError("qubit count mismatch")
        for gate in u.gates():
            for name, qs in gate.primitives():
                self.apply_gate(name, qs)
        return self

    def apply_pauli(self, p: Pauli) -> "DenseState":
        self.amp = pauli_matrix(p) @ self.amp
        return self

    def norm(self) -> float:
        return float(np.linalg.norm(self.amp))

    def density_matrix(self) -> np.ndarray:
        return np.outer(self.amp, self.amp.conj())

    def expectation(self, op: np.ndarray) -> complex:
        return complex(self.amp.conj() @ (op @ self.amp))


def simulate(u: Circuit) -> DenseState:
    """U|0^n> as a dense vector."""
    return DenseState.zero(u.n_qubits).apply_circuit(u)


def kron_all(mats: Iterable[np.ndarray]) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for m in mats:
        out = np.kron(out, m)
    return out


def pauli_matrix(p: Pauli) -> np.ndarray:
    """Dense matrix of i^k X^x Z^z (qubit 0 most significant)."""
    _check_size(p.n)
    factors = []
    for j in range(p.n):
        xj, zj = p.x >> j & 1, p.z >> j & 1
        m = _I2
        if xj:
            m = _X
        if zj:
            m = m @ _Z
        factors.append(m)
    return (1j**p.k) * kron_all(factors)


def overlap(a: DenseState, b: DenseState) -> complex:
    """<a|b>."""
    if a.n != b.n:
        raise ValueError(f"dimension mismatch: {a.n} vs {b.n} qubits")
    return complex(np.vdot(a.amp, b.amp))


def fidelity_with_projector(s: DenseState, stabilizers: Sequence[Pauli]) -> float:
    """||P psi||^2 for P the projector onto the joint +1 eigenspace."""
    v = s.amp.copy()
    for g in stabilizers:
        v = 0.5 * (v + pauli_matrix(g) @ v)
    return float(np.vdot(v, v).real)


# ---------------------------------------------------------------------------
# reduced density matrices


def rdm(s: DenseState | np.ndarray, keep: Sequence[int], n: int | None = None) -> np.ndarray:
    """Partial trace onto ``keep`` (in the listed order) of a pure state or density matrix."""
    keep = list(keep)
    if len(set(keep)) != len(keep):
        raise ValueError("repeated qubit in keep")
    if isinstance(s, DenseState):
        n = s.n
        rest = [q for q in range(n) if q not in keep]
        psi = s.amp.reshape((2,) * n).transpose(keep + rest).reshape(2 ** len(keep), 2 ** len(rest))
        return psi @ psi.conj().T
    rho = np.asarray(s, dtype=complex)
    if n is None:
        n = int(round(math.log2(rho.shape[0])))
    rest = [q for q in range(n) if q not in keep]
    t = rho.reshape((2,) * (2 * n))
    # move kept row axes, kept column axes, then contract the rest pairwise
    perm = keep + rest + [n + q for q in keep] + [n + q for q in rest]
    t = t.transpose(perm).reshape(2 ** len(keep), 2 ** len(rest), 2 ** len(keep), 2 ** len(rest))
    return np.einsum("arbr->ab", t)


def trace_distance(a: np.ndarray, b: np.ndarray) -> float:
    ev = np.linalg.eigvalsh((a - b + (a - b).conj().T) / 2)
    return float(0.5 * np.abs(ev).sum())


def correlation_check(s: DenseState, i: int, j: int) -> float:
    """Trace distance between rho_ij and rho_i (x) rho_j."""
    rij = rdm(s, [i, j])
    return trace_distance(rij, np.kron(rdm(s, [i]), rdm(s, [j])))


# ---------------------------------------------------------------------------
# k-local operators


@dataclass(frozen=True)
class DenseOperator:
    """Sum of real-weighted Pauli terms."""

    n: int
    terms: tuple[tuple[float, Pauli], ...]

    def locality(self) -> int:
        return max((p.weight for _, p in self.terms), default=0)

    def matrix(self) -> np.ndarray:
        _check_size(self.n)
        m = np.zeros((2**self.n, 2**self.n), dtype=complex)
        for c, p in self.terms:
            m += c * pauli_matrix(p)
        return m

    def is_hermitian(self) -> bool:
        return all(p.is_hermitian for _, p in self.terms)


def random_local_hamiltonian(n: int, k: int, n_terms: int, rng: np.random.Generator) -> DenseOperator:
    terms = []
    for _ in range(n_terms):
        w = int(rng.integers(1, min(k, n) + 1))
        qs = rng.choice(n, size=w, replace=False)
        ops = {int(q): "XYZ"[int(rng.integers(3))] for q in qs}
        terms.append((float(rng.normal()), Pauli.from_sparse(n, ops)))
    return DenseOperator(n, tuple(terms))


def random_state(n: int, rng: np.random.Generator) -> DenseState:
    v = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return DenseState(n, v / np.linalg.norm(v))


def energy_from_rdms(h: DenseOperator, s: DenseState | np.ndarray) -> float:
    """Sum over terms of Tr(h_i rho_{K_i}), using only the reduced states on each term's support."""
    total = 0.0
    for c, p in h.terms:
        supp = list(p.support)
        if not supp:
            total += c
            continue
        r = rdm(s, supp, h.n)
        total += c * float(np.trace(pauli_matrix(p.restrict(supp)) @ r).real)
    return total


def energy_direct(h: DenseOperator, s: DenseState | np.ndarray) -> float:
    """Tr(H rho) with H built as a full matrix."""
    m = h.matrix()
    if isinstance(s, DenseState):
        return float(np.vdot(s.amp, m @ s.amp).real)
    return float(np.trace(m @ s).real)


# ---------------------------------------------------------------------------
# CAT and history states


def cat_state(n: int, sign: int = 1) -> DenseState:
    _check_size(n)
    a = np.zeros(2**n, dtype=complex)
    a[0] = 1 / math.sqrt(2)
    a[-1] = sign / math.sqrt(2)
    return DenseState(n, a)


def clock_qubits(n: int) -> int:
    return max(1, math.ceil(math.log2(n * n)))


def cat_ladder_layer(n: int, i: int) -> list[tuple[str, tuple[int, ...]]]:
    """Layer i (1-based) of the padded CAT circuit: CX(i-1 -> i) for i < n, identity after."""
    if 1 <= i <= n - 1:
        return [("CX", (i - 1, i))]
    return []


def init_state(n: int) -> DenseState:
    """|+> (x) |0>^(n-1)."""
    s = DenseState.zero(n)
    return s.apply_gate("H", [0])


def history_state(n: int) -> DenseState:
    """(1/n) sum_{i=1}^{n^2} U^i|init> (x) |i-1>, the clock stored in binary."""
    if n < 2:
        raise ValueError("history state needs n >= 2")
    c = clock_qubits(n)
    _check_size(n + c)
    steps = n * n
    data = init_state(n)
    amp = np.zeros((2**n, 2**c), dtype=complex)
    for i in range(1, steps + 1):
        for name, qs in cat_ladder_layer(n, i):
            data.apply_gate(name, qs)
        amp[:, i - 1] = data.amp
    return DenseState(n + c, amp.reshape(-1) / n)


def theta_state(n: int) -> np.ndarray:
    c = clock_qubits(n)
    v = np.zeros(2**c, dtype=complex)
    v[n : n * n] = 1 / math.sqrt(n * n - n)  # clock values i-1 for i = n+1 .. n^2
    return v


def extended_cat_state(n: int) -> DenseState:
    return DenseState(n + clock_qubits(n), np.kron(cat_state(n).amp, theta_state(n)))


def history_overlap(n: int) -> float:
    return abs(overlap(history_state(n), extended_cat_state(n)))


def history_hamiltonian(n: int, j_in: float = 1.0, j_prop: float = 1.0) -> np.ndarray:
    """Circuit-to-Hamiltonian construction for the padded CAT circuit, binary clock.

    Terms: input penalties at clock value 0 (rejecting anything but
    V^1|init>), propagation terms linking consecutive clock values through the
    layer applied between them, and a penalty on unused clock values.
    The history state is annihilated by every term.
    """
    c = clock_qubits(n)
    _check_size(n + c)
    steps = n * n
    dd, dc = 2**n, 2**c

    def clock_proj(a: int, b: int) -> np.ndarray:
        m = np.zeros((dc, dc), dtype=complex)
        m[a, b] = 1
        return m

    minus = np.array([[1, -1], [-1, 1]], dtype=complex) / 2
    one = np.diag([0, 1]).astype(complex)
    h_in = np.zeros((dd, dd), dtype=complex)
    h_in += kron_all([minus] + [_I2] * (n - 1))
    for q in range(1, n):
        h_in += kron_all([_I2] * q + [one] + [_I2] * (n - q - 1))
    # clock value 0 already holds V^1|init>, so the penalties are conjugated by V^1
    v1 = np.eye(dd, dtype=complex)
    for name, qs in cat_ladder_layer(n, 1):
        v1 = _full_gate(n, name, qs) @ v1
    h_in = v1 @ h_in @ v1.conj().T
    h = j_in * np.kron(h_in, clock_proj(0, 0))

    eye_d = np.eye(dd, dtype=complex)
    for t in range(steps - 1):
        # clock t -> t+1 applies layer t+2 (1-based), since clock value t holds U^{t+1}
        v = eye_d.copy()
        for name, qs in cat_ladder_layer(n, t + 2):
            op = _full_gate(n, name, qs)
            v = op @ v
        term = np.kron(eye_d, clock_proj(t, t) + clock_proj(t + 1, t + 1))
        term -= np.kron(v, clock_proj(t + 1, t)) + np.kron(v.conj().T, clock_proj(t, t + 1))
        h += j_prop * 0.5 * term
    for t in range(steps, dc):
        h += np.kron(eye_d, clock_proj(t, t))
    return h


def _full_gate(n: int, name: str, qubits: Sequence[int]) -> np.ndarray:
    cols = []
    for b in range(2**n):
        s = DenseState.basis(n, b).apply_gate(name, qubits)
        cols.append(s.amp)
    return np.array(cols).T
