"""Layered Clifford circuits, light cones and effective supports.

Qubits are complex edges. A circuit is a list of layers; gates within a
layer act on disjoint qubits. Light cones only look at gate supports, so
any gate tag works for them, but tags are restricted to Clifford
primitives (or named composites of them) so the tableau simulator can
run every circuit analysed here.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

from .complex import EdgeSet, PolygonalComplex, bits_to_mask
from .metric import adjacency, distance_table
from .topology import ChainLike, SeparationOracle

PRIMITIVE_ARITY = {
    "I": 1,
    "H": 1,
    "S": 1,
    "SDG": 1,
    "X": 1,
    "Y": 1,
    "Z": 1,
    "CX": 2,
    "CZ": 2,
    "SWAP": 2,
}
_INVERSE = {"S": "SDG", "SDG": "S"}


class CircuitError(ValueError):
    pass


@dataclass(frozen=True)
class Gate:
    """A gate on ``qubits``. Composite gates carry ``ops``: (primitive, local indices)."""

    name: str
    qubits: tuple[int, ...]
    ops: tuple[tuple[str, tuple[int, ...]], ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        if len(set(self.qubits)) != len(self.qubits):
            raise CircuitError(f"gate {self.name} repeats a qubit: {list(self.qubits)}")
        if not self.qubits:
            raise CircuitError(f"gate {self.name} has no qubits")
        if self.ops is None:
            arity = PRIMITIVE_ARITY.get(self.name)
            if arity is None:
                raise CircuitError(f"unknown gate {self.name!r} (composites need ops)")
            if arity != len(self.qubits):
                raise CircuitError(f"gate {self.name} expects {arity} qubits, got {len(self.qubits)}")
        else:
            ops = tuple((str(p), tuple(int(i) for i in idx)) for p, idx in self.ops)
            object.__setattr__(self, "ops", ops)
            for p, idx in ops:
                if PRIMITIVE_ARITY.get(p) != len(idx):
                    raise CircuitError(f"composite {self.name}: bad primitive {p} on {list(idx)}")
                if any(not 0 <= i < len(self.qubits) for i in idx) or len(set(idx)) != len(idx):
                    raise CircuitError(f"composite {self.name}: local index out of range in {p}{list(idx)}")

    @property
    def arity(self) -> int:
        return len(self.qubits)

    @property
    def mask(self) -> int:
        return bits_to_mask(self.qubits)

    def primitives(self) -> list[tuple[str, tuple[int, ...]]]:
        """Primitive operations on global qubit indices, in application order."""
        if self.ops is None:
            return [(self.name, self.qubits)]
        return [(p, tuple(self.qubits[i] for i in idx)) for p, idx in self.ops]

    def inverse(self) -> "Gate":
        if self.ops is None:
            return Gate(_INVERSE.get(self.name, self.name), self.qubits)
        ops = tuple((_INVERSE.get(p, p), idx) for p, idx in reversed(self.ops))
        return Gate(self.name + "_inv" if not self.name.endswith("_inv") else self.name[:-4], self.qubits, ops)

    def to_dict(self) -> dict:
        d: dict = {"gate": self.name, "qubits": list(self.qubits)}
        if self.ops is not None:
            d["ops"] = [[p, list(idx)] for p, idx in self.ops]
        return d


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    layers: tuple[tuple[Gate, ...], ...] = ()
    _masks: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        layers = tuple(tuple(layer) for layer in self.layers)
        object.__setattr__(self, "layers", layers)
        for li, layer in enumerate(layers):
            used = 0
            for gate in layer:
                for q in gate.qubits:
                    if not 0 <= q < self.n_qubits:
                        raise CircuitError(f"layers[{li}]: qubit {q} out of range (qubits={self.n_qubits})")
                if used & gate.mask:
                    raise CircuitError(f"layers[{li}]: overlapping gate supports at {gate.name}{list(gate.qubits)}")
                used |= gate.mask
        object.__setattr__(self, "_masks", tuple(tuple(g.mask for g in layer) for layer in layers))

    @property
    def depth(self) -> int:
        return len(self.layers)

    @property
    def locality(self) -> int:
        """Largest gate arity (the c in c^d bounds); 1 for an empty circuit."""
        return max((g.arity for layer in self.layers for g in layer), default=1)

    def gates(self) -> Iterable[Gate]:
        for layer in self.layers:
            yield from layer

    def inverse(self) -> "Circuit":
        return Circuit(self.n_qubits, tuple(tuple(g.inverse() for g in layer) for layer in reversed(self.layers)))

    def then(self, other: "Circuit") -> "Circuit":
        """This circuit followed by ``other``."""
        if other.n_qubits != self.n_qubits:
            raise CircuitError("qubit counts differ")
        return Circuit(self.n_qubits, self.layers + other.layers)

    @classmethod
    def from_gates(cls, n_qubits: int, gates: Iterable[Gate]) -> "Circuit":
        """Pack a gate sequence into layers as early as possible, preserving order on shared qubits."""
        layers: list[list[Gate]] = []
        ready = [0] * n_qubits  # first layer index free for each qubit
        for gate in gates:
            for q in gate.qubits:
                if not 0 <= q < n_qubits:
                    raise CircuitError(f"qubit {q} out of range (qubits={n_qubits})")
            li = max(ready[q] for q in gate.qubits)
            while len(layers) <= li:
                layers.append([])
            layers[li].append(gate)
            for q in gate.qubits:
                ready[q] = li + 1
        return cls(n_qubits, tuple(tuple(layer) for layer in layers))

    def to_dict(self) -> dict:
        return {"qubits": self.n_qubits, "layers": [[g.to_dict() for g in layer] for layer in self.layers]}


def circuit_from_dict(data: dict) -> Circuit:
    if not isinstance(data, dict) or "qubits" not in data or "layers" not in data:
        raise CircuitError("expected keys 'qubits' and 'layers'")
    if not isinstance(data["qubits"], int) or data["qubits"] < 0:
        raise CircuitError("qubits: expected a non-negative integer")
    layers = []
    for li, layer in enumerate(data["layers"]):
        if not isinstance(layer, list):
            raise CircuitError(f"layers[{li}]: expected a list of gates")
        gates = []
        for gi, gd in enumerate(layer):
            if not isinstance(gd, dict) or "gate" not in gd or "qubits" not in gd:
                raise CircuitError(f"layers[{li}][{gi}]: expected {{'gate', 'qubits'}}")
            try:
                gates.append(Gate(gd["gate"], tuple(gd["qubits"]), gd.get("ops")))
            except (TypeError, ValueError) as exc:
                raise CircuitError(f"layers[{li}][{gi}]: {exc}") from exc
        layers.append(tuple(gates))
    return Circuit(data["qubits"], tuple(layers))


def dumps_circuit(u: Circuit) -> str:
    return json.dumps(u.to_dict()) + "\n"


def load_circuit(path: str | Path) -> Circuit:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise CircuitError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
    try:
        return circuit_from_dict(data)
    except CircuitError as exc:
        raise CircuitError(f"{path}: {exc}") from exc


# ---------------------------------------------------------------------------
# light cones


def _as_qubit_mask(s) -> int:
    if isinstance(s, EdgeSet):
        return s.mask
    if isinstance(s, int):
        return s
    return bits_to_mask(s)


def light_cone_mask(u: Circuit, mask: int, direction: str = "up") -> int:
    if direction == "up":
        layers = u._masks
    elif direction == "down":
        layers = reversed(u._masks)
    else:
        raise ValueError("direction must be 'up' or 'down'")
    cone = mask
    for layer in layers:
        grow = 0
        for gm in layer:
            if gm & cone:
                grow |= gm
        cone |= grow
    return cone


def light_cone(u: Circuit, s, direction: str = "up") -> EdgeSet:
    """Qubits reachable from ``s`` through the circuit: forward for ``up``, backward for ``down``."""
    return EdgeSet(light_cone_mask(u, _as_qubit_mask(s), direction))


def conjugated_support(u: Circuit, p) -> EdgeSet:
    """Superset of supp(U p U^dagger) from layer-by-layer expansion of supp(p).

    ``p`` may be an object with ``x``/``z`` masks (a Pauli) or a qubit set.
    """
    if hasattr(p, "x") and hasattr(p, "z"):
        mask = p.x | p.z
    else:
        mask = _as_qubit_mask(p)
    return light_cone(u, mask, "up")


def is_geometric(u: Circuit, g: PolygonalComplex, c_dist: int, metric: str = "copath") -> bool:
    """Every gate's qubits are pairwise within distance ``c_dist``."""
    if u.n_qubits != g.n_edges:
        raise CircuitError(f"circuit has {u.n_qubits} qubits but the complex has {g.n_edges} edges")
    table = distance_table(g, metric)
    for gate in u.gates():
        q = gate.qubits
        for i in range(len(q)):
            for j in range(i + 1, len(q)):
                d = table[q[i], q[j]]
                if d < 0 or d > c_dist:
                    return False
    return True


def geometric_locality(u: Circuit, g: PolygonalComplex, metric: str = "copath") -> int:
    """Smallest c_dist for which ``u`` is geometric (0 for single-qubit-only circuits)."""
    table = distance_table(g, metric)
    worst = 0
    for gate in u.gates():
        q = gate.qubits
        for i in range(len(q)):
            for j in range(i + 1, len(q)):
                worst = max(worst, int(table[q[i], q[j]]))
    return worst


# ---------------------------------------------------------------------------
# effective supports


def effective_support_A(g: PolygonalComplex, u: Circuit, gamma: ChainLike) -> EdgeSet:
    """Edges q whose upper light cone meets every member of [gamma].

    By the up/down duality L_up({q}) within X iff q in L_down(X), q lies in
    L_down(gamma') for all class members exactly when L_up({q}) is
    gamma-separating, so A is computed exactly with one feasibility solve
    per edge.
    """
    if u.n_qubits != g.n_edges:
        raise CircuitError(f"circuit has {u.n_qubits} qubits but the complex has {g.n_edges} edges")
    oracle = SeparationOracle(g, gamma)
    cache: dict[int, bool] = {}
    out = 0
    for q in range(g.n_edges):
        cone = light_cone_mask(u, 1 << q, "up")
        hit = cache.get(cone)
        if hit is None:
            hit = cache[cone] = oracle.separates(cone)
        if hit:
            out |= 1 << q
    return EdgeSet(out)


def effective_support_B(g: PolygonalComplex, u: Circuit, gamma: ChainLike, a: EdgeSet | None = None) -> EdgeSet:
    if a is None:
        a = effective_support_A(g, u, gamma)
    return light_cone(u, a, "up")


# ---------------------------------------------------------------------------
# circuit generators

SINGLE_QUBIT_CLIFFORDS = ("H", "S", "SDG", "X", "Y", "Z")
TWO_QUBIT_CLIFFORDS = ("CX", "CZ", "SWAP")


def random_clifford_circuit(
    n: int,
    depth: int,
    rng: np.random.Generator,
    pair_prob: float = 0.5,
    idle_prob: float = 0.1,
) -> Circuit:
    """Random layered Clifford circuit: each layer pairs up a random subset of qubits."""
    layers = []
    for _ in range(depth):
        order = rng.permutation(n).tolist()
        layer = []
        i = 0
        while i < n:
            if i + 1 < n and rng.random() < pair_prob:
                a, b = order[i], order[i + 1]
                layer.append(Gate(TWO_QUBIT_CLIFFORDS[rng.integers(len(TWO_QUBIT_CLIFFORDS))], (a, b)))
                i += 2
            else:
                if rng.random() >= idle_prob:
                    layer.append(Gate(SINGLE_QUBIT_CLIFFORDS[rng.integers(len(SINGLE_QUBIT_CLIFFORDS))], (order[i],)))
                i += 1
        layers.append(tuple(layer))
    return Circuit(n, tuple(layers))


def random_geometric_circuit(
    g: PolygonalComplex,
    depth: int,
    rng: np.random.Generator,
    pair_prob: float = 0.6,
    metric: str = "copath",
) -> Circuit:
    """Random Clifford circuit whose two-qubit gates join adjacent edges (distance 1)."""
    adj = adjacency(g, metric)
    n = g.n_edges
    layers = []
    for _ in range(depth):
        used = 0
        layer = []
        for q in rng.permutation(n).tolist():
            if used >> q & 1:
                continue
            free = [w for w in adj[q] if not used >> w & 1]
            if free and rng.random() < pair_prob:
                w = free[int(rng.integers(len(free)))]
                layer.append(Gate(TWO_QUBIT_CLIFFORDS[rng.integers(len(TWO_QUBIT_CLIFFORDS))], (q, w)))
                used |= (1 << q) | (1 << w)
            else:
                layer.append(Gate(SINGLE_QUBIT_CLIFFORDS[rng.integers(len(SINGLE_QUBIT_CLIFFORDS))], (q,)))
                used |= 1 << q
        layers.append(tuple(layer))
    return Circuit(n, tuple(layers))
