from __future__ import annotations

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from homdepth.bruteforce import effective_support_A_bruteforce
from homdepth.circuit import (
    Circuit,
    CircuitError,
    Gate,
    circuit_from_dict,
    conjugated_support,
    dumps_circuit,
    effective_support_A,
    effective_support_B,
    geometric_locality,
    is_geometric,
    light_cone,
    light_cone_mask,
    load_circuit,
    random_clifford_circuit,
    random_geometric_circuit,
)
from homdepth.complex import EdgeSet, build_cube, build_tetrahedron, build_torus
from homdepth.metric import distance_table, shortest_path
from homdepth.pauli import Pauli
from homdepth.tableau import Tableau, run_circuit, states_equal

seeds = st.integers(0, 2**32 - 1)


def ladder(n: int) -> Circuit:
    return Circuit.from_gates(n, [Gate("CX", (i, i + 1)) for i in range(n - 1)])


def test_parse_round_trip():
    data = {"qubits": 3, "layers": [[{"gate": "H", "qubits": [0]}], [{"gate": "CX", "qubits": [0, 2]}]]}
    u = circuit_from_dict(data)
    assert u.depth == 2 and u.locality == 2
    assert circuit_from_dict(json.loads(dumps_circuit(u))) == u


def test_composite_gate_round_trip():
    g = Gate("BELL", (4, 1), ops=(("H", (0,)), ("CX", (0, 1))))
    assert g.primitives() == [("H", (4,)), ("CX", (4, 1))]
    u = Circuit(5, ((g,),))
    assert circuit_from_dict(u.to_dict()) == u
    assert g.inverse().primitives() == [("CX", (4, 1)), ("H", (4,))]


@pytest.mark.parametrize(
    "data, fragment",
    [
        ({"qubits": 2, "layers": [[{"gate": "CX", "qubits": [0, 1]}, {"gate": "H", "qubits": [1]}]]}, "overlapping"),
        ({"qubits": 2, "layers": [[{"gate": "H", "qubits": [2]}]]}, "out of range"),
        ({"qubits": 2, "layers": [[{"gate": "T", "qubits": [0]}]]}, "unknown gate"),
        ({"qubits": 2, "layers": [[{"gate": "CX", "qubits": [0]}]]}, "expects 2"),
        ({"qubits": 2, "layers": [[{"gate": "CX", "qubits": [1, 1]}]]}, "repeats"),
        ({"qubits": 2}, "layers"),
        ({"qubits": -1, "layers": []}, "non-negative"),
    ],
)
def test_parse_rejections(data, fragment):
    with pytest.raises(CircuitError, match=fragment):
        circuit_from_dict(data)


def test_load_reports_json_line(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"qubits": 2,\n "layers": [}\n')
    with pytest.raises(CircuitError, match="line 2"):
        load_circuit(path)


def test_from_gates_packs_early():
    u = Circuit.from_gates(4, [Gate("H", (0,)), Gate("H", (1,)), Gate("CX", (0, 1)), Gate("X", (3,))])
    assert u.depth == 2
    assert [len(layer) for layer in u.layers] == [3, 1]
    assert ladder(5).depth == 4


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_inverse_undoes_circuit(seed):
    rng = np.random.default_rng(seed)
    u = random_clifford_circuit(6, 4, rng)
    prep = random_clifford_circuit(6, 2, rng)
    t = Tableau.zero_state(6).apply_circuit(prep)
    assert states_equal(t.copy().apply_circuit(u).apply_circuit(u.inverse()), t)
    assert u.inverse().inverse() == u


def test_light_cone_examples():
    u = ladder(5)
    assert light_cone(u, [0]) == EdgeSet.full(5)
    # cones ignore control/target direction
    assert light_cone(u, [4]) == EdgeSet.of([3, 4])
    assert light_cone(u, [4], "down") == EdgeSet.full(5)
    assert light_cone(u, [2], "down") == EdgeSet.of([0, 1, 2, 3])
    assert light_cone(u, [2]) == EdgeSet.of([1, 2, 3, 4])
    assert light_cone(Circuit(3), [1]) == EdgeSet.of([1])
    with pytest.raises(ValueError):
        light_cone(u, [0], "sideways")


@settings(max_examples=60, deadline=None)
@given(seeds, st.integers(0, 2**8 - 1))
def test_light_cone_composition(seed, mask):
    rng = np.random.default_rng(seed)
    u = random_clifford_circuit(8, int(rng.integers(0, 4)), rng)
    v = random_clifford_circuit(8, int(rng.integers(0, 4)), rng)
    uv = u.then(v)
    assert light_cone_mask(uv, mask, "up") == light_cone_mask(v, light_cone_mask(u, mask, "up"), "up")
    assert light_cone_mask(uv, mask, "down") == light_cone_mask(u, light_cone_mask(v, mask, "down"), "down")
    assert light_cone_mask(u, mask, "up") & mask == mask


@settings(max_examples=60, deadline=None)
@given(seeds, st.integers(1, 2**8 - 1))
def test_up_down_duality(seed, x):
    rng = np.random.default_rng(seed)
    u = random_clifford_circuit(8, int(rng.integers(1, 5)), rng)
    down = light_cone_mask(u, x, "down")
    for q in range(8):
        assert bool(down >> q & 1) == bool(light_cone_mask(u, 1 << q, "up") & x)


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(0, 3), st.integers(0, 3), st.integers(0, 3))
def test_conjugated_support_contains_true_support(seed, x_seed, z_seed, pick):
    rng = np.random.default_rng(seed)
    n = 7
    u = random_clifford_circuit(n, int(rng.integers(1, 5)), rng)
    qubits = rng.choice(n, size=pick + 1, replace=False).tolist()
    p = Pauli.from_sparse(n, {q: "XYZ"[(x_seed + z_seed + i) % 3] for i, q in enumerate(qubits)})
    image = p.conjugate_circuit(u)
    assert image.support <= conjugated_support(u, p)
    assert conjugated_support(u, p) == light_cone(u, qubits)


def test_is_geometric_examples():
    g = build_cube(2)
    dist = distance_table(g)
    e = 0
    f = int(dist[e].argmax())
    near = Circuit(g.n_edges, ((Gate("CZ", (e, shortest_path(g, e, f)[1])),),))
    assert is_geometric(near, g, 1)
    assert geometric_locality(Circuit(g.n_edges, ((Gate("H", (3,)),),)), g) == 0
    far = Circuit(g.n_edges, ((Gate("SWAP", (e, f)),),))
    assert geometric_locality(far, g) == dist[e, f] >= 2
    assert not is_geometric(far, g, 1)
    with pytest.raises(CircuitError):
        is_geometric(Circuit(3), g, 1)


@pytest.mark.parametrize("g", [build_cube(2), build_torus(4)], ids=["cube2", "torus4"])
def test_random_geometric_circuit_is_local(g):
    rng = np.random.default_rng(7)
    for _ in range(5):
        u = random_geometric_circuit(g, 3, rng)
        assert is_geometric(u, g, 1)


def test_effective_support_trivial_circuit():
    g = build_cube(1)
    gamma = shortest_path(g, 0, 5, "path")
    # with no gates A is the intersection of all class members
    a = effective_support_A(g, Circuit(g.n_edges), gamma)
    assert a == effective_support_A_bruteforce(g, Circuit(g.n_edges), gamma)
    assert effective_support_B(g, Circuit(g.n_edges), gamma) == a


@settings(max_examples=25, deadline=None)
@given(seeds, st.integers(1, 2**6 - 1))
def test_effective_support_matches_bruteforce(seed, gamma):
    g = build_tetrahedron()
    rng = np.random.default_rng(seed)
    u = random_clifford_circuit(g.n_edges, int(rng.integers(1, 4)), rng)
    assert effective_support_A(g, u, gamma) == effective_support_A_bruteforce(g, u, gamma)


@settings(max_examples=25, deadline=None)
@given(seeds, st.integers(1, 2**12 - 1), st.integers(0, 5))
def test_effective_support_is_class_invariant(seed, gamma, face):
    g = build_cube(1)
    rng = np.random.default_rng(seed)
    u = random_clifford_circuit(g.n_edges, int(rng.integers(1, 4)), rng)
    moved = gamma ^ g.face_masks[face]
    a = effective_support_A(g, u, gamma)
    assert a == effective_support_A(g, u, moved)
    assert a <= effective_support_B(g, u, gamma, a)


def test_effective_support_checks_size():
    with pytest.raises(CircuitError):
        effective_support_A(build_cube(1), Circuit(3), 1)


def test_run_circuit_matches_inverse_identity():
    u = ladder(4)
    assert states_equal(run_circuit(u.then(u.inverse())), Tableau.zero_state(4))
