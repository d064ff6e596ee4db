from __future__ import annotations

import itertools
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from homdepth.circuit import Circuit, Gate, effective_support_B, random_clifford_circuit
from homdepth.code import (
    EncoderError,
    appendix_a_hamiltonian,
    coboundary_operator,
    code_state_encoder,
    css_encoder,
    is_code_state,
    logical_x_operators,
    logical_z_operators,
    pinned_generators,
    plaquette,
    spectrum_levels,
    stabilizing_candidates,
    star,
    surface_generators,
    synthesize_encoder,
    verify_comut_op,
    verify_large_B,
)
from homdepth.complex import EdgeSet, build_cube, build_tetrahedron, build_torus
from homdepth.dense import DenseState, pauli_matrix, rdm, simulate
from homdepth.gf2 import rank
from homdepth.fixtures import all_fixture_keys, fixture_by_key
from homdepth.metric import shortest_path
from homdepth.pauli import Pauli, intersection_parity
from homdepth.tableau import Tableau, displaced_states_equal, run_circuit, stabilizer_rdm, states_equal

GATES_1 = ("H", "S", "SDG", "X", "Y", "Z")
GATES_2 = ("CX", "CZ", "SWAP")
seeds = st.integers(0, 2**32 - 1)


def paulis(n: int):
    return st.builds(
        lambda x, z, k: Pauli(n, x, z, k),
        st.integers(0, 2**n - 1),
        st.integers(0, 2**n - 1),
        st.integers(0, 3),
    )


def unitary(u: Circuit) -> np.ndarray:
    cols = [DenseState.basis(u.n_qubits, i).apply_circuit(u).amp for i in range(2**u.n_qubits)]
    return np.stack(cols, axis=1)


def path_endpoints(g, gamma: EdgeSet) -> list[int]:
    odd = {}
    for e in gamma:
        for v in g.edges[e]:
            odd[v] = odd.get(v, 0) ^ 1
    return sorted(v for v, bit in odd.items() if bit)


# -- Pauli algebra ---------------------------------------------------------


@given(paulis(3), paulis(3))
def test_product_matches_matrices(p, q):
    assert np.allclose(pauli_matrix(p * q), pauli_matrix(p) @ pauli_matrix(q))
    mp, mq = pauli_matrix(p), pauli_matrix(q)
    assert p.commutes(q) == np.allclose(mp @ mq, mq @ mp)


@given(paulis(3))
def test_dagger_and_hermiticity(p):
    m = pauli_matrix(p)
    assert np.allclose(pauli_matrix(p.dagger()), m.conj().T)
    assert p.is_hermitian == np.allclose(m, m.conj().T)
    assert Pauli.from_label(p.label()) == p


def test_label_examples():
    y = Pauli.from_label("Y")
    assert np.allclose(pauli_matrix(y), [[0, -1j], [1j, 0]])
    assert Pauli.from_label("-XZ").sign == -1
    assert Pauli.from_label("+iXX").label() == "+iXX"
    assert Pauli.from_label("XIY").restrict([2, 0]).letters() == "YX"
    with pytest.raises(ValueError):
        Pauli.from_label("XQ")
    with pytest.raises(ValueError):
        Pauli.from_label("iX").sign


@pytest.mark.parametrize("name, qubits", [(n, (1,)) for n in GATES_1] + [(n, (2, 0)) for n in GATES_2])
def test_gate_conjugation_matches_matrices(name, qubits):
    u = Circuit(3, ((Gate(name, qubits),),))
    m = unitary(u)
    for x, z in itertools.product(range(8), repeat=2):
        p = Pauli(3, x, z)
        assert np.allclose(pauli_matrix(p.conjugate(name, qubits)), m @ pauli_matrix(p) @ m.conj().T)


@settings(max_examples=30, deadline=None)
@given(seeds, paulis(4))
def test_circuit_conjugation_matches_matrices(seed, p):
    u = random_clifford_circuit(4, 3, np.random.default_rng(seed))
    m = unitary(u)
    assert np.allclose(pauli_matrix(p.conjugate_circuit(u)), m @ pauli_matrix(p) @ m.conj().T)


def test_intersection_parity_bridge():
    rng = random.Random(11)
    n = 20
    for _ in range(10_000):
        a, b = rng.getrandbits(n), rng.getrandbits(n)
        odd = intersection_parity(EdgeSet(a), EdgeSet(b))
        assert Pauli.zs(n, a).commutes(Pauli.xs(n, b)) == (odd == 0)


# -- tableau ---------------------------------------------------------------


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_tableau_stabilizers_fix_dense_state(seed):
    u = random_clifford_circuit(5, 4, np.random.default_rng(seed))
    t, psi = run_circuit(u), simulate(u)
    for p in t.stabilizers():
        assert np.allclose(pauli_matrix(p) @ psi.amp, psi.amp)
    for p in t.destabilizers():
        assert t.expectation_sign(p) == 0


@settings(max_examples=30, deadline=None)
@given(seeds, st.lists(st.integers(0, 5), min_size=1, max_size=3, unique=True))
def test_stabilizer_rdm_matches_dense(seed, keep):
    u = random_clifford_circuit(6, 3, np.random.default_rng(seed))
    assert np.allclose(stabilizer_rdm(run_circuit(u), keep), rdm(simulate(u), keep))


def test_states_equal_examples():
    z = Tableau.zero_state(3)
    assert states_equal(z.copy().apply_pauli(Pauli.from_label("ZIZ")), z)
    assert not states_equal(z.copy().apply_pauli(Pauli.from_label("XII")), z)
    # a global sign is invisible to states_equal but not to the displaced test
    assert displaced_states_equal(z, Pauli.from_label("IIZ"), Pauli(3))
    assert not displaced_states_equal(z, Pauli.from_label("-IIZ"), Pauli(3))


# -- codes and encoders -----------------------------------------------------


def test_surface_generator_examples():
    tor = surface_generators(build_torus(3))
    assert tor.logical_count == 2 and tor.code_dimension == 4
    tet = surface_generators(build_tetrahedron())
    assert len(tet.generators) == 8 and tet.rank == 6 and tet.logical_count == 0
    assert surface_generators(build_cube(2)).logical_count == 0


@pytest.mark.parametrize("key", all_fixture_keys())
def test_logicals_commute_with_generators(key):
    g = fixture_by_key(key)
    gens = surface_generators(g).generators
    lz, lx = logical_z_operators(g), logical_x_operators(g)
    for p in lz + lx:
        assert all(p.commutes(s) for s in gens)
    # the bases need not be dual, but their pairing must be nondegenerate
    pairing = [sum((not zi.commutes(xj)) << j for j, xj in enumerate(lx)) for zi in lz]
    assert rank(pairing) == len(lz) == len(lx)


def test_tetrahedron_encoder():
    g = build_tetrahedron()
    t = run_circuit(code_state_encoder(g))
    assert all(t.stabilizes(p) for p in surface_generators(g).generators)


@pytest.mark.parametrize("key", ["torus3", "torus4", "cube1", "cube2"])
def test_encoders_prepare_code_states(key):
    g = fixture_by_key(key)
    for enc in (code_state_encoder(g), css_encoder(g)):
        t = run_circuit(enc)
        assert is_code_state(g, t)
        assert all(t.stabilizes(p) for p in logical_z_operators(g))


def test_pinned_signs():
    g = build_torus(3)
    t = run_circuit(code_state_encoder(g, [1, -1]))
    lz = logical_z_operators(g)
    assert t.stabilizes(lz[0]) and t.stabilizes(lz[1].negate())
    with pytest.raises(ValueError):
        pinned_generators(g, [1])


def test_diagonal_spec_is_identity_equivalent():
    gens = [Pauli.zs(4, [q]) for q in range(4)]
    assert states_equal(run_circuit(synthesize_encoder(gens, 4)), Tableau.zero_state(4))
    flipped = [Pauli.zs(3, [0]).negate(), Pauli.zs(3, [1]), Pauli.zs(3, [2])]
    assert run_circuit(synthesize_encoder(flipped, 3)).stabilizes(flipped[0])


@pytest.mark.parametrize(
    "labels, fragment",
    [
        (["XI", "ZI", "IZ"], "anticommute"),
        (["ZI", "-ZI", "IZ"], "inconsistent"),
        (["ZZ"], "rank"),
        (["iZI", "IZ"], "Hermitian"),
    ],
)
def test_encoder_rejections(labels, fragment):
    with pytest.raises(EncoderError, match=fragment):
        synthesize_encoder([Pauli.from_label(s) for s in labels], 2)


@pytest.mark.parametrize("key", all_fixture_keys())
def test_coboundary_operators_stabilize(key):
    g = fixture_by_key(key)
    t = run_circuit(css_encoder(g))
    rng = random.Random(key)
    for _ in range(5):
        vs = rng.sample(range(g.n_vertices), rng.randint(1, g.n_vertices))
        p = coboundary_operator(g, vs)
        assert t.stabilizes(p)
    full = coboundary_operator(g, range(g.n_vertices))
    assert full.is_identity()


def test_star_and_plaquette_shapes():
    g = build_cube(2)
    assert all(star(g, v).weight in (3, 4) for v in range(g.n_vertices))
    assert all(plaquette(g, f).weight == 4 for f in range(g.n_faces))


# -- commuting-operator lemma ---------------------------------------------


def comut_setup(key: str = "cube2", e: int = 0, f: int = 7):
    g = fixture_by_key(key)
    enc = css_encoder(g)
    gamma = shortest_path(g, e, f, "path")
    return g, enc, gamma, run_circuit(enc)


def test_comut_identity_verified():
    g, enc, gamma, t = comut_setup()
    r = verify_comut_op(g, enc, gamma, Pauli(g.n_edges), t)
    assert r.ok and r.detail["phase_free_equal"]


def test_comut_generator_outside_B_verified():
    g, enc, gamma, t = comut_setup("cube3", 0, 7)
    b = effective_support_B(g, enc, gamma)
    outside = [p for p in surface_generators(g).generators if not p.support.mask & b.mask]
    assert outside
    for p in outside[:10]:
        assert verify_comut_op(g, enc, gamma, p, t, b).ok


def test_comut_candidates_all_verified():
    g, enc, gamma, t = comut_setup("torus4", 3, 20)
    b = effective_support_B(g, enc, gamma)
    cands = stabilizing_candidates(g, b, random.Random(3), 8)
    assert cands[0].is_identity()
    for p in cands:
        assert verify_comut_op(g, enc, gamma, p, t, b).ok


def test_comut_violation_when_B_is_ignored():
    g, enc, gamma, t = comut_setup()
    v = path_endpoints(g, EdgeSet.of(gamma))[0]
    # a star at an endpoint anticommutes with gamma_Z, so only the B premise protects the lemma
    r = verify_comut_op(g, enc, gamma, star(g, v), t, b=EdgeSet())
    assert r.status == "violated"
    assert r.detail["phase_free_equal"]


def test_comut_premises():
    g, enc, gamma, t = comut_setup()
    b = effective_support_B(g, enc, gamma)
    inside = next(p for p in surface_generators(g).generators if p.support.mask & b.mask)
    r = verify_comut_op(g, enc, gamma, inside, t, b)
    assert r.status == "precondition" and "meets B" in r.premise
    r = verify_comut_op(g, enc, gamma, Pauli.xs(g.n_edges, [0]), t, EdgeSet())
    assert r.status == "precondition" and "stabilize" in r.premise
    blank = Circuit(g.n_edges)
    r = verify_comut_op(g, blank, gamma, Pauli(g.n_edges))
    assert r.status == "precondition" and "code state" in r.premise


# -- large effective support ------------------------------------------------


@pytest.mark.parametrize("key", ["cube1", "cube3", "torus4"])
def test_large_B_verified(key):
    g = fixture_by_key(key)
    enc = css_encoder(g)
    rng = random.Random(key)
    for _ in range(4):
        e, f = rng.sample(range(g.n_edges), 2)
        r = verify_large_B(g, enc, shortest_path(g, e, f, "path"), e, f)
        assert r.ok
        assert r.size_B >= r.distance and r.size_A * r.c**r.depth >= r.distance


def test_large_B_violated_with_truncated_B():
    g = build_cube(2)
    enc = css_encoder(g)
    e, f = 0, 30
    gamma = shortest_path(g, e, f, "path")
    r = verify_large_B(g, enc, gamma, e, f, b_override=EdgeSet.of(gamma[:1]))
    assert r.status == "violated"
    assert not r.checks["member_in_B"]


def test_large_B_requires_code_state():
    g = build_cube(1)
    with pytest.raises(ValueError, match="code state"):
        verify_large_B(g, Circuit(g.n_edges), shortest_path(g, 0, 5, "path"), 0, 5)


# -- parent Hamiltonian -----------------------------------------------------


def test_parent_hamiltonian_identity():
    h = appendix_a_hamiltonian(Circuit(4))
    assert h.terms == [Pauli.zs(4, [i]) for i in range(4)]
    assert h.ok


def test_parent_hamiltonian_ladder_supports():
    n = 6
    u = Circuit.from_gates(n, [Gate("H", (0,))] + [Gate("CX", (i, i + 1)) for i in range(n - 1)])
    h = appendix_a_hamiltonian(u)
    assert h.ok
    assert all(len(s) <= 2**u.depth for s in h.supports)


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_parent_hamiltonian_random(seed):
    u = random_clifford_circuit(6, 3, np.random.default_rng(seed))
    h = appendix_a_hamiltonian(u)
    assert h.ok
    ham = -sum(pauli_matrix(p) for p in h.terms)
    ev = np.linalg.eigvalsh(ham)
    assert np.isclose(ev[0], -6) and np.isclose(ev[1] - ev[0], 2)
    assert np.isclose(simulate(u).expectation(ham).real, -6)


def test_spectrum_levels():
    levels = spectrum_levels(4)
    assert levels[0] == (-4, 1) and levels[1] == (-2, 4)
    assert sum(d for _, d in levels) == 16


# -- code-state indistinguishability ----------------------------------------


def test_torus4_logicals_locally_indistinguishable():
    g = build_torus(4)
    t0 = run_circuit(code_state_encoder(g))
    t1 = t0.copy().apply_pauli(logical_x_operators(g)[0])
    rng = random.Random(4)
    for _ in range(40):
        keep = sorted(rng.sample(range(g.n_edges), 2))
        assert np.allclose(stabilizer_rdm(t0, keep), stabilizer_rdm(t1, keep))
    assert not states_equal(t0, t1)


def test_parent_hamiltonian_depth_two_eight_qubits():
    rng = np.random.default_rng(2)
    for _ in range(5):
        u = random_clifford_circuit(8, 2, rng)
        assert appendix_a_hamiltonian(u).ok
