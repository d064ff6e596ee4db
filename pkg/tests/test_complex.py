from __future__ import annotations

import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from homdepth.bruteforce import path_distance_bruteforce
from homdepth.complex import (
    ComplexError,
    EdgeSet,
    PolygonalComplex,
    build_cube,
    build_tetrahedron,
    build_torus,
    complex_from_dict,
    dumps_complex,
    load_complex,
    save_complex,
    validate_csc,
)
from homdepth.fixtures import all_fixture_keys, build_fixture, fixture_by_key
from homdepth.metric import (
    ball,
    copath_components,
    degrees,
    diameter,
    distance_table,
    edge_boundary,
    edge_coboundary,
    edge_distance,
    path_components,
    subcomplex_K,
    UnreachableError,
)
from homdepth.topology import boundary_matrices, coboundary_matrices

CUBE_COUNTS = {1: (8, 12, 6), 2: (26, 48, 24), 3: (56, 108, 54), 4: (98, 192, 96), 5: (152, 300, 150)}


def square() -> PolygonalComplex:
    return PolygonalComplex(4, [(0, 1), (1, 2), (2, 3), (3, 0)], [[0, 1, 2, 3]])


@pytest.mark.parametrize("n", sorted(CUBE_COUNTS))
def test_cube_counts_and_csc(n):
    g = build_cube(n)
    assert (g.n_vertices, g.n_edges, g.n_faces) == CUBE_COUNTS[n]
    assert validate_csc(g).is_csc


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_torus_counts(n):
    g = build_torus(n)
    assert (g.n_vertices, g.n_edges, g.n_faces) == (n * n, 2 * n * n, n * n)
    assert validate_csc(g).is_csc
    assert degrees(g) == (4, 4)


def test_tetrahedron():
    g = build_tetrahedron()
    assert (g.n_vertices, g.n_edges, g.n_faces) == (4, 6, 4)
    assert validate_csc(g).is_csc
    assert degrees(g) == (3, 3)


def test_degrees_cube():
    assert degrees(build_cube(1)) == (3, 4)
    assert degrees(build_cube(3)) == (4, 4)


def test_square_is_not_csc():
    cert = validate_csc(square())
    assert not cert.is_csc
    assert cert.witness[0] == 0


def test_certificate_fans():
    g = build_cube(2)
    cert = validate_csc(g)
    for v in range(g.n_vertices):
        es, fs = cert.edge_orders[v], cert.face_orders[v]
        k = len(es)
        assert k == len(fs) >= 2
        for i in range(k):
            # f_i and f_{i+1} share exactly e_i
            shared = set(g.faces[fs[i]]) & set(g.faces[fs[(i + 1) % k]])
            assert shared == {es[i]}


@pytest.mark.parametrize("key", all_fixture_keys())
def test_every_edge_in_two_faces(key):
    g = fixture_by_key(key)
    assert all(len(fs) == 2 for fs in g.edge_faces)


@pytest.mark.parametrize("key", all_fixture_keys())
def test_shipped_fixture_matches_builder(key):
    kind = "".join(c for c in key if c.isalpha())
    n = int(key[len(kind):]) if key != "tetrahedron" else None
    assert fixture_by_key(key) == build_fixture(kind, n)


def test_json_round_trip(tmp_path):
    g = build_cube(2)
    path = tmp_path / "c.json"
    save_complex(g, path)
    text = path.read_text(encoding="utf-8")
    assert text.endswith("\n")
    assert list(json.loads(text)) == ["vertices", "edges", "faces"]
    assert load_complex(path) == g
    assert dumps_complex(load_complex(path)) == text


@pytest.mark.parametrize(
    "data, fragment",
    [
        ({"vertices": 2, "edges": [[0, 0]], "faces": []}, "self-edge"),
        ({"vertices": 2, "edges": [[0, 5]], "faces": []}, "dangling"),
        ({"vertices": 2, "edges": [[0, 1], [1, 0]], "faces": []}, "duplicate"),
        ({"vertices": 2, "edges": [[0, 1]], "faces": [[0, 0]]}, "face"),
        ({"vertices": 3, "edges": [[0, 1], [1, 2]], "faces": [[0, 1]]}, "degenerate"),
        ({"edges": [], "faces": []}, "missing key"),
    ],
)
def test_loader_rejects(data, fragment):
    with pytest.raises(ComplexError, match=fragment):
        complex_from_dict(data)


def test_load_reports_json_line(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{\n  "vertices": 3,\n  oops\n}\n')
    with pytest.raises(ComplexError, match="line 3"):
        load_complex(path)


# ---------------------------------------------------------------------------
# metrics


def test_distance_examples():
    t1 = build_cube(1)
    assert edge_distance(t1, 3, 3, "path") == 0
    u, v = t1.edges[0]
    neighbour = next(e for e in t1.vertex_edges[u] if e != 0)
    assert edge_distance(t1, 0, neighbour, "path") == 1
    tet = build_tetrahedron()
    opposite = [(a, b) for a, b in itertools.combinations(range(6), 2) if not set(tet.edges[a]) & set(tet.edges[b])]
    assert len(opposite) == 3
    for a, b in opposite:
        assert edge_distance(tet, a, b, "path") == 2


def test_unreachable():
    g = PolygonalComplex(4, [(0, 1), (2, 3)], [])
    with pytest.raises(UnreachableError):
        edge_distance(g, 0, 1, "path")


@pytest.mark.parametrize("g", [build_tetrahedron(), build_cube(1)], ids=["tet", "cube1"])
def test_path_distance_matches_enumeration(g):
    for e, f in itertools.combinations(range(g.n_edges), 2):
        assert edge_distance(g, e, f, "path") == path_distance_bruteforce(g, e, f)


@pytest.mark.parametrize("g", [build_tetrahedron(), build_cube(1), build_cube(2)], ids=["tet", "cube1", "cube2"])
@pytest.mark.parametrize("metric", ["path", "copath"])
def test_metric_axioms(g, metric):
    d = distance_table(g, metric).astype(np.int64)
    assert (np.diag(d) == 0).all()
    assert (d == d.T).all()
    assert (d[np.triu_indices_from(d, 1)] > 0).all()
    # d[i,k] <= d[i,j] + d[j,k] for all triples
    assert (d[:, None, :] <= d[:, :, None] + d[None, :, :]).all()


@pytest.mark.parametrize("key", all_fixture_keys())
def test_copath_path_sandwich(key):
    g = fixture_by_key(key)
    dp = distance_table(g, "path")
    dc = distance_table(g, "copath")
    fdeg = degrees(g)[1]
    assert (dp <= fdeg * dc).all()
    # the lower side holds only up to one step, see the collinear case below
    assert (dc <= dp + 1).all()


def test_collinear_edges_are_closer_by_path():
    # two edges through a degree-4 vertex with no common face: d = 1, d_hat = 2
    g = build_torus(4)
    dp = distance_table(g, "path")
    dc = distance_table(g, "copath")
    e, f = next((e, f) for e in range(g.n_edges) for f in range(g.n_edges) if dp[e, f] == 1 and dc[e, f] == 2)
    assert set(g.edges[e]) & set(g.edges[f])
    assert not set(g.edge_faces[e]) & set(g.edge_faces[f])
    assert int((dc > dp).sum()) == 96
    assert not (distance_table(build_tetrahedron(), "copath") > distance_table(build_tetrahedron(), "path")).any()


def test_ball_radius_zero():
    g = build_cube(2)
    for e in range(g.n_edges):
        assert ball(g, e, 0) == EdgeSet.of([e])


def test_copath_diameters():
    assert [diameter(build_cube(n)) for n in range(1, 6)] == [2, 5, 8, 11, 14]
    assert [diameter(build_torus(n)) for n in range(3, 7)] == [3, 4, 5, 6]
    assert diameter(build_tetrahedron()) == 2


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_fact_area(n):
    g = build_cube(n)
    d = distance_table(g, "copath")
    for r in range(1, 3 * n + 1):
        assert (d <= r).sum(axis=1).max() <= 10 * r * r


@pytest.mark.parametrize("key", all_fixture_keys())
def test_edges_in_ball(key):
    g = fixture_by_key(key)
    D = max(degrees(g))
    d = distance_table(g, "copath")
    for r in range(int(d.max()) + 1):
        assert (d <= r).sum(axis=1).max() <= D ** (r + 1)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_excision_leaves_connected_graph(n):
    g = build_cube(n)
    full = g.all_edges()
    for e in range(g.n_edges):
        for r in range(n):
            rest = full - ball(g, e, r)
            assert len(path_components(g, rest)) <= 1


# ---------------------------------------------------------------------------
# boundaries


def test_boundary_trivial_cases():
    g = build_cube(1)
    assert edge_coboundary(g, g.all_edges()) == EdgeSet()
    assert edge_boundary(g, EdgeSet()) == EdgeSet()
    assert edge_coboundary(g, EdgeSet()) == EdgeSet()


def test_face_coboundary_on_unit_cube():
    # each corner of a face has one edge leaving the face: 4, not 8
    g = build_cube(1)
    s = g.face_edge_set(0)
    cob = edge_coboundary(g, s)
    assert len(cob) == 4
    assert not (cob & s)
    assert len(edge_boundary(g, s)) == 4


def test_non_csc_boundaries_rejected():
    with pytest.raises(ComplexError):
        edge_boundary(square(), EdgeSet.of([0]))


@pytest.mark.parametrize("key", ["tetrahedron", "cube1", "cube2", "torus4"])
def test_remark_identities(key):
    g = fixture_by_key(key)
    d1, d2 = boundary_matrices(g)
    c0, _ = coboundary_matrices(g)
    rng = np.random.default_rng(11)
    for _ in range(200):
        s = EdgeSet(int(rng.integers(0, 2**63)) & ((1 << g.n_edges) - 1) if g.n_edges < 63
                    else sum(1 << int(i) for i in np.flatnonzero(rng.random(g.n_edges) < 0.2)))
        faces = sorted(g.face_support(s))
        chain_f = sum(1 << f for f in faces)
        assert edge_boundary(g, s).mask == d2.matvec(chain_f)
        verts = sorted(g.vertex_support(s))
        chain_v = sum(1 << v for v in verts)
        assert edge_coboundary(g, s).mask == c0.matvec(chain_v)


# ---------------------------------------------------------------------------
# components and K(e, r)


def test_copath_components_examples():
    g = build_cube(1)
    assert copath_components(g, EdgeSet()) == []
    assert len(copath_components(g, g.face_edge_set(0))) == 1
    # two edges with no common face
    a = 0
    b = next(e for e in range(g.n_edges) if not set(g.edge_faces[a]) & set(g.edge_faces[e]))
    assert len(copath_components(g, EdgeSet.of([a, b]))) == 2


def test_K_full_radius_is_whole_complex():
    g = build_cube(2)
    sub = subcomplex_K(g, 5, diameter(g))
    assert sub.face_map == tuple(range(g.n_faces))
    assert sub.complex.n_edges == g.n_edges


def test_K_radius_zero_is_empty():
    g = build_cube(1)
    for reading in ("vertices", "faces"):
        sub = subcomplex_K(g, 0, 0, reading)
        assert sub.face_map == ()
        assert sub.complex.n_edges == 0


def test_K_readings_differ():
    g = build_cube(3)
    v = subcomplex_K(g, 0, 2, "vertices")
    f = subcomplex_K(g, 0, 2, "faces")
    assert v.face_map == f.face_map
    assert set(f.edge_map) < set(v.edge_map)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 47), st.integers(0, 5))
def test_K_core_faces_lie_in_ball(e, r):
    g = build_cube(2)
    sub = subcomplex_K(g, e, r)
    b = ball(g, e, r)
    for f in sub.core_faces:
        assert g.face_edge_set(f) <= b
    # index maps are consistent with the parent
    for i, (a, c) in enumerate(sub.complex.edges):
        assert {sub.vertex_map[a], sub.vertex_map[c]} == set(g.edges[sub.edge_map[i]])
