import itertools

import numpy as np
import pytest

from garlandlab.complex import (ComplexError, WeightedGraph, cycle_graph, icosahedron_complex,
                                link_of, octahedron_complex, propagate_weights, tetrahedron_complex,
                                torus_complex, validate)


def test_single_face_weights():
    K = propagate_weights([(0, 1, 2)])
    assert K.edges == ((0, 1), (0, 2), (1, 2))
    assert list(K.edge_weights) == [1, 1, 1]
    assert list(K.vertex_weights) == [2, 2, 2]


def test_two_faces_sharing_an_edge():
    K = propagate_weights([(0, 1, 2), (0, 1, 3)])
    assert K.edge_weight(0, 1) == 2
    assert K.edge_weight(0, 2) == 1
    assert K.vertex_weights[0] == 4
    assert K.vertex_weights[2] == 2


def test_torus_census():
    K, coords = torus_complex()
    assert (K.n, len(K.edges), len(K.faces)) == (9, 27, 18)
    assert np.all(K.edge_weights == 2)
    assert np.all(K.vertex_weights == 12)


def test_duplicate_face_is_named():
    with pytest.raises(ComplexError, match=r"duplicate face \(0, 1, 2\)"):
        propagate_weights([(0, 1, 2), (2, 1, 0)])


def test_nonpositive_face_weight():
    with pytest.raises(ComplexError):
        propagate_weights([(0, 1, 2)], [0.0])


def test_link_of_single_face():
    L = link_of(propagate_weights([(0, 1, 2)]), 0)
    assert L.n == 2 and L.labels == (1, 2)
    assert L.edges == ((0, 1),)
    assert list(L.edge_weights) == [1]
    assert list(L.vertex_weights) == [1, 1]


def _is_cycle(G, k):
    return G.n == k and len(G.edges) == k and all(G.degree(c) == 2 for c in range(k)) and G.is_connected()


def test_torus_links_are_hexagons():
    K, _ = torus_complex()
    for x in range(K.n):
        L = link_of(K, x)
        assert _is_cycle(L, 6)
        assert np.all(L.edge_weights == 1) and np.all(L.vertex_weights == 2)
        assert validate(L) == []


@pytest.mark.parametrize("build,k", [(tetrahedron_complex, 3), (octahedron_complex, 4), (icosahedron_complex, 5)])
def test_platonic_links(build, k):
    K = build()
    for x in range(K.n):
        assert _is_cycle(link_of(K, x), k)


def test_link_rejects_edge_in_no_face():
    K = propagate_weights([(0, 1, 2)], free_edges=[(0, 3, 1.0)])
    with pytest.raises(ComplexError, match="link weights inconsistent"):
        link_of(K, 0)
    assert validate(K) == ["edge (0, 3): lies in no face, link weights undefined"]


def test_validate_clean_and_perturbed():
    K = propagate_weights([(0, 1, 2), (0, 1, 3), (1, 2, 3)])
    assert validate(K) == []
    ew = np.array(K.edge_weights)
    i = K.edge_index[(0, 1)]
    ew[i] += 0.5
    bad = type(K)(K.n, K.edges, K.faces, K.vertex_weights, ew, K.face_weights, K.edge_index)
    report = validate(bad)
    assert len(report) == 1 and "(0, 1)" in report[0]


def test_validate_graph_isolated_zero_vertex():
    G = WeightedGraph.from_edges(3, [(0, 1)])
    report = validate(G)
    assert len(report) == 1 and "m(∅)>0 per component" in report[0]


def test_handshake_and_idempotence(rng):
    for _ in range(20):
        n = 7
        triples = list(itertools.combinations(range(n), 3))
        pick = rng.choice(len(triples), size=6, replace=False)
        faces = [triples[i] for i in pick]
        w = rng.uniform(0.1, 3, size=6)
        K = propagate_weights(faces, w)
        assert np.isclose(K.vertex_weights.sum(), 2 * K.edge_weights.sum())
        K2 = propagate_weights(K.faces, K.face_weights, n=K.n)
        assert K2.edges == K.edges
        assert np.allclose(K2.edge_weights, K.edge_weights)
        assert np.allclose(K2.vertex_weights, K.vertex_weights)
        for x in range(K.n):
            if K.vertex_weights[x] > 0:
                assert validate(link_of(K, x)) == []


def test_graph_loops_count_twice():
    G = WeightedGraph.from_edges(1, [(0, 0), (0, 0)])
    assert G.vertex_weights[0] == 4
    assert G.adjacency()[0, 0] == 4
    assert validate(G) == []


def test_cycle_graph_requires_two_vertices():
    with pytest.raises(ComplexError):
        cycle_graph(1)
    assert cycle_graph(5).is_connected()
