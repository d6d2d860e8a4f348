import json
from pathlib import Path

import numpy as np
import pytest

from garlandlab import complex as cx
from garlandlab.cat0 import Euclidean, MetricTree, Product
from garlandlab.formats import (FormatError, cocycle_from_json, dump_text, dumps, load,
                                map_from_json, parse_text, to_jsonable)
from garlandlab.harmonic import EdgeCocycle, VertexMap, lattice_cocycle

DATA = Path(__file__).resolve().parent.parent / "data"


def test_bundled_files_load():
    K = load(DATA / "torus.complex")
    ref, _ = cx.torus_complex()
    assert K.faces == ref.faces and np.allclose(K.vertex_weights, ref.vertex_weights)
    assert load(DATA / "icosahedron.complex").n == 12
    assert isinstance(load(DATA / "tripod.tree"), MetricTree)
    assert load(DATA / "heawood.graph").n == 14


def test_text_round_trips():
    K = cx.propagate_weights([(0, 1, 2), (1, 2, 3)], [1.5, 0.25], free_edges=[(0, 3, 2.0)])
    K2 = parse_text(dump_text(K))
    assert K2.faces == K.faces and K2.edges == K.edges
    assert np.array_equal(K2.edge_weights, K.edge_weights)
    G = cx.WeightedGraph.from_edges(3, [(0, 1), (1, 2), (2, 2)], [0.1, 0.2, 0.3])
    G2 = parse_text(dump_text(G))
    assert G2.edges == G.edges and np.array_equal(G2.vertex_weights, G.vertex_weights)
    T = MetricTree.tripod(0.7)
    assert parse_text(dump_text(T)) == T


@pytest.mark.parametrize("text,msg", [
    ("", "empty file"),
    ("graph\ne 0 1 1.0\n", "2: 'v N' must come before"),
    ("graph\nv 2\ne 0 2 1.0\n", "3: vertex 2 outside"),
    ("graph\nv 2\ne 0 1 -1\n", "3: weight must be positive"),
    ("graph\nv 2\ne 0 1\n", "3: 'e' takes 3 fields"),
    ("complex\nv 3\nt 0 1 2 1\nt 2 1 0 1\n", "4: duplicate face"),
    ("complex\nv 3\nt 0 1 1 1\n", "3: face needs three distinct"),
    ("graph\nv 2\nt 0 1 2 1\n", "3: unknown record"),
    ("blob\n", "1: expected header"),
    ("graph\nv x\n", "2: 'x' is not an integer"),
    ("tree\nv 3\ne 0 1 1\ne 1 0 1\n", "<text>"),
])
def test_parse_errors_point_at_lines(text, msg):
    with pytest.raises(FormatError, match=msg):
        parse_text(text)


def test_comments_ignored():
    G = parse_text("# a path\ngraph\nv 2  # two vertices\ne 0 1 1.0\n")
    assert G.edges == ((0, 1),)


def test_json_map_round_trip(rng):
    T = MetricTree.random(rng, 4)
    P = Product((Euclidean(2), T))
    f = VertexMap.random(P, 5, rng)
    g = map_from_json(json.loads(dumps(f)))
    for a, b in zip(f.points, g.points):
        assert P.distance(a, b) < 1e-15


def test_json_cocycle_round_trip():
    K, coords = cx.torus_complex()
    c = lattice_cocycle(K, coords, 3, 3)
    c2 = cocycle_from_json(json.loads(dumps(c)))
    for u, v in K.edges:
        assert np.allclose(c(u, v), c2(u, v))


def test_dumps_is_deterministic():
    obj = {"b": np.float64(1.5), "a": np.arange(3), "c": (1, True)}
    assert dumps(obj) == dumps(dict(reversed(list(obj.items()))))
    assert json.loads(dumps(obj)) == {"a": [0, 1, 2], "b": 1.5, "c": [1, True]}


def test_unknown_space():
    from garlandlab.formats import space_from_json

    with pytest.raises(FormatError):
        space_from_json({"type": "sphere"})
