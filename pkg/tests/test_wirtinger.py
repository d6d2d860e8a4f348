import itertools
import json
import math
from pathlib import Path

import numpy as np
import pytest

from garlandlab.cat0 import Euclidean, MetricTree
from garlandlab.complex import WeightedGraph, cycle_graph
from garlandlab.harmonic import VertexMap
from garlandlab.incidence import projective_plane_incidence
from garlandlab.spectral import gromov_rayleigh, scalar_spectral_gap
from garlandlab.wirtinger import (LoopFamily, WirtingerError, averaged_regular_certificate,
                                  distance_j_energy, enumerate_cycles, gromov_cycle_bound,
                                  is_affine_circle, loop_family_certificate, regular_polygon,
                                  step_energy, wir_check, wirtinger_constant)

DATA = Path(__file__).resolve().parent.parent / "data"


def test_constants():
    assert wirtinger_constant(4, 1) == pytest.approx(8.0)
    assert wirtinger_constant(6, 3) == pytest.approx(24.0)
    with pytest.raises(WirtingerError):
        wirtinger_constant(5, 0)


def test_energies_by_hand():
    E = Euclidean(1)
    g = [np.array([x]) for x in (0.0, 1.0, 3.0, 2.0)]
    assert step_energy(E, g, 1) == pytest.approx(1 + 4 + 1 + 4)
    # pairs at distance 2: (0,2) and (1,3), each once
    assert distance_j_energy(E, g, 2) == pytest.approx(9 + 1)
    assert step_energy(E, g, 2) == pytest.approx(2 * (9 + 1))


def test_regular_polygon_equality():
    for k in range(4, 40):
        rep = wir_check(Euclidean(2), list(regular_polygon(k)))
        assert rep["pass"] and all(r["equality"] for r in rep["rows"])
        assert rep["affine_circle"]


def test_random_euclidean_and_tree_maps(rng):
    for _ in range(300):
        k = int(rng.integers(4, 13))
        if rng.random() < 0.5:
            space = Euclidean(int(rng.integers(1, 4)))
            g = [rng.normal(size=space.dim) for _ in range(k)]
        else:
            space = MetricTree.random(rng, int(rng.integers(1, 8)))
            g = [space.random_point(rng) for _ in range(k)]
        try:
            rep = wir_check(space, g)
        except WirtingerError:
            continue
        assert rep["pass"]


def test_affine_circle_detection(rng):
    X = regular_polygon(7) @ rng.normal(size=(2, 3)) + rng.normal(size=3)
    assert is_affine_circle(X)
    X[0] += 0.1
    assert not is_affine_circle(X)


def test_constant_map_rejected():
    with pytest.raises(WirtingerError):
        wir_check(Euclidean(1), [np.zeros(1)] * 5)


def test_cycle_bound_is_gap():
    for k in range(4, 30):
        assert gromov_cycle_bound(k) == pytest.approx(scalar_spectral_gap(cycle_graph(k)).lam)


def test_cycle_gromov_rq_in_tree_at_least_bound(rng):
    for _ in range(100):
        k = int(rng.integers(4, 10))
        T = MetricTree.random(rng, 5)
        g = VertexMap.random(T, k, rng)
        try:
            q = gromov_rayleigh(cycle_graph(k), g)
        except ValueError:
            continue
        assert q >= gromov_cycle_bound(k) - 1e-9


def _brute_cycles(G, length):
    adj = G.simple_adjacency_lists()
    found = set()
    for combo in itertools.permutations(range(G.n), length):
        if combo[0] != min(combo) or combo[1] > combo[-1]:
            continue
        if all(combo[(i + 1) % length] in adj[combo[i]] for i in range(length)):
            found.add(combo)
    return found


def test_enumerate_cycles_matches_brute_force():
    G = WeightedGraph.from_edges(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (0, 3), (1, 4)])
    for L in (3, 4, 5, 6):
        assert set(enumerate_cycles(G, L)) == _brute_cycles(G, L)


def test_heawood_hexagons():
    G = projective_plane_incidence(2).graph
    hexes = enumerate_cycles(G, 6)
    assert len(hexes) == 28
    stored = {tuple(c) for c in json.loads((DATA / "heawood_hexagons.json").read_text())}
    assert stored == set(hexes)


def test_heawood_averaged_bound():
    G = projective_plane_incidence(2).graph
    rep = averaged_regular_certificate(G, enumerate_cycles(G, 6))
    assert rep["bound"] == pytest.approx(14 / 37, abs=1e-12)
    assert rep["bound"] <= scalar_spectral_gap(G).lam


def test_c6_averaged_bound():
    rep = averaged_regular_certificate(cycle_graph(6), [tuple(range(6))])
    assert rep["bound"] == pytest.approx(0.5)


def test_averaged_rejects_nonisometric():
    # the outer 6-cycle of a hexagon with a chord is not isometric
    G = WeightedGraph.from_edges(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (0, 3)])
    with pytest.raises(WirtingerError, match="not isometric"):
        averaged_regular_certificate(G, [tuple(range(6))])


def test_averaged_rejects_stated_counts():
    with pytest.raises(WirtingerError, match="stated"):
        averaged_regular_certificate(cycle_graph(6), [tuple(range(6))], counts={1: 2})


def test_loop_family_heawood():
    G = projective_plane_incidence(2).graph
    fam = LoopFamily.build(G, enumerate_cycles(G, 6))
    rep = loop_family_certificate(fam)
    assert (rep["A"], rep["r"], rep["q"], rep["v"]) == (21, 3, 8, 3)
    assert rep["bound"] == pytest.approx(0.29167, abs=1e-5)
    assert not rep["above_half"]


def test_loop_family_vacuous_and_invalid():
    G = projective_plane_incidence(2).graph
    fam = LoopFamily.build(G, enumerate_cycles(G, 6)[:1])
    assert loop_family_certificate(fam)["vacuous"]
    with pytest.raises(WirtingerError, match="not adjacent"):
        LoopFamily.build(G, [(0, 1, 2)])
    with pytest.raises(WirtingerError):
        LoopFamily.build(G, [])


def test_enumeration_cap():
    with pytest.raises(WirtingerError):
        enumerate_cycles(cycle_graph(300), 6)
