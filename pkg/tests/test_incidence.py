import itertools
import math

import numpy as np
import pytest

from garlandlab.complex import WeightedGraph, cycle_graph
from garlandlab.incidence import (IncidenceError, building_embedding_rq, building_rq_closed_form,
                                  feit_higman_compare, generalized_triangle_check, girth,
                                  is_prime, projective_plane_incidence)
from garlandlab.spectral import scalar_spectral_gap


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_projective_plane_axioms(p):
    I = projective_plane_incidence(p)
    N = p * p + p + 1
    assert I.n == 2 * N and len(I.graph.edges) == N * (p + 1)
    adj = I.graph.simple_adjacency_lists()
    assert all(len(adj[c]) == p + 1 for c in range(2 * N))
    # two points share exactly one line, two lines exactly one point
    for side in (range(N), range(N, 2 * N)):
        for a, b in itertools.combinations(list(side)[:12], 2):
            assert len(adj[a] & adj[b]) == 1


@pytest.mark.parametrize("p", [2, 3, 5])
def test_gap_matches_sqrt_form(p):
    lam = scalar_spectral_gap(projective_plane_incidence(p).graph).lam
    assert lam == pytest.approx(1 - math.sqrt(p) / (p + 1), abs=1e-12)
    rep = feit_higman_compare(p)
    assert rep["eigensolved"] == pytest.approx(lam)


def test_not_prime():
    assert not is_prime(4) and is_prime(7) and not is_prime(1)
    with pytest.raises(IncidenceError):
        projective_plane_incidence(4)


def test_girth_examples():
    assert girth(cycle_graph(7))[0] == 7
    K4 = WeightedGraph.from_edges(4, list(itertools.combinations(range(4), 2)))
    assert girth(K4)[0] == 3
    assert girth(WeightedGraph.from_edges(3, [(0, 1), (1, 2)]))[0] == math.inf
    assert girth(WeightedGraph.from_edges(2, [(0, 1), (0, 1)]))[0] == 2
    assert girth(projective_plane_incidence(3).graph)[0] == 6


def test_generalized_triangle():
    assert generalized_triangle_check(projective_plane_incidence(2).graph)["ok"]
    bad = generalized_triangle_check(cycle_graph(4))
    assert not bad["ok"] and bad["reason"] == "short cycle"
    rep = generalized_triangle_check(cycle_graph(8))
    assert not rep["ok"]


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_building_census(p):
    rep = building_embedding_rq(p)
    assert rep["counts_match"]
    assert rep["rq_gromov"] == pytest.approx(building_rq_closed_form(p), abs=1e-12)
    assert rep["rq"] == pytest.approx(0.5)


def test_building_closed_form_p2():
    assert building_rq_closed_form(2) == pytest.approx(14 / 37)
