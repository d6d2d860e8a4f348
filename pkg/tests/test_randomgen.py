import itertools
import math

import numpy as np
import pytest

from garlandlab.randomgen import (PRNG, RandomModelError, cyclically_reduced_words,
                                  density_presentation, friedman_threshold, group_statistics,
                                  inverse, letter_name, link_graph_of_presentation,
                                  permutation_model_graph, relator_count, sample_rng,
                                  spectral_statistics, tree_reference, zuk_verdict)
from garlandlab.spectral import scalar_spectral_gap


def test_prng_is_named():
    assert "Philox" in PRNG


def test_streams_are_reproducible_and_distinct():
    a = sample_rng(5, 1).random(4)
    assert np.array_equal(a, sample_rng(5, 1).random(4))
    assert not np.array_equal(a, sample_rng(5, 2).random(4))


def test_permutation_model_is_regular():
    G = permutation_model_graph(50, 3, 7)
    assert np.all(G.vertex_weights == 6)
    assert len(G.edges) == 150


def test_regression_anchor():
    # frozen value for n = 2000, d = 2, seed 0
    lam = scalar_spectral_gap(permutation_model_graph(2000, 2, 0)).lam
    assert lam == pytest.approx(0.1380595848520561, abs=1e-10)


def test_reference_constants():
    assert tree_reference(2) == pytest.approx(1 - math.sqrt(3) / 2)
    assert friedman_threshold(2, 0) == pytest.approx(1 - (math.sqrt(3) / 2 + math.log(4) / 4))


def test_statistics_and_jobs_agree():
    one = spectral_statistics(100, 3, 4, seed=3, c=0.0, trace_k=4)
    two = spectral_statistics(100, 3, 4, seed=3, c=0.0, trace_k=4, jobs=2)
    assert one == two
    assert one["trace_bound_valid"]
    assert 0 <= one["fraction_above_threshold"] <= 1


def test_letters():
    assert inverse(0) == 1 and inverse(5) == 4
    assert letter_name(0) == "s1" and letter_name(3) == "s2^-1"


def test_relator_count_rounding():
    assert relator_count(10, 0.4) == 36
    assert relator_count(2, 1 / 3) == 4
    m, d = 10, 0.4
    x = (2 * m / (2 * m - 1)) * (2 * m - 1) ** (3 * d)
    assert relator_count(m, d) == math.floor(x + 0.5)


@pytest.mark.parametrize("m", [2, 3, 5])
def test_reduced_words_brute_force(m):
    L = 2 * m
    brute = [w for w in itertools.product(range(L), repeat=3)
             if w[1] != w[0] ^ 1 and w[2] != w[1] ^ 1 and w[0] != w[2] ^ 1]
    assert [tuple(r) for r in cyclically_reduced_words(m)] == brute


def test_presentation_and_link_graph():
    pres = density_presentation(10, 0.4, seed=1)
    assert len(pres.relators) == 36 and len(set(pres.relators)) == 36
    G = link_graph_of_presentation(pres)
    assert G.n == 20 and len(G.edges) == 3 * 36
    a, b, c = pres.relators[0]
    assert (min(a ^ 1, b), max(a ^ 1, b)) in {tuple(sorted(e)) for e in G.edges}
    d = pres.to_dict()
    assert d["relators"][0].count("s") == 3


def test_verdict_consistency():
    pres = density_presentation(10, 0.4, seed=2)
    v = zuk_verdict(pres)
    lam = scalar_spectral_gap(link_graph_of_presentation(pres)).lam
    assert v["lambda"] == lam
    assert v["certified"] == (v["connected"] and lam > 0.5)


def test_density_errors():
    with pytest.raises(RandomModelError):
        density_presentation(1, 0.3, 0)
    with pytest.raises(RandomModelError):
        density_presentation(3, 1.0, 0)
    with pytest.raises(RandomModelError):
        density_presentation(2, 0.99, 0)


def test_group_statistics_deterministic():
    a = group_statistics(10, 0.4, 5, seed=9)
    assert a == group_statistics(10, 0.4, 5, seed=9, jobs=2)
    assert 0 <= a["certified_fraction"] <= 1
