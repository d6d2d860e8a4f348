"""Incidence graphs of projective planes over prime fields and related censuses."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .complex import WeightedGraph
from .spectral import scalar_spectral_gap
from .wirtinger import enumerate_cycles

CLOSED_FORM_TOL = 1e-9
# squared distances in the building between link vertices at graph distance 1, 2, 3
BUILDING_SQ_DIST = {1: 1.0, 2: 3.0, 3: 4.0}


class IncidenceError(ValueError):
    pass


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % q for q in range(2, math.isqrt(p) + 1))


def projective_points(p):
    """Normalized representatives of the lines through 0 in F_p^3."""
    pts = []
    for v in itertools.product(range(p), repeat=3):
        nz = [c for c in v if c]
        if nz and nz[0] == 1:
            pts.append(v)
    return pts


@dataclass(frozen=True)
class IncidenceGraph:
    graph: WeightedGraph
    p: int
    sides: tuple

    @property
    def n(self):
        return self.graph.n


def projective_plane_incidence(p: int) -> IncidenceGraph:
    """Points ``0..N-1`` and lines ``N..2N-1`` of PG(2, p); edges are incidences."""
    if not is_prime(int(p)):
        raise IncidenceError(f"{p} is not prime")
    P = np.array(projective_points(p))
    N = len(P)
    inc = (P @ P.T) % p == 0
    edges = [(i, N + j) for i, j in zip(*np.nonzero(inc))]
    G = WeightedGraph.from_edges(2 * N, edges)
    return IncidenceGraph(G, int(p), ("point",) * N + ("line",) * N)


def girth(G: WeightedGraph):
    """Length of a shortest cycle (loops 1, parallel edges 2); ``inf`` for forests."""
    seen = set()
    for u, v in G.edges:
        if u == v:
            return 1, (u,)
        key = (min(u, v), max(u, v))
        if key in seen:
            return 2, key
        seen.add(key)
    adj = G.simple_adjacency_lists()
    best, witness = math.inf, None
    for s in range(G.n):
        dist, parent = {s: 0}, {s: None}
        frontier = [s]
        while frontier:
            nxt = []
            for u in frontier:
                for w in adj[u]:
                    if w not in dist:
                        dist[w], parent[w] = dist[u] + 1, u
                        nxt.append(w)
                    elif parent[u] != w:
                        length = dist[u] + dist[w] + 1
                        if length < best:
                            best, witness = length, (s, u, w)
            frontier = nxt
    return best, witness


def generalized_triangle_check(G: WeightedGraph) -> dict:
    """Girth at least 6 and every pair of edges lies on a common 6-cycle."""
    g, w = girth(G)
    if g < 6:
        return {"ok": False, "reason": "short cycle", "girth": g, "witness": list(w)}
    covered = set()
    for cyc in enumerate_cycles(G, 6):
        es = [tuple(sorted((cyc[i], cyc[(i + 1) % 6]))) for i in range(6)]
        covered.update(itertools.combinations(sorted(es), 2))
    edges = sorted({tuple(sorted(e)) for e in G.edges})
    for pair in itertools.combinations(edges, 2):
        if pair not in covered:
            return {"ok": False, "reason": "edge pair in no 6-cycle", "girth": g,
                    "witness": [list(pair[0]), list(pair[1])]}
    return {"ok": True, "girth": g, "witness": None}


def building_rq_closed_form(p) -> float:
    return 2 * (p * p + p + 1) / (7 * p * p + 4 * p + 1)


def building_embedding_rq(p: int) -> dict:
    """Distance census of the link and the quotients of its embedding in the building.

    Link vertices at graph distance 1, 2, 3 sit at building distance
    1, sqrt 3, 2; all of them are at distance 1 from the apex, which is the
    barycenter of the embedding.
    """
    I = projective_plane_incidence(p)
    G = I.graph
    n = G.n
    d = p + 1
    D = G.distance_matrix()
    counts = {j: int(np.sum(D == j)) for j in (1, 2, 3)}
    expected = {1: n * d, 2: n * d * (d - 1), 3: n * (d - 1) ** 2}
    m = np.asarray(G.vertex_weights)
    E = 0.5 * n * d
    F = sum(m[0] * m[0] * counts[j] * BUILDING_SQ_DIST[j] for j in counts) / (2 * m.sum())
    rq_gro = E / F
    closed = building_rq_closed_form(p)
    if abs(rq_gro - closed) > CLOSED_FORM_TOL:
        raise AssertionError(f"census quotient {rq_gro} differs from closed form {closed}")
    rq = E / float(m.sum())
    return {
        "p": int(p),
        "n": n,
        "d": d,
        "counts": counts,
        "expected_counts": expected,
        "counts_match": counts == expected,
        "energy": E,
        "dispersion": F,
        "rq_gromov": rq_gro,
        "rq_gromov_closed_form": closed,
        "rq": rq,
    }


def feit_higman_compare(p: int) -> dict:
    """Eigensolved gap next to the two readings of the closed-form generalized polygon value."""
    I = projective_plane_incidence(p)
    lam = scalar_spectral_gap(I.graph).lam

    def formula(q):
        return 1 - math.sqrt(q - 2) / (q - 1)

    q_field, q_valence = formula(p), formula(p + 1)
    return {
        "p": int(p),
        "eigensolved": lam,
        "exact_sqrt_form": 1 - math.sqrt(p) / (p + 1),
        "formula_q_field": q_field,
        "formula_q_valence": q_valence,
        "diff_q_field": abs(lam - q_field),
        "diff_q_valence": abs(lam - q_valence),
    }
