"""Wirtinger inequalities on cycles and loop-family lower bounds on spectral gaps.

For a map ``g`` of the ``k``-cycle, the ``j``-step energy is
``sum_c d(g(c), g(c + j))^2``.  A regular ``k``-gon of radius 1 has step
energy ``W(k, j) = 4k sin^2(pi j / k)`` for every ``j``.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .cat0 import Euclidean
from .complex import WeightedGraph


class WirtingerError(ValueError):
    pass


def wirtinger_constant(k: int, j: int) -> float:
    if not 1 <= j <= k:
        raise WirtingerError(f"need 1 <= j <= k, got j={j}, k={k}")
    return 4 * k * math.sin(math.pi * j / k) ** 2


def _cycle_points(space, g):
    pts = list(g)
    if len(pts) < 3:
        raise WirtingerError("a cycle map needs at least 3 points")
    return pts


def distance_j_energy(space, g, j: int) -> float:
    """Sum of ``d^2`` over unordered vertex pairs of ``C_k`` at cycle distance ``j``."""
    pts = _cycle_points(space, g)
    k = len(pts)
    if not 1 <= j <= k // 2:
        raise WirtingerError(f"need 1 <= j <= {k // 2}, got {j}")
    starts = range(k // 2) if 2 * j == k else range(k)
    return float(sum(space.distance(pts[c], pts[(c + j) % k]) ** 2 for c in starts))


def step_energy(space, g, j: int) -> float:
    """``sum_c d(g(c), g(c + j))^2`` over all ``k`` starting vertices."""
    pts = _cycle_points(space, g)
    k = len(pts)
    D2 = space.pairwise_sq_distances(pts)
    c = np.arange(k)
    return float(D2[c, (c + j) % k].sum())


def is_affine_circle(X, tol=1e-9) -> bool:
    """True when a Euclidean cycle map only uses Fourier modes 0 and +-1."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    G = np.fft.fft(X - X.mean(axis=0), axis=0)
    power = np.sum(np.abs(G) ** 2, axis=1)
    k = len(X)
    keep = {1 % k, (k - 1) % k}
    other = sum(power[m] for m in range(1, k) if m not in keep)
    return bool(other <= tol * max(power.sum(), 1e-300))


def wir_check(space, g, tol=1e-9) -> dict:
    """Compare ``E_1 / E_j`` with ``W(k,1) / W(k,j)`` for ``2 <= j <= k/2``."""
    pts = _cycle_points(space, g)
    k = len(pts)
    if k < 4:
        raise WirtingerError("Wirtinger checks need k >= 4")
    E1 = step_energy(space, pts, 1)
    if E1 == 0:
        raise WirtingerError("constant map")
    rows = []
    for j in range(2, k // 2 + 1):
        Ej = step_energy(space, pts, j)
        bound = wirtinger_constant(k, 1) / wirtinger_constant(k, j)
        ratio = math.inf if Ej == 0 else E1 / Ej
        rows.append({
            "j": j,
            "E1": E1,
            "Ej": Ej,
            "ratio": ratio,
            "bound": bound,
            "pass": bool(ratio >= bound - tol),
            "equality": bool(abs(ratio - bound) <= tol),
        })
    report = {"k": k, "rows": rows, "pass": all(r["pass"] for r in rows)}
    if isinstance(space, Euclidean):
        report["affine_circle"] = is_affine_circle(np.array(pts), tol)
    return report


def regular_polygon(k, radius=1.0):
    t = 2 * math.pi * np.arange(k) / k
    return radius * np.column_stack([np.cos(t), np.sin(t)])


def gromov_cycle_bound(k: int) -> float:
    """``1/2 |1 - exp(2 pi i / k)|^2``, the Gromov gap of ``C_k`` in any Wir_k space."""
    if k < 4:
        raise WirtingerError("need k >= 4")
    return 0.5 * abs(1 - np.exp(2j * math.pi / k)) ** 2


# ------------------------------------------------------------ loop families

def _normalize_loop(loop):
    loop = [int(c) for c in loop]
    if len(loop) > 1 and loop[0] == loop[-1]:
        loop = loop[:-1]
    return tuple(loop)


@dataclass(frozen=True)
class LoopFamily:
    host: WeightedGraph
    loops: tuple
    k: int

    @classmethod
    def build(cls, host, loops, k=None):
        loops = tuple(_normalize_loop(l) for l in loops)
        if not loops:
            raise WirtingerError("empty loop family")
        adj = host.simple_adjacency_lists()
        for i, loop in enumerate(loops):
            if len(loop) < 3:
                raise WirtingerError(f"loop {i} has fewer than 3 vertices")
            for a, b in zip(loop, loop[1:] + loop[:1]):
                if not (0 <= a < host.n and 0 <= b < host.n) or b not in adj[a]:
                    raise WirtingerError(f"loop {i}: {a} and {b} are not adjacent")
        longest = max(len(l) for l in loops)
        if k is None:
            k = longest
        if longest > k:
            raise WirtingerError(f"a loop of length {longest} exceeds k = {k}")
        return cls(host, loops, int(k))


def loop_family_certificate(family: LoopFamily) -> dict:
    """Lower bound ``(4 A r / (q k v^2)) * 1/2 |1 - e^{2 i pi / k}|^2`` on the gap.

    ``r`` is the least number of loops through a pair of distinct vertices,
    ``q`` the largest number of loop traversals of a host edge.
    """
    G = family.host
    A = len(G.edges)
    v = max(G.degree(c) for c in range(G.n))
    pair_count = Counter()
    edge_count = Counter()
    for loop in family.loops:
        verts = sorted(set(loop))
        for i, a in enumerate(verts):
            for b in verts[i + 1:]:
                pair_count[(a, b)] += 1
        for a, b in zip(loop, loop[1:] + loop[:1]):
            edge_count[(min(a, b), max(a, b))] += 1
    total_pairs = G.n * (G.n - 1) // 2
    r = min(pair_count.values()) if len(pair_count) == total_pairs else 0
    q = max(edge_count.values())
    k = family.k
    bound = (4 * A * r / (q * k * v * v)) * 0.5 * abs(1 - np.exp(2j * math.pi / k)) ** 2
    return {
        "A": A,
        "v": v,
        "r": r,
        "q": q,
        "k": k,
        "bound": float(bound),
        "vacuous": r == 0,
        "above_half": bool(bound > 0.5),
    }


def enumerate_cycles(G: WeightedGraph, length=6, max_vertices=200):
    """All simple cycles of the given length, each once, as vertex tuples.

    The smallest vertex comes first and the second vertex is smaller than
    the last, which removes rotations and reflections.
    """
    if G.n > max_vertices:
        raise WirtingerError(f"graph has {G.n} vertices, above the enumeration cap {max_vertices}")
    adj = [sorted(s) for s in G.simple_adjacency_lists()]
    out = []
    for s in range(G.n):
        path = [s]
        on_path = {s}

        def extend(u):
            if len(path) == length:
                if s in adj[u] and path[1] < path[-1]:
                    out.append(tuple(path))
                return
            for w in adj[u]:
                if w > s and w not in on_path:
                    path.append(w)
                    on_path.add(w)
                    extend(w)
                    path.pop()
                    on_path.discard(w)

        extend(s)
    return out


def averaged_regular_certificate(G: WeightedGraph, cycles, counts=None) -> dict:
    """Gap bound from a family of isometric ``k``-cycles with distance-regular counts.

    The bound is ``m(empty) / (v^2 sum_j N_1 W(k,j) / (Nt_j W(k,1)))`` where
    ``Nt_j = N_j`` for ``j < k/2`` and ``2 N_{k/2}`` otherwise.  The factor
    ``N_1`` converts the averaged first energy back to ``E(g)``.
    """
    cycles = [_normalize_loop(c) for c in cycles]
    if not cycles:
        raise WirtingerError("empty cycle family")
    k = len(cycles[0])
    if any(len(c) != k for c in cycles):
        raise WirtingerError("all cycles must have the same length")
    D = G.distance_matrix()
    half = k // 2
    if not np.all(np.isfinite(D)) or D.max() > half:
        raise WirtingerError(f"graph diameter exceeds floor(k/2) = {half}")
    adj = G.simple_adjacency_lists()
    for i, cyc in enumerate(cycles):
        for a in range(k):
            if cyc[(a + 1) % k] not in adj[cyc[a]]:
                raise WirtingerError(f"cycle {i}: {cyc[a]} and {cyc[(a + 1) % k]} are not adjacent")
            for b in range(a + 1, k):
                cd = min(b - a, k - (b - a))
                if D[cyc[a], cyc[b]] != cd:
                    raise WirtingerError(
                        f"cycle {i} is not isometric: vertices {cyc[a]}, {cyc[b]} are at "
                        f"distance {int(D[cyc[a], cyc[b]])} in the graph, {cd} on the cycle"
                    )
    through = Counter()
    for cyc in cycles:
        for a in range(k):
            for b in range(a + 1, k):
                x, y = sorted((cyc[a], cyc[b]))
                through[(x, y)] += 1
    found = {}
    for x in range(G.n):
        for y in range(x + 1, G.n):
            j = int(D[x, y])
            c = through.get((x, y), 0)
            if j not in found:
                found[j] = (c, (x, y))
            elif found[j][0] != c:
                raise WirtingerError(
                    f"pair {(x, y)} at distance {j} lies in {c} cycles but pair "
                    f"{found[j][1]} lies in {found[j][0]}"
                )
    N = {j: found[j][0] for j in sorted(found)}
    if counts is not None:
        for j, c in dict(counts).items():
            if N.get(int(j)) != c:
                raise WirtingerError(f"stated N_{j} = {c} but the family gives {N.get(int(j))}")
    if any(c == 0 for c in N.values()):
        raise WirtingerError("some vertex pair lies in no cycle")
    v = max(G.degree(c) for c in range(G.n))
    m_total = 2 * len(G.edges)
    W1 = wirtinger_constant(k, 1)
    total = 0.0
    for j in range(1, half + 1):
        Nt = N[j] if 2 * j < k else 2 * N[j]
        total += N[1] * wirtinger_constant(k, j) / (Nt * W1)
    bound = m_total / (v * v * total)
    return {"k": k, "v": v, "m_total": m_total, "N": N, "bound": float(bound)}
