"""CAT(0) model targets: Euclidean spaces, finite metric trees and products.

Every space exposes the same small surface -- ``distance``, ``geodesic``,
``barycenter``, ``pairwise_sq_distances`` -- so energies and Rayleigh
quotients can be written once.  Tree points are ``TreePoint(edge, offset)``
with vertices snapped to a unique canonical edge.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SNAP = 1e-12
FEAS_TOL = 1e-9


class TargetError(ValueError):
    pass


# ---------------------------------------------------------------- Euclidean

@dataclass(frozen=True)
class Euclidean:
    dim: int

    def __post_init__(self):
        if self.dim < 1:
            raise TargetError("Euclidean dimension must be positive")

    def check(self, p):
        p = np.asarray(p, dtype=float)
        if p.shape != (self.dim,):
            raise TargetError(f"point of shape {p.shape} is not in R^{self.dim}")
        return p

    def distance(self, p, q) -> float:
        return float(np.linalg.norm(self.check(p) - self.check(q)))

    def geodesic(self, p, q, t):
        _check_t(t)
        return (1 - t) * self.check(p) + t * self.check(q)

    def barycenter(self, points, weights):
        X = np.asarray([self.check(p) for p in points])
        w = _weights(weights, len(X))
        return (w[:, None] * X).sum(axis=0) / w.sum()

    def pairwise_sq_distances(self, points):
        X = np.asarray(points, dtype=float)
        G = X @ X.T
        n = np.diag(G)
        return np.maximum(n[:, None] + n[None, :] - 2 * G, 0.0)

    def random_point(self, rng, scale=1.0):
        return rng.normal(scale=scale, size=self.dim)


# -------------------------------------------------------------- metric tree

@dataclass(frozen=True)
class TreePoint:
    edge: int
    offset: float


class MetricTree:
    """Finite tree with positive edge lengths.

    ``edges`` are ``(u, v, length)`` on vertices ``0..n-1``.  Pairwise vertex
    distances are precomputed, so the tree is meant to stay small.
    """

    def __init__(self, n, edges):
        from scipy.sparse import csr_matrix
        from scipy.sparse.csgraph import connected_components, shortest_path

        edges = [(int(u), int(v), float(L)) for u, v, L in edges]
        if n < 2 or len(edges) != n - 1:
            raise TargetError(f"a tree on {n} vertices needs {n - 1} edges and n >= 2")
        for u, v, L in edges:
            if not (0 <= u < n and 0 <= v < n) or u == v:
                raise TargetError(f"bad tree edge ({u}, {v})")
            if not L > 0:
                raise TargetError(f"tree edge ({u}, {v}) has non-positive length {L}")
        rows = [u for u, v, _ in edges] + [v for u, v, _ in edges]
        cols = [v for u, v, _ in edges] + [u for u, v, _ in edges]
        lens = [L for *_, L in edges] * 2
        A = csr_matrix((lens, (rows, cols)), shape=(n, n))
        if connected_components(A, directed=False)[0] != 1:
            raise TargetError("tree is not connected")
        self.n = n
        self.edges = tuple(edges)
        self.D = shortest_path(A, directed=False)
        self.incident = [[] for _ in range(n)]
        for i, (u, v, _) in enumerate(edges):
            self.incident[u].append(i)
            self.incident[v].append(i)

    def __eq__(self, other):
        return isinstance(other, MetricTree) and self.n == other.n and self.edges == other.edges

    def __hash__(self):
        return hash((self.n, self.edges))

    def __repr__(self):
        return f"MetricTree(n={self.n}, edges={list(self.edges)})"

    # points ---------------------------------------------------------------

    def length(self, e) -> float:
        return self.edges[e][2]

    def other_end(self, e, v):
        a, b, _ = self.edges[e]
        return b if v == a else a

    def vertex_point(self, k) -> TreePoint:
        e = min(self.incident[k])
        a, _, L = self.edges[e]
        return TreePoint(e, 0.0 if a == k else L)

    def point(self, edge, offset) -> TreePoint:
        """Canonical point at ``offset`` from the first endpoint of ``edge``."""
        a, b, L = self.edges[edge]
        if offset < -SNAP or offset > L + SNAP:
            raise TargetError(f"offset {offset} outside [0, {L}] on edge {edge}")
        if offset <= SNAP:
            return self.vertex_point(a)
        if offset >= L - SNAP:
            return self.vertex_point(b)
        return TreePoint(int(edge), float(offset))

    def check(self, p):
        if not isinstance(p, TreePoint) or not 0 <= p.edge < len(self.edges):
            raise TargetError(f"{p!r} is not a point of this tree")
        return p

    def vertex_of(self, p):
        a, b, L = self.edges[p.edge]
        if p.offset <= SNAP:
            return a
        if p.offset >= L - SNAP:
            return b
        return None

    def _anchors(self, p):
        k = self.vertex_of(p)
        if k is not None:
            return [(k, 0.0)]
        a, b, L = self.edges[p.edge]
        return [(a, p.offset), (b, L - p.offset)]

    def dist_to_vertices(self, p) -> np.ndarray:
        a, b, L = self.edges[p.edge]
        return np.minimum(p.offset + self.D[a], L - p.offset + self.D[b])

    # metric ---------------------------------------------------------------

    def distance(self, p, q) -> float:
        self.check(p), self.check(q)
        if p.edge == q.edge:
            return abs(p.offset - q.offset)
        return min(da + self.D[x, y] + db for x, da in self._anchors(p) for y, db in self._anchors(q))

    def pairwise_sq_distances(self, points):
        n = len(points)
        DV = np.array([self.dist_to_vertices(p) for p in points])
        e = np.array([p.edge for p in points])
        t = np.array([p.offset for p in points])
        a = np.array([self.edges[i][0] for i in e])
        b = np.array([self.edges[i][1] for i in e])
        L = np.array([self.edges[i][2] for i in e])
        via = np.minimum(DV[:, a] + t[None, :], DV[:, b] + (L - t)[None, :])
        same = e[:, None] == e[None, :]
        d = np.where(same, np.abs(t[:, None] - t[None, :]), via)
        d[np.arange(n), np.arange(n)] = 0.0
        return d ** 2

    def next_hop(self, cur, target):
        """Edge leaving vertex ``cur`` on the path to vertex ``target``."""
        return min(self.incident[cur], key=lambda e: self.D[self.other_end(e, cur), target])

    def _at(self, e, v, s):
        """Point on edge ``e`` at distance ``s`` from its endpoint ``v``."""
        a, _, L = self.edges[e]
        s = min(max(s, 0.0), L)
        return self.point(e, s if v == a else L - s)

    def geodesic(self, p, q, t):
        _check_t(t)
        self.check(p), self.check(q)
        if t == 0:
            return p
        if t == 1:
            return q
        if p.edge == q.edge:
            return self.point(p.edge, (1 - t) * p.offset + t * q.offset)
        (x, dp), (y, dq) = min(
            ((ap, aq) for ap in self._anchors(p) for aq in self._anchors(q)),
            key=lambda c: c[0][1] + self.D[c[0][0], c[1][0]] + c[1][1],
        )
        s = t * (dp + self.D[x, y] + dq)
        if s <= dp:
            if dp == 0.0:
                return p
            # walk from p toward its endpoint x
            return self._at(p.edge, x, dp - s)
        s -= dp
        cur = x
        while cur != y:
            e = self.next_hop(cur, y)
            L = self.length(e)
            if s <= L:
                return self._at(e, cur, s)
            s -= L
            cur = self.other_end(e, cur)
        if dq == 0.0:
            return q
        return self._at(q.edge, y, s)

    # barycenter -----------------------------------------------------------

    def barycenter(self, points, weights) -> TreePoint:
        """Exact minimizer of ``u(y) = sum w_i d(z_i, y)^2``.

        Start at the best vertex, follow the (unique) direction of negative
        one-sided derivative, and minimize the piecewise quadratic ``u`` on
        that edge in closed form; repeat from the far endpoint if needed.
        """
        points = [self.check(p) for p in points]
        w = _weights(weights, len(points))
        DV = np.array([self.dist_to_vertices(p) for p in points])
        interior = [self.vertex_of(p) is None for p in points]
        v = int(np.argmin((w[:, None] * DV ** 2).sum(axis=0)))
        came_from = None
        for _ in range(self.n + 1):
            best = None
            for e in self.incident[v]:
                if e == came_from:
                    continue
                nb = self.other_end(e, v)
                toward = np.array([
                    (interior[i] and points[i].edge == e) or DV[i, nb] < DV[i, v]
                    for i in range(len(points))
                ])
                deriv = 2 * float(np.sum(w * DV[:, v] * np.where(toward, -1.0, 1.0)))
                if best is None or deriv < best[0]:
                    best = (deriv, e, nb, toward)
            scale = float(np.sum(w * DV[:, v])) + 1.0
            if best is None or best[0] >= -1e-13 * scale:
                return self.vertex_point(v)
            _, e, nb, toward = best
            L = self.length(e)
            tstar = self._edge_argmin(e, v, points, w, DV[:, v], toward, interior)
            if tstar < L - SNAP:
                return self._at(e, v, tstar)
            came_from, v = e, nb
        raise RuntimeError("tree barycenter descent did not terminate")

    def _edge_argmin(self, e, v, points, w, dv, toward, interior):
        a, _, L = self.edges[e]
        on_edge = {}
        for i, p in enumerate(points):
            if interior[i] and p.edge == e:
                on_edge[i] = p.offset if v == a else L - p.offset
        cuts = sorted({0.0, L, *on_edge.values()})
        best_t, best_u = 0.0, math.inf
        for lo, hi in zip(cuts[:-1], cuts[1:]):
            mid = 0.5 * (lo + hi)
            slope = np.empty(len(points))
            icpt = np.empty(len(points))
            for i in range(len(points)):
                if i in on_edge:
                    s = on_edge[i]
                    slope[i], icpt[i] = (1.0, -s) if s <= mid else (-1.0, s)
                elif toward[i]:
                    slope[i], icpt[i] = -1.0, dv[i]
                else:
                    slope[i], icpt[i] = 1.0, dv[i]
            t = -float(np.sum(w * slope * icpt)) / float(np.sum(w))
            t = min(max(t, lo), hi)
            u = float(np.sum(w * (slope * t + icpt) ** 2))
            if u < best_u:
                best_t, best_u = t, u
        return best_t

    def u(self, points, weights, y) -> float:
        return float(sum(wi * self.distance(p, y) ** 2 for p, wi in zip(points, weights)))

    # sampling -------------------------------------------------------------

    @classmethod
    def random(cls, rng, n_edges, lengths=(0.2, 1.5)):
        """Random recursive tree with uniform edge lengths."""
        edges = []
        for v in range(1, n_edges + 1):
            u = int(rng.integers(0, v))
            edges.append((u, v, float(rng.uniform(*lengths))))
        return cls(n_edges + 1, edges)

    def random_point(self, rng, vertex_prob=0.2):
        e = int(rng.integers(0, len(self.edges)))
        L = self.length(e)
        if rng.random() < vertex_prob:
            return self.point(e, 0.0 if rng.random() < 0.5 else L)
        return self.point(e, float(rng.uniform(0, L)))

    def tripod(leg=1.0):
        return MetricTree(4, [(0, 1, leg), (0, 2, leg), (0, 3, leg)])

    tripod = staticmethod(tripod)


# ------------------------------------------------------------------ product

@dataclass(frozen=True)
class Product:
    factors: tuple

    def __post_init__(self):
        if not self.factors:
            raise TargetError("a product needs at least one factor")
        object.__setattr__(self, "factors", tuple(self.factors))

    def check(self, p):
        if len(p) != len(self.factors):
            raise TargetError("product point has the wrong number of members")
        return tuple(Y.check(x) for Y, x in zip(self.factors, p))

    def distance(self, p, q) -> float:
        return math.sqrt(sum(Y.distance(x, y) ** 2 for Y, x, y in zip(self.factors, p, q)))

    def geodesic(self, p, q, t):
        return tuple(Y.geodesic(x, y, t) for Y, x, y in zip(self.factors, p, q))

    def barycenter(self, points, weights):
        return tuple(
            Y.barycenter([p[i] for p in points], weights) for i, Y in enumerate(self.factors)
        )

    def pairwise_sq_distances(self, points):
        return sum(
            Y.pairwise_sq_distances([p[i] for p in points]) for i, Y in enumerate(self.factors)
        )

    def random_point(self, rng):
        return tuple(Y.random_point(rng) for Y in self.factors)


def _check_t(t):
    if not 0.0 <= t <= 1.0:
        raise TargetError(f"geodesic parameter {t} outside [0, 1]")


def _weights(weights, n):
    w = np.asarray(weights, dtype=float)
    if n == 0:
        raise TargetError("empty point set")
    if w.shape != (n,) or np.any(w <= 0):
        raise TargetError("weights must be positive, one per point")
    return w


# module-level spellings used by the CLI and tests

def distance(space, p, q):
    return space.distance(p, q)


def geodesic_point(space, p, q, t):
    return space.geodesic(p, q, t)


def barycenter(space, points, weights=None):
    if weights is None:
        weights = np.ones(len(points))
    return space.barycenter(points, weights)


# ------------------------------------------------------- tangent cone stars

@dataclass(frozen=True)
class StarData:
    """Projection of a weighted point set to the tangent cone of a tree.

    ``branch[i] == -1`` marks a point sitting on the apex.  ``directions``
    names each branch as ``(edge, far endpoint)``.
    """

    directions: tuple
    mass: np.ndarray
    branch: np.ndarray
    radius: np.ndarray
    weights: np.ndarray

    @property
    def n_branches(self):
        return len(self.directions)


def tangent_cone_star(tree: MetricTree, base: TreePoint, points, weights) -> StarData:
    w = _weights(weights, len(points))
    k = tree.vertex_of(base)
    if k is None:
        a, b, _ = tree.edges[base.edge]
        directions = ((base.edge, a), (base.edge, b))
    else:
        directions = tuple((e, tree.other_end(e, k)) for e in tree.incident[k])
    slot = {d: i for i, d in enumerate(directions)}
    branch = np.full(len(points), -1)
    radius = np.zeros(len(points))
    for i, z in enumerate(points):
        r = tree.distance(base, z)
        if r <= SNAP:
            continue
        radius[i] = r
        if k is None:
            a, b, _ = tree.edges[base.edge]
            if z.edge == base.edge:
                branch[i] = 0 if z.offset < base.offset else 1
            else:
                dv = tree.dist_to_vertices(z)
                branch[i] = 0 if dv[a] < dv[b] else 1
        else:
            if tree.vertex_of(z) is None and k in tree.edges[z.edge][:2]:
                e = z.edge
            else:
                zv = tree.vertex_of(z)
                if zv is None:
                    a, b, _ = tree.edges[z.edge]
                    zv = a if tree.D[k, a] < tree.D[k, b] else b
                e = tree.next_hop(k, zv)
            branch[i] = slot[(e, tree.other_end(e, k))]
    mass = np.zeros(len(directions))
    for i in range(len(points)):
        if branch[i] >= 0:
            mass[branch[i]] += w[i] * radius[i]
    return StarData(directions, mass, branch, radius, w)


def star_barycenter(star: StarData):
    """Barycenter of the projected points inside the star: ``(branch, radius)``.

    On branch ``i`` the function ``u`` is ``W t^2 + 2 t (rest - a_i) + const``,
    so the minimizer leaves the apex only along a branch with
    ``a_i > sum_{j != i} a_j``.
    """
    total = float(star.mass.sum())
    W = float(star.weights.sum())
    for i, ai in enumerate(star.mass):
        excess = ai - (total - ai)
        if excess > 0:
            return i, excess / W
    return -1, 0.0


def polygon_closing_embedding(mass) -> np.ndarray:
    """Unit vectors ``e_i`` in the plane with ``sum a_i e_i = 0``.

    The largest side is one side of a triangle whose two other sides are
    greedy groups of the remaining lengths; members of a group share a
    direction.  Zero-mass branches get ``(1, 0)``.
    """
    a = np.asarray(mass, dtype=float)
    if np.any(a < 0):
        raise TargetError("branch masses must be nonnegative")
    total = float(a.sum())
    E = np.tile([1.0, 0.0], (len(a), 1))
    if total == 0:
        return E
    a = a / total
    for i, ai in enumerate(a):
        if ai > 1 - ai + FEAS_TOL:
            raise TargetError(
                f"barycenter not at apex: branch {i} has mass {ai * total} > {(1 - ai) * total}"
            )
    order = sorted(range(len(a)), key=lambda i: -a[i])
    big = order[0]
    A = a[big]
    groups = ([], [])
    sums = [0.0, 0.0]
    for i in order[1:]:
        if a[i] == 0:
            continue
        g = 0 if sums[0] <= sums[1] else 1
        groups[g].append(i)
        sums[g] += a[i]
    B, C = sums
    # triangle 0 -> A e_A -> A e_A + B e_B -> 0; apex coordinates via Kahan's area
    # formula, which stays accurate for flat triangles (no acos near 1)
    x = (A * A + C * C - B * B) / (2 * A)
    y = 2 * _triangle_area(A, B, C) / A
    E[big] = (1.0, 0.0)
    eB = _unit([x - A, y])
    for i in groups[0]:
        E[i] = eB
    if C > 0:
        eC = _unit([-x, -y])
        for i in groups[1]:
            E[i] = eC
    return E


def _unit(v):
    # a side of negligible length may point anywhere
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v)
    return v / n if n > 0 else np.array([-1.0, 0.0])


def _triangle_area(a, b, c):
    a, b, c = sorted((a, b, c), reverse=True)
    s = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c))
    return 0.25 * math.sqrt(max(s, 0.0))


def star_embedding(star: StarData) -> np.ndarray:
    """Planar re-embedding ``g'(z) = radius(z) e_branch(z)`` of the star data."""
    E = polygon_closing_embedding(star.mass)
    out = np.zeros((len(star.radius), 2))
    for i, (b, r) in enumerate(zip(star.branch, star.radius)):
        if b >= 0:
            out[i] = r * E[b]
    return out


# ----------------------------------------------------- Izeki-Nayatani bounds

def izeki_nayatani_ratio(space, points, weights, phi, tol=1e-9) -> float:
    """``|bar phi|^2 / ||phi||^2`` for a feasible candidate ``phi``; an upper bound on delta(Z)."""
    w = _weights(weights, len(points))
    if abs(w.sum() - 1.0) > tol:
        raise TargetError(f"weights must sum to 1, got {w.sum()}")
    phi = np.asarray(phi, dtype=float)
    if phi.ndim == 1:
        phi = phi[:, None]
    b = space.barycenter(points, w)
    problems = []
    for i, z in enumerate(points):
        r = space.distance(z, b)
        if abs(np.linalg.norm(phi[i]) - r) > tol * max(1.0, r):
            problems.append(f"|phi(z{i})| = {np.linalg.norm(phi[i])} but d(z{i}, bar) = {r}")
    D2 = space.pairwise_sq_distances(list(points))
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            dz = math.sqrt(D2[i, j])
            dp = float(np.linalg.norm(phi[i] - phi[j]))
            if dp > dz + tol * max(1.0, dz):
                problems.append(f"pair (z{i}, z{j}): |phi difference| {dp} > distance {dz}")
    if problems:
        raise TargetError("infeasible phi: " + "; ".join(problems))
    norm2 = float(np.sum(w * np.sum(phi ** 2, axis=1)))
    if norm2 == 0:
        raise TargetError("all points sit at the barycenter; ratio undefined")
    bar_phi = (w[:, None] * phi).sum(axis=0)
    return float(bar_phi @ bar_phi) / norm2


def in_lower_bound_building(p) -> float:
    """Lower bound ``(sqrt p - 1)^2 / (2 (p - sqrt p + 1))`` for the SL(3, Q_p) building."""
    if p < 2:
        raise TargetError("p must be >= 2")
    s = math.sqrt(p)
    return (s - 1) ** 2 / (2 * (p - s + 1))


def gap_bound_from_in(lam_scalar, in_bound) -> float:
    if not 0 <= in_bound < 1:
        raise TargetError("IN bound must lie in [0, 1)")
    if lam_scalar < 0:
        raise TargetError("scalar gap must be nonnegative")
    return (1 - in_bound) * lam_scalar
