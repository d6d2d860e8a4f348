"""Energies of vertex maps, the discrete Laplacian, Mayer-style flow and
Garland identity / inequality checks.

Equivariance is modelled by an optional Euclidean translation cocycle on
oriented edges: across the edge ``x -> x'`` the neighbor ``x'`` is seen at
``f(x') + c(x -> x')``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cat0 import Euclidean, MetricTree, Product, star_barycenter, tangent_cone_star
from .complex import ComplexError, WeightedComplex, WeightedGraph, link_of

HARMONIC_TOL = 1e-8
CLOSED_TOL = 1e-10


class HarmonicError(ValueError):
    pass


@dataclass(frozen=True)
class VertexMap:
    """Assignment of a point of ``space`` to every vertex ``0..n-1``."""

    space: object
    points: tuple

    def __post_init__(self):
        pts = tuple(self.space.check(p) for p in self.points)
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return len(self.points)

    def __getitem__(self, x):
        return self.points[x]

    @classmethod
    def euclidean(cls, X):
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        return cls(Euclidean(X.shape[1]), tuple(X))

    def as_array(self):
        if not isinstance(self.space, Euclidean):
            raise HarmonicError("array view only exists for Euclidean targets")
        return np.array(self.points)

    def replace(self, points):
        return VertexMap(self.space, tuple(points))

    @classmethod
    def random(cls, space, n, rng):
        return cls(space, tuple(space.random_point(rng) for _ in range(n)))


@dataclass(frozen=True)
class EdgeCocycle:
    """Antisymmetric vector function on oriented edges.

    ``values`` maps a sorted pair ``(u, v)``, ``u < v``, to ``c(u -> v)``.
    """

    dim: int
    values: dict = field(repr=False)

    def __call__(self, u, v):
        if u < v:
            return self.values[(u, v)]
        return -self.values[(v, u)]

    @classmethod
    def from_oriented(cls, dim, items):
        vals = {}
        for (u, v), c in items.items():
            c = np.asarray(c, dtype=float)
            if c.shape != (dim,):
                raise HarmonicError(f"cocycle value on ({u}, {v}) is not in R^{dim}")
            vals[(u, v) if u < v else (v, u)] = c if u < v else -c
        return cls(dim, vals)

    @classmethod
    def coboundary(cls, K, h):
        """``c(u -> v) = h(v) - h(u)``."""
        h = np.asarray(h, dtype=float)
        if h.ndim == 1:
            h = h[:, None]
        return cls(h.shape[1], {(u, v): h[v] - h[u] for u, v in K.edges})

    def closedness_violations(self, K: WeightedComplex, tol=CLOSED_TOL):
        bad = []
        for a, b, c in K.faces:
            s = self(a, b) + self(b, c) + self(c, a)
            if np.linalg.norm(s) > tol:
                bad.append(((a, b, c), float(np.linalg.norm(s))))
        return bad

    def require_closed(self, K):
        bad = self.closedness_violations(K)
        if bad:
            f, r = bad[0]
            raise HarmonicError(f"cocycle not closed on face {f} (residual {r:.3g})")
        missing = [e for e in K.edges if e not in self.values]
        if missing:
            raise HarmonicError(f"cocycle undefined on edge {missing[0]}")


def lattice_cocycle(K: WeightedComplex, coords, rows, cols, a=(1.0, 0.0), b=(0.5, math.sqrt(3) / 2)):
    """Translation cocycle of the grid torus: grid step ``(di, dj)`` maps to ``di a + dj b``.

    With the equilateral defaults the constant map ``0`` is harmonic and
    every edge term has unit length.
    """
    a, b = np.asarray(a, float), np.asarray(b, float)

    def wrap(d, m):
        d %= m
        return d - m if d > m // 2 else d

    vals = {}
    for u, v in K.edges:
        di = wrap(coords[v][0] - coords[u][0], rows)
        dj = wrap(coords[v][1] - coords[u][1], cols)
        vals[(u, v)] = di * a + dj * b
    return EdgeCocycle(2, vals)


# --------------------------------------------------------------- energies

def _check_cocycle(f, cocycle):
    if cocycle is None:
        return
    if not isinstance(f.space, Euclidean):
        raise HarmonicError("a cocycle needs a Euclidean target")
    if cocycle.dim != f.space.dim:
        raise HarmonicError("cocycle and target dimensions differ")


def _check_size(obj, f):
    if len(f) != obj.n:
        raise HarmonicError(f"map has {len(f)} points but the complex has {obj.n} vertices")


def energy(obj, f: VertexMap, cocycle=None) -> float:
    """``sum_e m(e) d(f(u), f(v))^2``, twisted by the cocycle when given."""
    _check_size(obj, f)
    _check_cocycle(f, cocycle)
    if not obj.edges:
        return 0.0
    w = np.asarray(obj.edge_weights)
    if isinstance(f.space, Euclidean):
        X = f.as_array()
        e = np.asarray(obj.edges)
        diff = X[e[:, 1]] - X[e[:, 0]]
        if cocycle is not None:
            diff = diff + np.array([cocycle(u, v) for u, v in obj.edges])
        return float(np.sum(w * np.sum(diff ** 2, axis=1)))
    d2 = [f.space.distance(f[u], f[v]) ** 2 for u, v in obj.edges]
    return float(np.dot(w, d2))


def graph_energy(G: WeightedGraph, f: VertexMap) -> float:
    return energy(G, f)


def map_distance(obj, f: VertexMap, g: VertexMap) -> float:
    """Weighted l2 distance ``sqrt(sum_x m(x) d(f(x), g(x))^2)``."""
    m = np.asarray(obj.vertex_weights)
    return math.sqrt(sum(mx * f.space.distance(a, b) ** 2 for mx, a, b in zip(m, f.points, g.points)))


def _neighborhood(obj, f, x, cocycle):
    """Neighbor labels, their positions as seen from ``x``, and weights ``m(x, x')``."""
    labels, pos, wts = [], [], []
    for v, w in obj.neighbors(x):
        labels.append(v)
        p = f[v]
        if cocycle is not None:
            p = p + cocycle(x, v)
        pos.append(p)
        wts.append(w)
    if isinstance(obj, WeightedGraph):
        for (u, v), w in zip(obj.edges, obj.edge_weights):
            if u == v == x:
                labels.append(x)
                pos.append(f[x])
                wts.append(2 * float(w))
    if not labels:
        raise HarmonicError(f"vertex {x} is isolated")
    return labels, pos, np.asarray(wts, dtype=float)


@dataclass(frozen=True)
class LocalData:
    """Link restriction at ``x`` seen from ``f(x)``."""

    vertex: int
    link: WeightedGraph
    positions: tuple
    weights: np.ndarray
    center: object
    ED: float


def local_data(K: WeightedComplex, f: VertexMap, x: int, cocycle=None) -> LocalData:
    _check_size(K, f)
    _check_cocycle(f, cocycle)
    L = link_of(K, x)
    pos = []
    for v in L.labels:
        p = f[v]
        if cocycle is not None:
            p = p + cocycle(x, v)
        pos.append(p)
    w = np.asarray(L.vertex_weights)
    ED = 0.5 * float(sum(wi * f.space.distance(p, f[x]) ** 2 for wi, p in zip(w, pos)))
    return LocalData(x, L, tuple(pos), w, f[x], ED)


def link_restriction(ld: LocalData, space) -> VertexMap:
    return VertexMap(space, ld.positions)


def minus_laplacian(obj, f: VertexMap, x: int, cocycle=None):
    """``(direction, magnitude)`` of ``-Delta f(x)``.

    Euclidean: the vector ``bar - f(x)``.  Tree: the barycenter of the link
    positions pushed into the tangent cone at ``f(x)``, reported as
    ``((edge, toward_vertex), radius)`` or ``None`` at the apex.  Products:
    a tuple of member directions.
    """
    _check_cocycle(f, cocycle)
    _, pos, w = _neighborhood(obj, f, x, cocycle)
    return _cone_displacement(f.space, f[x], pos, w)


def _cone_displacement(space, center, pos, w):
    if isinstance(space, Euclidean):
        v = space.barycenter(pos, w) - center
        return v, float(np.linalg.norm(v))
    if isinstance(space, MetricTree):
        star = tangent_cone_star(space, center, pos, w)
        b, r = star_barycenter(star)
        return (None if b < 0 else (star.directions[b], r)), float(r)
    if isinstance(space, Product):
        parts = [
            _cone_displacement(Y, center[i], [p[i] for p in pos], w)
            for i, Y in enumerate(space.factors)
        ]
        return tuple(d for d, _ in parts), math.sqrt(sum(m * m for _, m in parts))
    raise HarmonicError(f"no tangent cone model for {type(space).__name__}")


def _euclid_operator(obj, cocycle):
    """``(A, B, m)`` with link barycenters ``(A X + B) / m`` for Euclidean maps."""
    A = obj.adjacency() if isinstance(obj, WeightedGraph) else obj.one_skeleton().adjacency()
    m = A.sum(axis=1)
    if np.any(m <= 0):
        raise HarmonicError(f"vertex {int(np.argmin(m))} is isolated")
    B = 0.0
    if cocycle is not None:
        B = np.zeros((obj.n, cocycle.dim))
        for (u, v), w in zip(obj.edges, obj.edge_weights):
            if u != v:
                B[u] += w * cocycle(u, v)
                B[v] += w * cocycle(v, u)
    return A, B, m


def _euclid_displacements(op, X):
    A, B, m = op
    return (A @ X + B) / m[:, None] - X


def laplacian_magnitudes(obj, f, cocycle=None) -> np.ndarray:
    _check_cocycle(f, cocycle)
    if isinstance(f.space, Euclidean):
        V = _euclid_displacements(_euclid_operator(obj, cocycle), f.as_array())
        return np.linalg.norm(V, axis=1)
    return np.array([minus_laplacian(obj, f, x, cocycle)[1] for x in range(obj.n)])


def laplacian_norm(obj, f, cocycle=None) -> float:
    """``|-Delta f| = sqrt(sum_x m(x) |-Delta f(x)|^2)``."""
    mag = laplacian_magnitudes(obj, f, cocycle)
    return math.sqrt(float(np.dot(obj.vertex_weights, mag ** 2)))


def energy_gradient(obj, f, cocycle=None) -> np.ndarray:
    """Euclidean gradient of the energy: ``-2 m(x) (-Delta f(x))`` per vertex."""
    m = np.asarray(obj.vertex_weights)
    return np.array([-2 * m[x] * minus_laplacian(obj, f, x, cocycle)[0] for x in range(obj.n)])


def energy_gap_bound(obj, f, g, cocycle=None) -> float:
    """Convexity bound ``2 |-Delta f| d(f, g)`` on ``E(f) - E(g)`` (Euclidean targets).

    The factor 2 is needed: the gradient of the energy at ``x`` is
    ``2 m(x)`` times the displacement.
    """
    return 2 * laplacian_norm(obj, f, cocycle) * map_distance(obj, f, g)


# ---------------------------------------------------------------- the flow

@dataclass(frozen=True)
class FlowTrace:
    steps: tuple
    final: VertexMap

    @property
    def energies(self):
        return np.array([e for _, e, _ in self.steps])

    def is_monotone(self, tol=1e-12):
        E = self.energies
        return bool(np.all(np.diff(E) <= tol * max(1.0, E[0])))

    def decay_rate(self):
        """Per-sweep energy factor from a least-squares fit of ``log E`` against the step."""
        E = self.energies
        keep = E > 0
        if keep.sum() < 2:
            return None
        steps = np.array([s for s, _, _ in self.steps])[keep]
        slope = np.polyfit(steps, np.log(E[keep]), 1)[0]
        return float(math.exp(slope))

    def to_csv(self):
        rows = ["step,energy,laplacian_norm"]
        rows += [f"{s},{e:.17g},{n:.17g}" for s, e, n in self.steps]
        return "\n".join(rows) + "\n"


def flow_step(obj, f, eta=0.5, cocycle=None) -> VertexMap:
    """One synchronous sweep: every ``f(x)`` moves toward its link barycenter by ``eta``."""
    if isinstance(f.space, Euclidean):
        X = f.as_array()
        return f.replace(X + eta * _euclid_displacements(_euclid_operator(obj, cocycle), X))
    out = []
    for x in range(obj.n):
        _, pos, w = _neighborhood(obj, f, x, cocycle)
        out.append(f.space.geodesic(f[x], f.space.barycenter(pos, w), eta))
    return f.replace(out)


def mayer_flow(obj, f0: VertexMap, eta=0.5, iterations=100, cocycle=None, stop_below=None) -> FlowTrace:
    """Discrete Mayer descent for ``iterations`` sweeps (or until energy < ``stop_below``)."""
    if not 0 < eta <= 1:
        raise HarmonicError(f"step size {eta} outside (0, 1]")
    _check_size(obj, f0)
    _check_cocycle(f0, cocycle)
    if isinstance(f0.space, Euclidean):
        return _euclid_flow(obj, f0, eta, iterations, cocycle, stop_below)
    f = f0
    steps = [(0, energy(obj, f, cocycle), laplacian_norm(obj, f, cocycle))]
    for t in range(1, iterations + 1):
        f = flow_step(obj, f, eta, cocycle)
        E = energy(obj, f, cocycle)
        steps.append((t, E, laplacian_norm(obj, f, cocycle)))
        if stop_below is not None and E < stop_below:
            break
    return FlowTrace(tuple(steps), f)


def _euclid_flow(obj, f0, eta, iterations, cocycle, stop_below):
    op = _euclid_operator(obj, cocycle)
    m = op[2]
    e = np.asarray(obj.edges)
    w = np.asarray(obj.edge_weights)
    C = 0.0 if cocycle is None else np.array([cocycle(u, v) for u, v in obj.edges])

    def E_of(X):
        diff = X[e[:, 1]] - X[e[:, 0]] + C
        return float(np.sum(w * np.sum(diff ** 2, axis=1)))

    X = f0.as_array()
    V = _euclid_displacements(op, X)
    steps = [(0, E_of(X), math.sqrt(float(np.sum(m * np.sum(V ** 2, axis=1)))))]
    for t in range(1, iterations + 1):
        X = X + eta * V
        V = _euclid_displacements(op, X)
        E = E_of(X)
        steps.append((t, E, math.sqrt(float(np.sum(m * np.sum(V ** 2, axis=1))))))
        if stop_below is not None and E < stop_below:
            break
    return FlowTrace(tuple(steps), f0.replace(X))


# ------------------------------------------------------ twisted solutions

def solve_twisted_harmonic(K: WeightedComplex, cocycle: EdgeCocycle) -> VertexMap:
    """Minimizer of the twisted energy with ``f(0) = 0``.

    Stationarity reads ``L f = b`` with ``b(x) = sum_x' m(x, x') c(x -> x')``.
    """
    if not K.is_connected():
        raise HarmonicError("complex must be connected")
    cocycle.require_closed(K)
    n = K.n
    A = np.zeros((n, n))
    b = np.zeros((n, cocycle.dim))
    for (u, v), w in zip(K.edges, K.edge_weights):
        A[u, v] -= w
        A[v, u] -= w
        A[u, u] += w
        A[v, v] += w
        b[u] += w * cocycle(u, v)
        b[v] += w * cocycle(v, u)
    X = np.zeros((n, cocycle.dim))
    if n > 1:
        X[1:] = np.linalg.solve(A[1:, 1:], b[1:])
    return VertexMap.euclidean(X)


# ----------------------------------------------------------- Garland checks

def _rel(a, b):
    return abs(a - b) / max(1.0, abs(a), abs(b))


def garland_identity_check(K: WeightedComplex, f: VertexMap, cocycle=None, tol=HARMONIC_TOL) -> dict:
    """Energy bookkeeping across vertex links.

    Always checked: ``E(f) = sum_x E(f | link x) = sum_x ED(f, x)``.  For a
    harmonic ``f`` also ``E(f) = 2 sum_x RQ(f | link x) ED(f, x)``.
    """
    from .spectral import rayleigh_quotient

    E = energy(K, f, cocycle)
    link_E, ED, rq, two_rq_ed = [], [], [], 0.0
    for x in range(K.n):
        ld = local_data(K, f, x, cocycle)
        g = link_restriction(ld, f.space)
        e_link = energy(ld.link, g)
        link_E.append(e_link)
        ED.append(ld.ED)
        try:
            q = rayleigh_quotient(ld.link, g)
        except ValueError:
            q = None
        rq.append(q)
        if q is not None:
            two_rq_ed += 2 * q * ld.ED
    mags = laplacian_magnitudes(K, f, cocycle)
    harmonic = bool(mags.max() < tol)
    sum_link, sum_ed = float(sum(link_E)), float(sum(ED))
    return {
        "energy": E,
        "sum_link_energy": sum_link,
        "sum_ED": sum_ed,
        "two_sum_rq_ed": float(two_rq_ed),
        "residual_link": _rel(E, sum_link),
        "residual_ED": _rel(E, sum_ed),
        "residual_garland": _rel(E, two_rq_ed) if harmonic else None,
        "harmonic": harmonic,
        "max_laplacian": float(mags.max()),
        "label": "harmonic" if harmonic else "non-harmonic, identity not asserted",
        "link_rq": rq,
    }


def garland_inequality_check(K, f, lam, cocycle=None) -> dict:
    """Slack of ``(2 lam - 1)^2 E(f) <= 8 lam^2 |-Delta f|^2``."""
    E = energy(K, f, cocycle)
    n2 = laplacian_norm(K, f, cocycle) ** 2
    lhs = (2 * lam - 1) ** 2 * E
    rhs = 8 * lam ** 2 * n2
    return {"lambda": float(lam), "lhs": lhs, "rhs": rhs, "slack": rhs - lhs}


def link_gaps(K: WeightedComplex) -> np.ndarray:
    from .spectral import scalar_spectral_gap

    return np.array([scalar_spectral_gap(link_of(K, x)).lam for x in range(K.n)])


def fixed_point_certificate(K: WeightedComplex, delta=None) -> dict:
    """Spectral fixed-point verdict from link gaps.

    ``delta=None`` is the Hilbert case (threshold 1/2); otherwise the
    threshold is ``1 / (2 (1 - delta))`` for targets with IN at most delta.
    """
    if delta is not None and not 0 <= delta < 1:
        raise HarmonicError(f"delta must lie in [0, 1), got {delta}")
    missing = K.edges_without_faces()
    if missing:
        raise ComplexError(f"link weights inconsistent: edge {missing[0]} lies in no face")
    gaps = link_gaps(K)
    threshold = 0.5 if delta is None else 1.0 / (2.0 * (1.0 - delta))
    x = int(np.argmin(gaps))
    granted = bool(gaps.min() > threshold)
    report = {
        "target": "hilbert" if delta is None else f"IN<={delta}",
        "threshold": threshold,
        "min_gap": float(gaps.min()),
        "binding_vertex": x,
        "link_gaps": [float(g) for g in gaps],
        "granted": granted,
    }
    if delta is None:
        report["property_T"] = "certified" if granted else "not certified"
    return report
