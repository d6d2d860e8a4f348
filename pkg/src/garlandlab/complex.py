"""Weighted simplicial complexes of dimension <= 2 and weighted graphs.

A weight on a complex assigns to every simplex the sum of the weights of the
simplices one dimension up that contain it.  Graphs additionally allow loops
and parallel edges (needed by the permutation model and presentation link
graphs); complexes do not.
"""
from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

REL_TOL = 1e-9


class ComplexError(ValueError):
    pass


def _frozen(a, dtype=float):
    arr = np.array(a, dtype=dtype)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    """Finite weighted multigraph on vertices ``0..n-1``.

    ``edges`` is a sequence of vertex pairs; a pair may repeat (parallel
    edges) and may be a loop ``(c, c)``.  A loop counts twice towards the
    weight of its vertex.
    """

    n: int
    edges: tuple
    edge_weights: np.ndarray
    vertex_weights: np.ndarray
    labels: tuple = field(default=None)

    @classmethod
    def from_edges(cls, n, edges, weights=None, labels=None, vertex_weights=None):
        edges = tuple((int(u), int(v)) for u, v in edges)
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ComplexError(f"edge ({u}, {v}) has an endpoint outside 0..{n - 1}")
        if weights is None:
            weights = np.ones(len(edges))
        weights = np.asarray(weights, dtype=float)
        if weights.shape != (len(edges),):
            raise ComplexError("one weight per edge expected")
        if vertex_weights is None:
            vertex_weights = incident_weight_sums(n, edges, weights)
        if labels is not None:
            labels = tuple(labels)
            if len(labels) != n:
                raise ComplexError("one label per vertex expected")
        return cls(n, edges, _frozen(weights), _frozen(vertex_weights), labels)

    @property
    def total_weight(self) -> float:
        """m(empty set), the sum of all vertex weights."""
        return float(self.vertex_weights.sum())

    def label(self, c):
        return self.labels[c] if self.labels is not None else c

    def adjacency(self) -> np.ndarray:
        """Dense symmetric matrix of summed edge weights; a loop adds ``2w`` on the diagonal."""
        A = np.zeros((self.n, self.n))
        for (u, v), w in zip(self.edges, self.edge_weights):
            A[u, v] += w
            if u != v:
                A[v, u] += w
            else:
                A[u, u] += w
        return A

    def sparse_adjacency(self):
        import scipy.sparse as sp

        if not self.edges:
            return sp.csr_matrix((self.n, self.n))
        e = np.array(self.edges, dtype=np.int64)
        w = np.asarray(self.edge_weights)
        # loops land twice on the diagonal, as in adjacency()
        rows = np.concatenate([e[:, 0], e[:, 1]])
        cols = np.concatenate([e[:, 1], e[:, 0]])
        return sp.csr_matrix((np.concatenate([w, w]), (rows, cols)), shape=(self.n, self.n))

    def neighbors(self, c):
        """Yield ``(neighbor, weight)`` for each non-loop edge item at ``c``."""
        for (u, v), w in zip(self.edges, self.edge_weights):
            if u == c and v != c:
                yield v, float(w)
            elif v == c and u != c:
                yield u, float(w)

    def degree(self, c) -> int:
        return sum((u == c) + (v == c) for u, v in self.edges)

    def is_connected(self) -> bool:
        from scipy.sparse.csgraph import connected_components

        if self.n == 0:
            return False
        k, _ = connected_components(self.sparse_adjacency(), directed=False)
        return k == 1

    def simple_adjacency_lists(self):
        """Neighbor sets, ignoring loops and multiplicity."""
        adj = [set() for _ in range(self.n)]
        for u, v in self.edges:
            if u != v:
                adj[u].add(v)
                adj[v].add(u)
        return adj

    def distance_matrix(self) -> np.ndarray:
        """Combinatorial (hop) distances; ``inf`` between components."""
        from scipy.sparse.csgraph import shortest_path

        A = self.sparse_adjacency().copy()
        A.data[:] = 1.0
        A.setdiag(0)
        A.eliminate_zeros()
        return shortest_path(A, unweighted=True, directed=False)


def incident_weight_sums(n, edges, weights):
    out = np.zeros(n)
    for (u, v), w in zip(edges, weights):
        out[u] += w
        out[v] += w
    return out


@dataclass(frozen=True, eq=False)
class WeightedComplex:
    """Simplicial complex of dimension <= 2 with a weight on every simplex.

    Simplices are stored as sorted tuples.  ``edge_index`` maps a sorted pair
    to its row in ``edges``.
    """

    n: int
    edges: tuple
    faces: tuple
    vertex_weights: np.ndarray
    edge_weights: np.ndarray
    face_weights: np.ndarray
    edge_index: dict = field(repr=False)

    @property
    def total_weight(self) -> float:
        return float(self.vertex_weights.sum())

    def edge_weight(self, u, v) -> float:
        return float(self.edge_weights[self.edge_index[_pair(u, v)]])

    def faces_at(self, x):
        return [(f, w) for f, w in zip(self.faces, self.face_weights) if x in f]

    def neighbors(self, x):
        for (u, v), w in zip(self.edges, self.edge_weights):
            if u == x:
                yield v, float(w)
            elif v == x:
                yield u, float(w)

    def one_skeleton(self) -> WeightedGraph:
        return WeightedGraph.from_edges(
            self.n, self.edges, self.edge_weights, vertex_weights=self.vertex_weights
        )

    def edges_without_faces(self):
        covered = set()
        for f in self.faces:
            covered.update(itertools.combinations(f, 2))
        return [e for e in self.edges if e not in covered]

    def is_connected(self) -> bool:
        return self.one_skeleton().is_connected()


def _pair(u, v):
    return (u, v) if u < v else (v, u)


def _triple(face):
    t = tuple(sorted(int(x) for x in face))
    if len(t) != 3 or len(set(t)) != 3:
        raise ComplexError(f"face {tuple(face)} does not have three distinct vertices")
    return t


def propagate_weights(faces, face_weights=None, n=None, free_edges=None) -> WeightedComplex:
    """Build a weighted 2-complex from its faces.

    Edge weights are the sums of the weights of the faces containing them,
    vertex weights the sums over incident edges.  ``free_edges`` (``(u, v, w)``
    triples) are edges lying in no face; they keep their own weight.

    >>> K = propagate_weights([(0, 1, 2), (0, 1, 3)])
    >>> K.edge_weight(0, 1), float(K.vertex_weights[0])
    (2.0, 4.0)
    """
    faces = [_triple(f) for f in faces]
    if face_weights is None:
        face_weights = [1.0] * len(faces)
    face_weights = [float(w) for w in face_weights]
    if len(face_weights) != len(faces):
        raise ComplexError("one weight per face expected")
    seen = set()
    for f, w in zip(faces, face_weights):
        if f in seen:
            raise ComplexError(f"duplicate face {f}")
        if not w > 0:
            raise ComplexError(f"face {f} has non-positive weight {w}")
        seen.add(f)

    edge_w = defaultdict(float)
    for f, w in zip(faces, face_weights):
        for e in itertools.combinations(f, 2):
            edge_w[e] += w
    for u, v, w in free_edges or ():
        e = _pair(int(u), int(v))
        if u == v:
            raise ComplexError(f"loop ({u}, {v}) is not a simplex")
        if e in edge_w:
            raise ComplexError(f"edge {e} given twice or already in a face")
        if not w > 0:
            raise ComplexError(f"edge {e} has non-positive weight {w}")
        edge_w[e] = float(w)

    verts = {x for e in edge_w for x in e}
    if n is None:
        n = max(verts) + 1 if verts else 0
    if verts and max(verts) >= n:
        raise ComplexError(f"vertex {max(verts)} outside 0..{n - 1}")

    edges = tuple(sorted(edge_w))
    ew = [edge_w[e] for e in edges]
    vw = incident_weight_sums(n, edges, ew)
    order = sorted(range(len(faces)), key=lambda i: faces[i])
    faces_sorted = tuple(faces[i] for i in order)
    fw = [face_weights[i] for i in order]
    return WeightedComplex(
        n=n,
        edges=edges,
        faces=faces_sorted,
        vertex_weights=_frozen(vw),
        edge_weights=_frozen(ew),
        face_weights=_frozen(fw),
        edge_index={e: i for i, e in enumerate(edges)},
    )


def link_of(K: WeightedComplex, x: int) -> WeightedGraph:
    """Link of vertex ``x`` with inherited weights.

    Link vertices are the neighbors of ``x`` (original ids kept as labels);
    link edges come from the faces through ``x`` and carry the face weight;
    the weight of a link vertex ``x'`` is the weight of the edge ``{x, x'}``.
    """
    if not 0 <= x < K.n:
        raise ComplexError(f"{x} is not a vertex")
    nbrs = sorted(v for v, _ in K.neighbors(x))
    pos = {v: i for i, v in enumerate(nbrs)}
    edges, weights = [], []
    for f, w in K.faces_at(x):
        a, b = (y for y in f if y != x)
        edges.append((pos[a], pos[b]))
        weights.append(float(w))
    inherited = [K.edge_weight(x, v) for v in nbrs]
    from_faces = incident_weight_sums(len(nbrs), edges, weights)
    for i, v in enumerate(nbrs):
        if abs(from_faces[i] - inherited[i]) > REL_TOL * max(1.0, inherited[i]):
            raise ComplexError(
                f"link weights inconsistent at vertex {x}: edge {_pair(x, v)} has weight "
                f"{inherited[i]} but its faces sum to {from_faces[i]}"
            )
    return WeightedGraph.from_edges(
        len(nbrs), edges, weights, labels=nbrs, vertex_weights=inherited
    )


def validate(obj) -> list:
    """List the violated weight invariants of a complex or graph (empty if valid)."""
    if isinstance(obj, WeightedComplex):
        return _validate_complex(obj)
    if isinstance(obj, WeightedGraph):
        return _validate_graph(obj)
    raise TypeError(f"cannot validate {type(obj).__name__}")


def _close(a, b):
    return abs(a - b) <= REL_TOL * max(1.0, abs(a), abs(b))


def _validate_complex(K):
    problems = []
    if len(set(K.edges)) != len(K.edges):
        problems.append("duplicate edges")
    if len(set(K.faces)) != len(K.faces):
        problems.append("duplicate faces")
    face_sum = defaultdict(float)
    for f, w in zip(K.faces, K.face_weights):
        if not w > 0:
            problems.append(f"face {f}: weight {w} not positive")
        for e in itertools.combinations(f, 2):
            if e not in K.edge_index:
                problems.append(f"face {f}: edge {e} missing")
            face_sum[e] += w
    for e, w in zip(K.edges, K.edge_weights):
        if not all(0 <= x < K.n for x in e):
            problems.append(f"edge {e}: endpoint outside vertex set")
        if not w > 0:
            problems.append(f"edge {e}: weight {w} not positive")
        if e not in face_sum:
            problems.append(f"edge {e}: lies in no face, link weights undefined")
        elif not _close(w, face_sum[e]):
            problems.append(f"edge {e}: weight {w} != sum of face weights {face_sum[e]}")
    # vertices are checked against face-derived edge weights so that one bad
    # edge weight is reported once, at the edge
    expected = [face_sum.get(e, w) for e, w in zip(K.edges, K.edge_weights)]
    sums = incident_weight_sums(K.n, K.edges, expected)
    for x in range(K.n):
        w = float(K.vertex_weights[x])
        if sums[x] > 0 and not _close(w, sums[x]):
            problems.append(f"vertex {x}: weight {w} != sum of edge weights {sums[x]}")
        if not w > 0:
            problems.append(f"vertex {x}: weight {w} not positive")
    return problems


def _validate_graph(G):
    problems = []
    for (u, v), w in zip(G.edges, G.edge_weights):
        if not (0 <= u < G.n and 0 <= v < G.n):
            problems.append(f"edge ({u}, {v}): endpoint outside vertex set")
        if not w > 0:
            problems.append(f"edge ({u}, {v}): weight {w} not positive")
    sums = incident_weight_sums(G.n, G.edges, G.edge_weights)
    for c in range(G.n):
        w = float(G.vertex_weights[c])
        if not _close(w, sums[c]):
            problems.append(f"vertex {G.label(c)}: weight {w} != incident edge weight sum {sums[c]}")
        if not w > 0:
            problems.append(f"vertex {G.label(c)}: weight {w} not positive (m(∅)>0 per component)")
    if not G.total_weight > 0:
        problems.append("total weight m(∅) not positive")
    return problems


# ---------------------------------------------------------------- builders

def cycle_graph(k: int, weight: float = 1.0) -> WeightedGraph:
    if k < 2:
        raise ComplexError("a cycle needs at least two vertices")
    return WeightedGraph.from_edges(k, [(i, (i + 1) % k) for i in range(k)], [weight] * k)


def torus_complex(rows: int = 3, cols: int = 3):
    """Equilateral triangulation of the torus on a ``rows x cols`` grid.

    Returns ``(complex, coords)`` where ``coords[x] = (i, j)`` are the grid
    coordinates of vertex ``x``.  Needs ``rows, cols >= 3``.
    """
    if rows < 3 or cols < 3:
        raise ComplexError("torus grid needs at least 3 x 3 vertices")
    idx = lambda i, j: (i % rows) * cols + (j % cols)  # noqa: E731
    faces = []
    for i in range(rows):
        for j in range(cols):
            faces.append((idx(i, j), idx(i + 1, j), idx(i, j + 1)))
            faces.append((idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)))
    coords = [(x // cols, x % cols) for x in range(rows * cols)]
    return propagate_weights(faces), coords


def octahedron_complex() -> WeightedComplex:
    faces = [(a, b, c) for a in (0, 1) for b in (2, 3) for c in (4, 5)]
    return propagate_weights(faces)


def tetrahedron_complex() -> WeightedComplex:
    return propagate_weights(itertools.combinations(range(4), 3))


def icosahedron_complex() -> WeightedComplex:
    """Boundary of the icosahedron: 12 vertices, every link a 5-cycle."""
    phi = (1 + 5 ** 0.5) / 2
    pts = []
    for s1 in (-1, 1):
        for s2 in (-1, 1):
            pts += [(0, s1, s2 * phi), (s1, s2 * phi, 0), (s2 * phi, 0, s1)]
    pts = np.array(pts, dtype=float)
    d2 = ((pts[:, None] - pts[None]) ** 2).sum(-1)
    adj = np.isclose(d2, 4.0)
    faces = [
        t for t in itertools.combinations(range(12), 3)
        if adj[t[0], t[1]] and adj[t[0], t[2]] and adj[t[1], t[2]]
    ]
    return propagate_weights(faces)
