"""Scalar spectral gaps of weighted graphs and Rayleigh quotients of maps."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .complex import WeightedGraph

DENSE_LIMIT = 4096


@dataclass(frozen=True)
class SpectralReport:
    lam: float
    spectrum: tuple
    connected: bool
    method: str

    def to_dict(self):
        return {
            "lambda": self.lam,
            "spectrum": list(self.spectrum),
            "connected": self.connected,
            "method": self.method,
        }


def laplacian(G: WeightedGraph) -> np.ndarray:
    """Weighted Laplacian; loops cancel out of it."""
    A = G.adjacency()
    return np.diag(A.sum(axis=1)) - A


def normalized_laplacian(G: WeightedGraph) -> np.ndarray:
    d = np.asarray(G.vertex_weights, dtype=float)
    s = 1.0 / np.sqrt(d)
    return s[:, None] * laplacian(G) * s[None, :]


def scalar_spectral_gap(G: WeightedGraph) -> SpectralReport:
    """Second-smallest eigenvalue of ``L g = lambda D g``.

    Disconnected graphs report ``lambda = 0``.  Dense solve up to
    ``DENSE_LIMIT`` vertices, shift-invert Lanczos above.
    """
    if G.n < 2:
        raise ValueError("spectral gap needs at least 2 vertices")
    vw = np.asarray(G.vertex_weights)
    if np.any(vw < 0):
        raise ValueError("vertex weights must be nonnegative")
    if np.any(vw == 0):
        # isolated zero-weight vertices: disconnected, spectrum taken on the rest
        support = np.flatnonzero(vw > 0)
        if support.size == 0:
            return SpectralReport(0.0, (0.0,) * G.n, False, "dense")
        ev = np.zeros(G.n)
        if support.size > 1:
            H = G.from_edges(support.size, [(int(np.searchsorted(support, u)), int(np.searchsorted(support, v)))
                                            for u, v in G.edges], G.edge_weights)
            ev[: support.size] = scalar_spectral_gap(H).spectrum
        ev = np.sort(ev)
        return SpectralReport(0.0, tuple(float(x) for x in ev), False, "dense")
    connected = G.is_connected()
    if G.n <= DENSE_LIMIT:
        ev = np.linalg.eigvalsh(normalized_laplacian(G))
        method = "dense"
    else:
        ev = _sparse_bottom(G)
        method = "shift-invert"
    ev = np.sort(ev)
    lam = float(max(ev[1], 0.0)) if connected else 0.0
    return SpectralReport(lam, tuple(float(x) for x in ev), connected, method)


def _sparse_bottom(G, k=3):
    import scipy.sparse as sp
    from scipy.sparse.linalg import eigsh

    A = G.sparse_adjacency()
    deg = np.asarray(A.sum(axis=1)).ravel()
    L = sp.diags(deg) - A
    s = sp.diags(1.0 / np.sqrt(np.asarray(G.vertex_weights, dtype=float)))
    M = (s @ L @ s).tocsc()
    return eigsh(M, k=k, sigma=-0.1, which="LM", tol=1e-10, return_eigenvectors=False)


def spectral_gap_vector(G: WeightedGraph):
    """``(lambda, g)`` with ``g`` a generalized eigenvector for ``lambda`` (dense only)."""
    d = np.asarray(G.vertex_weights, dtype=float)
    w, V = np.linalg.eigh(normalized_laplacian(G))
    return float(w[1]), V[:, 1] / np.sqrt(d)


def cycle_gap_closed_form(k: int) -> float:
    """lambda(C_k, R) = |1 - exp(2 pi i / k)|^2 / 2 = 1 - cos(2 pi / k)."""
    if k < 3:
        raise ValueError("cycle length must be at least 3")
    return 0.5 * abs(1 - np.exp(2j * math.pi / k)) ** 2


def random_walk_matrix(G: WeightedGraph):
    """Sparse transition matrix; a loop of weight w gives ``2w / m(c)`` on the diagonal."""
    import scipy.sparse as sp

    d = np.asarray(G.vertex_weights, dtype=float)
    return sp.diags(1.0 / d) @ G.sparse_adjacency()


def trace_method_gap_bound(G: WeightedGraph, k: int) -> float:
    """Lower bound ``1 - (tr P^{2k} - 1)^{1/2k}`` on the spectral gap.

    The trace is computed from powers of the symmetrized walk matrix
    ``S = D^{-1/2} A D^{-1/2}`` as ``||S^k||_F^2``, never from eigenvalues.
    """
    import scipy.sparse as sp

    if k < 1:
        raise ValueError("k must be >= 1")
    if not G.is_connected():
        raise ValueError("trace bound needs a connected graph")
    d = np.asarray(G.vertex_weights, dtype=float)
    s = sp.diags(1.0 / np.sqrt(d))
    S = (s @ G.sparse_adjacency() @ s).tocsr()
    X = np.eye(G.n)
    for _ in range(k):
        X = S @ X
    tr = float(np.sum(X * X))
    excess = max(tr - 1.0, 0.0)
    return 1.0 - excess ** (1.0 / (2 * k))


# ------------------------------------------------------- Rayleigh quotients

def _as_map(G, g):
    from .cat0 import Euclidean
    from .harmonic import VertexMap

    if isinstance(g, VertexMap):
        return g
    arr = np.asarray(g, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    return VertexMap(Euclidean(arr.shape[1]), list(arr))


def rayleigh_quotient(G: WeightedGraph, g) -> float:
    """E(g) / d(g, bar g)^2 with vertex weights as the measure."""
    from .harmonic import graph_energy

    g = _as_map(G, g)
    space = g.space
    w = np.asarray(G.vertex_weights, dtype=float)
    b = space.barycenter(g.points, w)
    denom = sum(wi * space.distance(p, b) ** 2 for p, wi in zip(g.points, w))
    if denom <= 0:
        raise ValueError("zero denominator: map is constant")
    return graph_energy(G, g) / denom


def gromov_dispersion(G: WeightedGraph, g) -> float:
    """F(g) = (1 / 2 m(empty)) sum over ordered pairs of m(c) m(c') d^2."""
    g = _as_map(G, g)
    w = np.asarray(G.vertex_weights, dtype=float)
    D2 = g.space.pairwise_sq_distances(g.points)
    return float(w @ D2 @ w) / (2.0 * w.sum())


def gromov_rayleigh(G: WeightedGraph, g) -> float:
    from .harmonic import graph_energy

    g = _as_map(G, g)
    F = gromov_dispersion(G, g)
    if F <= 0:
        raise ValueError("zero denominator: map is constant")
    return graph_energy(G, g) / F
