"""Seeded random models: permutation-model regular graphs and density-model presentations.

Every sample draws from ``Generator(Philox(SeedSequence([seed, index])))`` so
that serial and parallel runs produce the same samples.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .complex import WeightedGraph
from .spectral import scalar_spectral_gap, trace_method_gap_bound

PRNG = "numpy.Philox(SeedSequence([seed, index]))"


class RandomModelError(ValueError):
    pass


def sample_rng(seed: int, index: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(index)])))


def map_ordered(fn, items, jobs=1):
    """``list(map(fn, items))``, optionally across processes; order is kept."""
    items = list(items)
    if jobs <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items))


# --------------------------------------------------------- permutation model

def permutation_model_graph(n: int, d: int, seed: int, index: int = 0) -> WeightedGraph:
    """``2d``-regular multigraph with an edge ``{s, sigma_i(s)}`` per permutation and vertex."""
    if n < 1 or d < 1:
        raise RandomModelError("need n >= 1 and d >= 1")
    rng = sample_rng(seed, index)
    src = np.tile(np.arange(n), d)
    dst = np.concatenate([rng.permutation(n) for _ in range(d)])
    return WeightedGraph.from_edges(n, zip(src.tolist(), dst.tolist()))


def tree_reference(d: int) -> float:
    return 1 - 2 * math.sqrt(2 * d - 1) / (2 * d)


def friedman_threshold(d: int, c: float) -> float:
    return 1 - (math.sqrt(2 * d - 1) / d + math.log(2 * d) / (2 * d) + c / d)


@dataclass(frozen=True)
class _GraphSample:
    n: int
    d: int
    seed: int
    trace_k: int

    def __call__(self, index):
        G = permutation_model_graph(self.n, self.d, self.seed, index)
        rep = scalar_spectral_gap(G)
        out = {"index": index, "lambda": rep.lam, "connected": rep.connected}
        if self.trace_k:
            out["trace_bound"] = trace_method_gap_bound(G, self.trace_k) if rep.connected else None
        return out


def spectral_statistics(n, d, samples, seed, c=None, trace_k=0, jobs=1) -> dict:
    if samples < 1:
        raise RandomModelError("need at least one sample")
    rows = map_ordered(_GraphSample(n, d, seed, trace_k), range(samples), jobs)
    lam = np.array([r["lambda"] for r in rows])
    out = {
        "n": n,
        "d": d,
        "seed": seed,
        "prng": PRNG,
        "samples": rows,
        "mean": float(lam.mean()),
        "std": float(lam.std()),
        "min": float(lam.min()),
        "max": float(lam.max()),
        "tree_reference": tree_reference(d),
    }
    if c is not None:
        thr = friedman_threshold(d, c)
        out["friedman_c"] = c
        out["friedman_threshold"] = thr
        out["fraction_above_threshold"] = float(np.mean(lam >= thr))
    if trace_k:
        out["trace_k"] = trace_k
        out["trace_bound_valid"] = all(
            r["trace_bound"] is None or r["trace_bound"] <= r["lambda"] + 1e-9 for r in rows
        )
    return out


# ------------------------------------------------------------ density model
# letters: 2i is s_i and 2i + 1 is its inverse, so ``x ^ 1`` inverts x

def inverse(x: int) -> int:
    return x ^ 1


def letter_name(x: int) -> str:
    return f"s{x // 2 + 1}" + ("^-1" if x & 1 else "")


def relator_count(m: int, d: float) -> int:
    """``N = (2m / (2m - 1)) (2m - 1)^{3d}`` rounded to nearest, halves up."""
    x = (2 * m / (2 * m - 1)) * (2 * m - 1) ** (3 * d)
    return int(math.floor(x + 0.5))


@lru_cache(maxsize=16)
def cyclically_reduced_words(m: int) -> np.ndarray:
    """All cyclically reduced length-3 words over ``2m`` letters, lexicographic."""
    L = 2 * m
    a, b, c = np.meshgrid(np.arange(L), np.arange(L), np.arange(L), indexing="ij")
    a, b, c = a.ravel(), b.ravel(), c.ravel()
    ok = (b != a ^ 1) & (c != b ^ 1) & (a != c ^ 1)
    words = np.column_stack([a[ok], b[ok], c[ok]])
    words.flags.writeable = False
    return words


@dataclass(frozen=True)
class Presentation:
    m: int
    relators: tuple
    density: float
    seed: int
    index: int = 0

    def to_dict(self):
        return {
            "m": self.m,
            "density": self.density,
            "seed": self.seed,
            "index": self.index,
            "relators": [" ".join(letter_name(x) for x in r) for r in self.relators],
        }


def density_presentation(m: int, d: float, seed: int, index: int = 0) -> Presentation:
    if m < 2:
        raise RandomModelError("need m >= 2 generators")
    if not 0 < d < 1:
        raise RandomModelError("density must lie in (0, 1)")
    pool = cyclically_reduced_words(m)
    N = relator_count(m, d)
    if N > len(pool):
        raise RandomModelError(f"N = {N} relators requested but only {len(pool)} candidate words")
    pick = sample_rng(seed, index).choice(len(pool), size=N, replace=False)
    rel = tuple(tuple(int(x) for x in pool[i]) for i in pick)
    return Presentation(m, rel, float(d), int(seed), int(index))


def link_graph_of_presentation(pres: Presentation) -> WeightedGraph:
    """L(S, R): relator ``abc`` contributes edges ``{a^-1, b}``, ``{b, c}``, ``{c, a^-1}``."""
    edges = []
    for a, b, c in pres.relators:
        edges += [(inverse(a), b), (b, c), (c, inverse(a))]
    labels = [letter_name(x) for x in range(2 * pres.m)]
    return WeightedGraph.from_edges(2 * pres.m, edges, labels=labels)


def zuk_verdict(pres: Presentation) -> dict:
    G = link_graph_of_presentation(pres)
    rep = scalar_spectral_gap(G)
    certified = rep.connected and rep.lam > 0.5
    return {
        "m": pres.m,
        "density": pres.density,
        "relators": len(pres.relators),
        "connected": rep.connected,
        "lambda": rep.lam,
        "verdict": "(T) certified" if certified else "not certified",
        "certified": bool(certified),
    }


@dataclass(frozen=True)
class _GroupSample:
    m: int
    d: float
    seed: int

    def __call__(self, index):
        out = zuk_verdict(density_presentation(self.m, self.d, self.seed, index))
        out["index"] = index
        return out


def group_statistics(m, d, samples, seed, jobs=1) -> dict:
    rows = map_ordered(_GroupSample(m, d, seed), range(samples), jobs)
    return {
        "m": m,
        "density": d,
        "seed": seed,
        "prng": PRNG,
        "relator_count": relator_count(m, d),
        "samples": rows,
        "certified_fraction": float(np.mean([r["certified"] for r in rows])),
    }
