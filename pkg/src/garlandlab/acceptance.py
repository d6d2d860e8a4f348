"""Executable acceptance criteria.

Each ``criterion_N`` returns a ``Result`` whose ``detail`` is a
deterministic JSON-ready dict; wall-clock time is kept apart so that
reports stay byte-identical between runs.
"""
from __future__ import annotations

import io
import json
import math
import time
from contextlib import redirect_stdout
from dataclasses import dataclass, field

import numpy as np

from . import cat0, complex as cx, harmonic as hm, incidence, randomgen, spectral, wirtinger
from .formats import dumps

DEFAULT_SEED = 20240601


@dataclass
class Result:
    number: int
    title: str
    passed: bool
    detail: dict
    limit_s: float
    seconds: float = field(default=0.0, compare=False)

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        limit = "no limit" if math.isinf(self.limit_s) else f"limit {self.limit_s:g}s"
        return f"[{status}] criterion {self.number:2d}: {self.title} ({self.seconds:.2f}s, {limit})"


# ---------------------------------------------------------------- samplers

def random_complex(rng, n_vertices=8, n_faces=None, weighted=True):
    """Random 2-complex: distinct random triples, vertices relabelled 0..n-1."""
    import itertools

    triples = list(itertools.combinations(range(n_vertices), 3))
    if n_faces is None:
        n_faces = int(rng.integers(3, min(14, len(triples)) + 1))
    pick = rng.choice(len(triples), size=n_faces, replace=False)
    faces = [triples[i] for i in sorted(pick)]
    used = sorted({x for f in faces for x in f})
    relabel = {x: i for i, x in enumerate(used)}
    faces = [tuple(relabel[x] for x in f) for f in faces]
    w = rng.uniform(0.3, 2.0, size=len(faces)) if weighted else None
    return cx.propagate_weights(faces, w)


def reweighted(K, rng, low=0.5, high=1.5):
    return cx.propagate_weights(K.faces, rng.uniform(low, high, size=len(K.faces)))


def random_connected_graph(rng, n):
    edges = [(int(rng.integers(0, v)), v) for v in range(1, n)]
    extra = int(rng.integers(0, n + 1))
    for _ in range(extra):
        u, v = (int(x) for x in rng.choice(n, size=2, replace=False))
        edges.append((u, v))
    return cx.WeightedGraph.from_edges(n, edges, rng.uniform(0.2, 2.0, size=len(edges)))


def random_target(rng):
    if rng.random() < 0.5:
        return cat0.Euclidean(int(rng.integers(1, 4)))
    return cat0.MetricTree.random(rng, int(rng.integers(1, 9)))


def grid_barycenter(tree, points, weights, step=1e-4):
    """Brute-force minimizer of ``u`` over a grid of spacing ``step`` on every edge."""
    w = np.asarray(weights, dtype=float)
    DV = np.array([tree.dist_to_vertices(p) for p in points])
    best = (math.inf, None)
    for e, (a, b, L) in enumerate(tree.edges):
        t = np.linspace(0.0, L, max(2, int(math.ceil(L / step)) + 1))
        d = np.minimum(DV[:, a, None] + t[None, :], DV[:, b, None] + (L - t)[None, :])
        for i, p in enumerate(points):
            if p.edge == e and tree.vertex_of(p) is None:
                d[i] = np.abs(t - p.offset)
        u = w @ (d ** 2)
        k = int(np.argmin(u))
        if u[k] < best[0]:
            best = (float(u[k]), tree.point(e, float(t[k])))
    return best[1], best[0]


# --------------------------------------------------------------- criteria

def criterion_1(seed=DEFAULT_SEED):
    worst = 0.0
    for k in range(3, 65):
        lam = spectral.scalar_spectral_gap(cx.cycle_graph(k)).lam
        worst = max(worst, abs(lam - spectral.cycle_gap_closed_form(k)))
    c6 = spectral.scalar_spectral_gap(cx.cycle_graph(6)).lam
    ok = worst < 1e-9 and abs(c6 - 0.5) < 1e-9
    return Result(1, "cycle spectra match closed form", ok,
                  {"max_abs_error": worst, "lambda_C6": c6}, 1.0)


def criterion_2(seed=DEFAULT_SEED):
    rows, ok = [], True
    for p in (2, 3, 5, 7):
        r = incidence.building_embedding_rq(p)
        good = (r["counts_match"]
                and abs(r["rq_gromov"] - r["rq_gromov_closed_form"]) < 1e-9
                and abs(r["rq"] - 0.5) < 1e-9)
        ok &= good
        rows.append({k: r[k] for k in ("p", "counts", "expected_counts", "rq_gromov", "rq_gromov_closed_form", "rq")})
    return Result(2, "building census and embedding quotients", bool(ok), {"rows": rows}, 5.0)


def criterion_3(seed=DEFAULT_SEED):
    K, coords = cx.torus_complex(3, 3)
    c = hm.lattice_cocycle(K, coords, 3, 3)
    f = hm.solve_twisted_harmonic(K, c)
    rep = hm.garland_identity_check(K, f, c)
    rq = [q for q in rep["link_rq"] if q is not None]
    ok = (rep["max_laplacian"] < 1e-8
          and len(rq) == K.n and all(abs(q - 0.5) <= 1e-8 for q in rq)
          and rep["residual_link"] < 1e-8 and rep["residual_ED"] < 1e-8
          and rep["residual_garland"] is not None and rep["residual_garland"] < 1e-8)
    detail = {k: rep[k] for k in ("energy", "sum_link_energy", "sum_ED", "two_sum_rq_ed",
                                  "residual_link", "residual_ED", "residual_garland", "max_laplacian")}
    detail["link_rq_range"] = [min(rq), max(rq)] if rq else None
    return Result(3, "Garland identities on the twisted torus", bool(ok), detail, 1.0)


def _gap_complexes(rng):
    """Platonic complexes and random re-weightings whose link gaps all exceed 1/2."""
    base = [cx.tetrahedron_complex(), cx.octahedron_complex(), cx.icosahedron_complex()]
    out = []
    for K in base:
        out.append(K)
        for _ in range(3):
            out.append(reweighted(K, rng))
    kept = []
    for K in out:
        gaps = hm.link_gaps(K)
        if gaps.min() > 0.5:
            kept.append((K, float(gaps.min())))
    return kept


def criterion_4(seed=DEFAULT_SEED, n_maps=1000):
    rng = randomgen.sample_rng(seed, 4)
    complexes = _gap_complexes(rng)
    worst, count, by_target = math.inf, 0, {"euclidean": 0, "tree": 0}
    for i in range(n_maps):
        K, lam = complexes[i % len(complexes)]
        space = cat0.Euclidean(int(rng.integers(1, 4))) if i % 2 == 0 else cat0.MetricTree.random(rng, int(rng.integers(1, 7)))
        f = hm.VertexMap.random(space, K.n, rng)
        sweeps = int(rng.integers(0, 12))
        if sweeps:
            f = hm.mayer_flow(K, f, 0.5, sweeps).final
        rep = hm.garland_inequality_check(K, f, lam)
        worst = min(worst, rep["slack"])
        count += 1
        by_target["euclidean" if isinstance(space, cat0.Euclidean) else "tree"] += 1
    ok = worst >= -1e-9
    return Result(4, "Garland inequality on random maps", bool(ok),
                  {"maps": count, "complexes": len(complexes), "min_slack": worst, "by_target": by_target}, 30.0)


def criterion_5(seed=DEFAULT_SEED, n_maps=1000):
    rng = randomgen.sample_rng(seed, 5)
    worst_link, worst_ed = 0.0, 0.0
    for i in range(n_maps):
        K = random_complex(rng)
        space = random_target(rng)
        f = hm.VertexMap.random(space, K.n, rng)
        E = hm.energy(K, f)
        sum_link = sum_ed = 0.0
        for x in range(K.n):
            ld = hm.local_data(K, f, x)
            sum_link += hm.energy(ld.link, hm.link_restriction(ld, space))
            sum_ed += ld.ED
        scale = max(1.0, abs(E))
        worst_link = max(worst_link, abs(E - sum_link) / scale)
        worst_ed = max(worst_ed, abs(E - sum_ed) / scale)
    ok = worst_link <= 1e-10 and worst_ed <= 1e-10
    return Result(5, "unconditional energy identities", bool(ok),
                  {"maps": n_maps, "max_rel_residual_link": worst_link, "max_rel_residual_ED": worst_ed}, 30.0)


def criterion_6(seed=DEFAULT_SEED, starts=100, sweeps=500):
    rng = randomgen.sample_rng(seed, 6)
    K = cx.icosahedron_complex()
    gaps = hm.link_gaps(K)
    used, rates, monotone, reached = [], [], True, True
    for _ in range(starts):
        f0 = hm.VertexMap.euclidean(rng.normal(size=(K.n, 3)))
        E0 = hm.energy(K, f0)
        tr = hm.mayer_flow(K, f0, 0.5, sweeps, stop_below=1e-12 * E0)
        monotone &= tr.is_monotone(tol=0.0)
        hit = tr.energies[-1] < 1e-12 * E0
        reached &= bool(hit)
        used.append(tr.steps[-1][0])
        rates.append(tr.decay_rate())
    ok = bool(gaps.min() > 0.5 and monotone and reached)
    return Result(6, "flow decay on an all-C5-link complex", ok,
                  {"min_link_gap": float(gaps.min()), "starts": starts, "max_sweeps_used": max(used),
                   "mean_sweeps_used": float(np.mean(used)), "monotone": bool(monotone),
                   "worst_decay_rate": max(rates)}, 10.0)


def criterion_7(seed=DEFAULT_SEED, trees=200):
    rng = randomgen.sample_rng(seed, 7)
    worst_d, worst_u = 0.0, -math.inf
    for _ in range(trees):
        T = cat0.MetricTree.random(rng, int(rng.integers(1, 13)))
        k = int(rng.integers(1, 9))
        pts = [T.random_point(rng) for _ in range(k)]
        w = rng.uniform(0.1, 3.0, size=k)
        b = T.barycenter(pts, w)
        g, ug = grid_barycenter(T, pts, w)
        worst_d = max(worst_d, T.distance(b, g))
        worst_u = max(worst_u, T.u(pts, w, b) - ug)
    ok = worst_d <= 1e-3 and worst_u <= 1e-12
    return Result(7, "tree barycenter matches grid oracle", bool(ok),
                  {"trees": trees, "max_distance": worst_d, "max_u_excess": worst_u}, 30.0)


def star_closing_check(tree, g_points, weights):
    """Polygon-closing residual and re-embedding violations at the barycenter."""
    b = tree.barycenter(g_points, weights)
    star = cat0.tangent_cone_star(tree, b, g_points, weights)
    E = cat0.polygon_closing_embedding(star.mass)
    resid = float(np.linalg.norm((star.mass[:, None] * E).sum(axis=0)))
    emb = cat0.star_embedding(star)
    D2 = tree.pairwise_sq_distances(list(g_points))
    lip = float(np.max(np.sqrt(((emb[:, None] - emb[None]) ** 2).sum(-1)) - np.sqrt(D2)))
    radial = float(np.max(np.abs(np.linalg.norm(emb, axis=1) - star.radius)))
    return resid, float(star.mass.sum()), lip, radial


def criterion_8(seed=DEFAULT_SEED, graphs=100, maps_per_graph=100):
    rng = randomgen.sample_rng(seed, 8)
    worst, close_ok, lip_worst, count = math.inf, True, -math.inf, 0
    for _ in range(graphs):
        G = random_connected_graph(rng, int(rng.integers(3, 9)))
        lam = spectral.scalar_spectral_gap(G).lam
        T = cat0.MetricTree.random(rng, int(rng.integers(2, 9)))
        w = np.asarray(G.vertex_weights)
        for _ in range(maps_per_graph):
            g = hm.VertexMap.random(T, G.n, rng)
            try:
                rq = spectral.rayleigh_quotient(G, g)
            except ValueError:
                continue
            count += 1
            worst = min(worst, rq - lam)
            resid, total, lip, radial = star_closing_check(T, g.points, w)
            close_ok &= resid <= 1e-9 * max(total, 1e-300) and radial <= 1e-9
            lip_worst = max(lip_worst, lip)
    ok = worst >= -1e-9 and close_ok and lip_worst <= 1e-9
    return Result(8, "tree Rayleigh quotients dominate the scalar gap", bool(ok),
                  {"maps": count, "min_rq_minus_lambda": worst, "closing_ok": bool(close_ok),
                   "max_lipschitz_excess": lip_worst}, 60.0)


def criterion_9(seed=DEFAULT_SEED, samples=10_000):
    rng = randomgen.sample_rng(seed, 9)
    fails = {"euclidean": 0, "tree": 0}
    worst = math.inf
    for i in range(2 * samples):
        k = int(rng.integers(4, 13))
        if i % 2 == 0:
            space = cat0.Euclidean(int(rng.integers(1, 5)))
            kind = "euclidean"
        else:
            space = cat0.MetricTree.random(rng, int(rng.integers(1, 9)))
            kind = "tree"
        g = [space.random_point(rng) for _ in range(k)]
        try:
            rep = wirtinger.wir_check(space, g)
        except wirtinger.WirtingerError:
            continue
        for r in rep["rows"]:
            worst = min(worst, r["ratio"] - r["bound"])
        fails[kind] += not rep["pass"]
    eq_worst = 0.0
    for k in range(4, 13):
        rep = wirtinger.wir_check(cat0.Euclidean(2), list(wirtinger.regular_polygon(k)))
        for r in rep["rows"]:
            eq_worst = max(eq_worst, abs(r["ratio"] - r["bound"]))
    ok = fails["euclidean"] == 0 and fails["tree"] == 0 and eq_worst <= 1e-9
    return Result(9, "Wirtinger inequalities and polygon equality", bool(ok),
                  {"samples_per_target": samples, "failures": fails, "min_margin": worst,
                   "regular_polygon_max_gap": eq_worst}, 60.0)


def criterion_10(seed=DEFAULT_SEED, n=2000, d=4, samples=50, trace_k=6, jobs=1):
    st = randomgen.spectral_statistics(n, d, samples, seed, trace_k=trace_k, jobs=jobs)
    low = 1 - 2 * math.sqrt(2 * d - 1) / (2 * d) - 0.05
    in_band = low <= st["mean"] <= 1.0
    ok = in_band and st["trace_bound_valid"]
    detail = {k: st[k] for k in ("n", "d", "seed", "mean", "std", "min", "max", "tree_reference", "trace_bound_valid")}
    detail["band"] = [low, 1.0]
    detail["max_trace_bound"] = max(r["trace_bound"] for r in st["samples"] if r["trace_bound"] is not None)
    return Result(10, "permutation-model spectra", bool(ok), detail, 300.0)


def criterion_11(seed=DEFAULT_SEED, ms=(10, 20, 40), density=0.4, samples=50, jobs=1):
    fractions, consistent = [], True
    for m in ms:
        st = randomgen.group_statistics(m, density, samples, seed, jobs=jobs)
        fractions.append(st["certified_fraction"])
        for r in st["samples"]:
            pres = randomgen.density_presentation(m, density, seed, r["index"])
            G = randomgen.link_graph_of_presentation(pres)
            # independent eigensolve: dense generalized problem via scipy
            lam = _independent_gap(G)
            consistent &= abs(lam - r["lambda"]) <= 1e-8
    monotone = all(a <= b for a, b in zip(fractions, fractions[1:]))
    return Result(11, "random-group certified fraction trend", bool(monotone and consistent),
                  {"m": list(ms), "density": density, "seed": seed, "certified_fraction": fractions,
                   "nondecreasing": monotone, "lambda_consistent": bool(consistent)}, 120.0)


def _independent_gap(G):
    from scipy.linalg import eigh

    if not G.is_connected():
        return 0.0
    L = spectral.laplacian(G)
    return float(eigh(L, np.diag(G.vertex_weights), eigvals_only=True)[1])


def criterion_12(seed=DEFAULT_SEED):
    ico = hm.fixed_point_certificate(cx.icosahedron_complex())
    tor = hm.fixed_point_certificate(cx.torus_complex()[0])
    ico_in = hm.fixed_point_certificate(cx.icosahedron_complex(), delta=0.4122)
    c5 = spectral.cycle_gap_closed_form(5)
    ok = (ico["granted"] and abs(ico["min_gap"] - c5) < 1e-9
          and not tor["granted"] and abs(tor["min_gap"] - 0.5) < 1e-9
          and not ico_in["granted"] and abs(ico_in["threshold"] - 1 / (2 * (1 - 0.4122))) < 1e-12)
    detail = {name: {k: r[k] for k in ("target", "threshold", "min_gap", "granted")}
              for name, r in (("c5_hilbert", ico), ("torus_hilbert", tor), ("c5_in_0.4122", ico_in))}
    return Result(12, "certificate verdicts", bool(ok), detail, 1.0)


def criterion_13(seed=DEFAULT_SEED):
    """Re-run seeded criteria and a CLI report twice; compare bytes."""
    from .cli import main

    runs = [
        lambda: report_text([criterion_4(seed, n_maps=60)]),
        lambda: report_text([criterion_5(seed, n_maps=60)]),
        lambda: report_text([criterion_7(seed, trees=10)]),
        lambda: report_text([criterion_9(seed, samples=200)]),
        lambda: report_text([criterion_10(seed, n=200, samples=4)]),
        lambda: report_text([criterion_11(seed, ms=(10,), samples=10)]),
    ]

    def cli_run():
        buf = io.StringIO()
        with redirect_stdout(buf):
            main(["random-group", "--m", "10", "--density", "0.4", "--samples", "5", "--seed", str(seed)])
        return buf.getvalue()

    runs.append(cli_run)
    same = [fn() == fn() for fn in runs]
    return Result(13, "same seed gives byte-identical reports", all(same),
                  {"runs": len(runs), "identical": same}, math.inf)


CRITERIA = {i: globals()[f"criterion_{i}"] for i in range(1, 14)}


def run(numbers=None, seed=DEFAULT_SEED, jobs=1):
    out = []
    for i in numbers or sorted(CRITERIA):
        kwargs = {"seed": seed}
        if i in (10, 11):
            kwargs["jobs"] = jobs
        t0 = time.perf_counter()
        res = CRITERIA[i](**kwargs)
        res.seconds = time.perf_counter() - t0
        if res.seconds > res.limit_s:
            res.passed = False
            res.detail["runtime_exceeded"] = True
        out.append(res)
    return out


def report_text(results) -> str:
    return dumps({str(r.number): {"title": r.title, "passed": r.passed, "detail": r.detail} for r in results})
