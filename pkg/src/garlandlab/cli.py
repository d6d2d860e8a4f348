"""Command line entry point ``garland-lab``.

Exit status: 0 success, 1 error, 2 certificate evaluated and refused.
"""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import TOOL, __version__
from . import cat0, harmonic as hm, incidence, randomgen, spectral, wirtinger
from .complex import WeightedComplex, WeightedGraph, cycle_graph, icosahedron_complex
from .complex import octahedron_complex, tetrahedron_complex, torus_complex
from .formats import (cocycle_from_json, dump_text, dumps, load, map_from_json, read_json,
                      to_jsonable)

EXIT_OK, EXIT_ERROR, EXIT_REFUSED = 0, 1, 2

BUILTIN_COMPLEXES = {
    "torus": lambda: torus_complex(3, 3)[0],
    "icosahedron": icosahedron_complex,
    "octahedron": octahedron_complex,
    "tetrahedron": tetrahedron_complex,
}


class UsageError(ValueError):
    pass


def resolve_seed(seed):
    if seed is not None:
        return int(seed)
    env = os.environ.get("GARLAND_LAB_SEED")
    if env:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"GARLAND_LAB_SEED={env!r} is not an integer") from None
    return 0


def emit(args, result, out=None):
    out = out or sys.stdout
    config = {k: (str(v) if isinstance(v, Path) else v) for k, v in vars(args).items() if k != "func"}
    out.write(dumps({"tool": TOOL, "version": __version__, "config": config, "result": result}))


def load_complex(name) -> WeightedComplex:
    if name in BUILTIN_COMPLEXES and not Path(name).exists():
        return BUILTIN_COMPLEXES[name]()
    obj = load(name)
    if not isinstance(obj, WeightedComplex):
        raise UsageError(f"{name} is not a complex file")
    return obj


def parse_target(spec, rng=None):
    kind, _, arg = spec.partition(":")
    if kind == "euclidean":
        return cat0.Euclidean(int(arg or 1))
    if kind == "tree":
        T = load(arg)
        if not isinstance(T, cat0.MetricTree):
            raise UsageError(f"{arg} is not a tree file")
        return T
    if kind == "random-tree":
        if rng is None:
            raise UsageError("random-tree targets need a seed")
        return cat0.MetricTree.random(rng, int(arg or 4))
    raise UsageError(f"unknown target {spec!r}; use euclidean:N, tree:FILE or random-tree:E")


# -------------------------------------------------------------- handlers

def cmd_spectra(args):
    if args.closed_form is not None:
        emit(args, {"k": args.closed_form, "closed_form": spectral.cycle_gap_closed_form(args.closed_form)})
        return EXIT_OK
    if not args.targets:
        raise UsageError("give 'cycle --k K', graph files, or --closed-form K")
    reports = []
    for t in args.targets:
        if t == "cycle":
            if args.k is None:
                raise UsageError("'cycle' needs --k")
            G, src = cycle_graph(args.k), f"cycle:{args.k}"
        else:
            G, src = load(t), t
            if isinstance(G, WeightedComplex):
                G = G.one_skeleton()
            if not isinstance(G, WeightedGraph):
                raise UsageError(f"{t} is not a graph or complex")
        rep = spectral.scalar_spectral_gap(G).to_dict()
        rep["source"] = src
        if args.trace_k:
            rep["trace_bound"] = spectral.trace_method_gap_bound(G, args.trace_k) if rep["connected"] else None
        reports.append(rep)
    emit(args, reports[0] if len(reports) == 1 else reports)
    return EXIT_OK


def cmd_garland(args):
    K = load_complex(args.complex)
    cocycle = None
    if args.action == "certify":
        rep = hm.fixed_point_certificate(K, delta=args.delta)
        emit(args, rep)
        return EXIT_OK if rep["granted"] else EXIT_REFUSED
    if args.lattice:
        if args.complex != "torus":
            raise UsageError("--lattice only applies to the builtin torus")
        K, coords = torus_complex(3, 3)
        cocycle = hm.lattice_cocycle(K, coords, 3, 3)
    elif args.cocycle:
        cocycle = cocycle_from_json(read_json(args.cocycle))
    if args.map:
        f = map_from_json(read_json(args.map))
    elif cocycle is not None:
        f = hm.solve_twisted_harmonic(K, cocycle)
    else:
        rng = randomgen.sample_rng(resolve_seed(args.seed))
        f = hm.VertexMap.euclidean(rng.normal(size=(K.n, 2)))
    if args.action == "identity":
        emit(args, hm.garland_identity_check(K, f, cocycle))
        return EXIT_OK
    lam = args.lam if args.lam is not None else float(hm.link_gaps(K).min())
    emit(args, hm.garland_inequality_check(K, f, lam, cocycle))
    return EXIT_OK


def cmd_flow(args):
    K = load_complex(args.complex)
    seed = resolve_seed(args.seed)
    rng = randomgen.sample_rng(seed)
    cocycle = cocycle_from_json(read_json(args.cocycle)) if args.cocycle else None
    if args.map:
        f0 = map_from_json(read_json(args.map))
    else:
        f0 = hm.VertexMap.random(parse_target(args.target, rng), K.n, rng)
    tr = hm.mayer_flow(K, f0, args.eta, args.iterations, cocycle)
    if args.format == "csv":
        sys.stdout.write(tr.to_csv())
    else:
        emit(args, {"seed": seed, "steps": [list(s) for s in tr.steps], "monotone": tr.is_monotone(),
                    "decay_rate": tr.decay_rate(),
                    "final": to_jsonable(tr.final)})
    return EXIT_OK


def cmd_wirtinger(args):
    if args.constant:
        k, j = args.constant
        emit(args, {"k": k, "j": j, "W": wirtinger.wirtinger_constant(k, j)})
        return EXIT_OK
    if args.certificate:
        G = _family_host(args.graph)
        loops = read_json(args.certificate)
        if args.averaged:
            rep = wirtinger.averaged_regular_certificate(G, loops)
        else:
            rep = wirtinger.loop_family_certificate(wirtinger.LoopFamily.build(G, loops, args.k))
        rep["eigensolved"] = spectral.scalar_spectral_gap(G).lam
        emit(args, rep)
        return EXIT_OK
    if args.check:
        seed = resolve_seed(args.seed)
        rng = randomgen.sample_rng(seed)
        fails, worst = 0, np.inf
        for _ in range(args.samples):
            space = parse_target(args.target, rng)
            g = [space.random_point(rng) for _ in range(args.check)]
            try:
                rep = wirtinger.wir_check(space, g)
            except wirtinger.WirtingerError:
                continue
            fails += not rep["pass"]
            worst = min(worst, min(r["ratio"] - r["bound"] for r in rep["rows"]))
        poly = wirtinger.wir_check(cat0.Euclidean(2), list(wirtinger.regular_polygon(args.check)))
        emit(args, {"k": args.check, "seed": seed, "samples": args.samples, "failures": fails,
                    "min_margin": worst, "regular_polygon": poly})
        return EXIT_OK
    raise UsageError("give --check K, --certificate FILE or --constant K J")


def _family_host(spec):
    if spec is None:
        raise UsageError("--certificate needs --graph")
    if spec.startswith("pg2:"):
        return incidence.projective_plane_incidence(int(spec[4:])).graph
    if spec.startswith("cycle:"):
        return cycle_graph(int(spec[6:]))
    G = load(spec)
    if not isinstance(G, WeightedGraph):
        raise UsageError(f"{spec} is not a graph file")
    return G


def cmd_incidence(args):
    I = incidence.projective_plane_incidence(args.p)
    if args.export:
        Path(args.export).write_text(dump_text(I.graph), encoding="utf-8")
    G = I.graph
    result = {
        "p": args.p,
        "vertices": G.n,
        "edges": len(G.edges),
        "valence": args.p + 1,
        "lambda": spectral.scalar_spectral_gap(G).lam,
    }
    if args.census:
        result["census"] = incidence.building_embedding_rq(args.p)
    if args.feit_higman:
        result["feit_higman"] = incidence.feit_higman_compare(args.p)
    if args.triangle_check:
        result["generalized_triangle"] = incidence.generalized_triangle_check(G)
    emit(args, result)
    return EXIT_OK


def _samples_csv(rows, keys):
    lines = [",".join(keys)]
    for r in rows:
        lines.append(",".join("" if r.get(k) is None else (f"{r[k]:.17g}" if isinstance(r[k], float) else str(r[k]))
                              for k in keys))
    return "\n".join(lines) + "\n"


def cmd_random_graph(args):
    seed = resolve_seed(args.seed)
    st = randomgen.spectral_statistics(args.n, args.d, args.samples, seed, c=args.c,
                                       trace_k=args.trace_k, jobs=args.jobs)
    if args.format == "csv":
        keys = ["index", "lambda", "connected"] + (["trace_bound"] if args.trace_k else [])
        sys.stdout.write(_samples_csv(st["samples"], keys))
    else:
        emit(args, st)
    return EXIT_OK


def cmd_random_group(args):
    seed = resolve_seed(args.seed)
    st = randomgen.group_statistics(args.m, args.density, args.samples, seed, jobs=args.jobs)
    if args.format == "csv":
        sys.stdout.write(_samples_csv(st["samples"], ["index", "relators", "connected", "lambda", "certified"]))
    else:
        emit(args, st)
    return EXIT_OK


def cmd_in_bounds(args):
    result = {}
    if args.p:
        result["in_lower_bound"] = {str(p): cat0.in_lower_bound_building(p) for p in args.p}
    if args.lam is not None:
        delta = args.delta if args.delta is not None else 0.0
        bound = cat0.gap_bound_from_in(args.lam, delta)
        thr = 1 / (2 * (1 - delta))
        result.update({"lambda": args.lam, "delta": delta, "gap_bound": bound,
                       "threshold": thr, "granted": args.lam > thr})
        emit(args, result)
        return EXIT_OK if args.lam > thr else EXIT_REFUSED
    if not result:
        raise UsageError("give --p and/or --lambda")
    emit(args, result)
    return EXIT_OK


def cmd_reproduce(args):
    from .acceptance import report_text, run

    numbers = sorted({int(x) for x in args.only.split(",")}) if args.only else None
    seed = args.seed if args.seed is not None else _default_seed()
    results = run(numbers, seed=seed, jobs=args.jobs)
    for r in results:
        print(r.line(), flush=True)
    if args.report:
        Path(args.report).write_text(report_text(results), encoding="utf-8")
    return EXIT_OK if all(r.passed for r in results) else EXIT_ERROR


def _default_seed():
    from .acceptance import DEFAULT_SEED

    env = os.environ.get("GARLAND_LAB_SEED")
    return int(env) if env else DEFAULT_SEED


# ---------------------------------------------------------------- parser

def build_parser():
    p = argparse.ArgumentParser(prog="garland-lab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"{TOOL} {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def seeded(sp):
        sp.add_argument("--seed", type=int, default=None, help="seed (default: $GARLAND_LAB_SEED or 0)")

    s = sub.add_parser("spectra", help="scalar spectral gaps of graphs")
    s.add_argument("targets", nargs="*", help="'cycle' or graph/complex files")
    s.add_argument("--k", type=int, help="cycle length for the 'cycle' target")
    s.add_argument("--closed-form", type=int, metavar="K", help="print 1 - cos(2 pi / K)")
    s.add_argument("--trace-k", type=int, default=0, help="also report the trace-method bound")
    seeded(s)
    s.set_defaults(func=cmd_spectra)

    s = sub.add_parser("garland", help="fixed-point certificates and Garland checks")
    s.add_argument("action", choices=["certify", "identity", "inequality"])
    s.add_argument("complex", help="complex file or builtin: " + ", ".join(BUILTIN_COMPLEXES))
    s.add_argument("--delta", type=float, help="IN bound of the target class (default: Hilbert)")
    s.add_argument("--map", help="vertex map JSON")
    s.add_argument("--cocycle", help="edge cocycle JSON")
    s.add_argument("--lattice", action="store_true", help="use the lattice cocycle of the builtin torus")
    s.add_argument("--lambda", dest="lam", type=float, help="link gap floor for 'inequality'")
    seeded(s)
    s.set_defaults(func=cmd_garland)

    s = sub.add_parser("flow", help="discrete Mayer flow; CSV trace")
    s.add_argument("complex")
    s.add_argument("--map", help="start map JSON (default: random)")
    s.add_argument("--target", default="euclidean:2", help="euclidean:N, tree:FILE or random-tree:E")
    s.add_argument("--cocycle")
    s.add_argument("--eta", type=float, default=0.5)
    s.add_argument("--iterations", type=int, default=100)
    s.add_argument("--format", choices=["csv", "json"], default="csv")
    seeded(s)
    s.set_defaults(func=cmd_flow)

    s = sub.add_parser("wirtinger", help="Wirtinger checks and loop-family certificates")
    s.add_argument("--check", type=int, metavar="K")
    s.add_argument("--target", default="euclidean:2")
    s.add_argument("--samples", type=int, default=1000)
    s.add_argument("--certificate", metavar="FAMILY_JSON")
    s.add_argument("--graph", help="host graph file, pg2:P or cycle:K")
    s.add_argument("--averaged", action="store_true", help="distance-regular averaged bound")
    s.add_argument("--k", type=int, help="loop length bound (default: longest loop)")
    s.add_argument("--constant", type=int, nargs=2, metavar=("K", "J"))
    seeded(s)
    s.set_defaults(func=cmd_wirtinger)

    s = sub.add_parser("incidence", help="projective plane incidence graphs")
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--census", action="store_true")
    s.add_argument("--feit-higman", action="store_true")
    s.add_argument("--triangle-check", action="store_true")
    s.add_argument("--export", help="write the graph in text format")
    seeded(s)
    s.set_defaults(func=cmd_incidence)

    s = sub.add_parser("random-graph", help="permutation-model spectra")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--samples", type=int, default=10)
    s.add_argument("--c", type=float, help="Friedman constant for the threshold fraction")
    s.add_argument("--trace-k", type=int, default=0)
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--format", choices=["json", "csv"], default="json")
    seeded(s)
    s.set_defaults(func=cmd_random_graph)

    s = sub.add_parser("random-group", help="density-model presentations and link-graph verdicts")
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--density", type=float, required=True)
    s.add_argument("--samples", type=int, default=10)
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--format", choices=["json", "csv"], default="json")
    seeded(s)
    s.set_defaults(func=cmd_random_group)

    s = sub.add_parser("in-bounds", help="Izeki-Nayatani bounds and thresholds")
    s.add_argument("--p", type=int, nargs="*", help="primes for the building lower bound")
    s.add_argument("--lambda", dest="lam", type=float)
    s.add_argument("--delta", type=float)
    seeded(s)
    s.set_defaults(func=cmd_in_bounds)

    s = sub.add_parser("reproduce", help="run the acceptance criteria")
    s.add_argument("--only", help="comma-separated criterion numbers")
    s.add_argument("--report", help="write the JSON report here")
    s.add_argument("--jobs", type=int, default=1)
    seeded(s)
    s.set_defaults(func=cmd_reproduce)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if hasattr(args, "seed"):
        try:
            args.seed = resolve_seed(args.seed) if args.command != "reproduce" else args.seed
        except UsageError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_ERROR
    try:
        return args.func(args)
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
