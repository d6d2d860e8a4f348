"""Text and JSON formats for graphs, complexes, trees, maps and cocycles.

Text files are line oriented with ``#`` comments::

    complex          graph            tree
    v 4              v 3              v 3
    t 0 1 2 1.0      e 0 1 1.0        e 0 1 0.5
    t 0 1 3 2.0      e 1 2 1.0        e 1 2 1.5

In complex files ``e`` lines declare edges lying in no face; edge and
vertex weights of faces are always recomputed by propagation.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .cat0 import Euclidean, MetricTree, Product, TreePoint
from .complex import ComplexError, WeightedComplex, WeightedGraph, propagate_weights
from .harmonic import EdgeCocycle, VertexMap


class FormatError(ValueError):
    pass


def _parse(text, source="<text>"):
    kind, n, rows = None, None, []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        where = f"{source}:{lineno}"
        if kind is None:
            if tok[0] not in ("graph", "complex", "tree") or len(tok) != 1:
                raise FormatError(f"{where}: expected header 'graph', 'complex' or 'tree'")
            kind = tok[0]
            continue
        if tok[0] == "v":
            if n is not None:
                raise FormatError(f"{where}: vertex count declared twice")
            if len(tok) != 2:
                raise FormatError(f"{where}: expected 'v N'")
            n = _int(tok[1], where)
            if n < 0:
                raise FormatError(f"{where}: negative vertex count")
            continue
        if tok[0] == "e":
            want = 4
        elif tok[0] == "t" and kind == "complex":
            want = 5
        else:
            raise FormatError(f"{where}: unknown record '{tok[0]}' in a {kind} file")
        if len(tok) != want:
            raise FormatError(f"{where}: '{tok[0]}' takes {want - 1} fields, got {len(tok) - 1}")
        if n is None:
            raise FormatError(f"{where}: 'v N' must come before simplices")
        ids = [_int(t, where) for t in tok[1:-1]]
        for x in ids:
            if not 0 <= x < n:
                raise FormatError(f"{where}: vertex {x} outside 0..{n - 1}")
        w = _float(tok[-1], where)
        if not w > 0:
            raise FormatError(f"{where}: weight must be positive, got {w}")
        rows.append((tok[0], ids, w, where))
    if kind is None:
        raise FormatError(f"{source}: empty file")
    if n is None:
        raise FormatError(f"{source}: missing 'v N' line")
    return kind, n, rows


def _int(s, where):
    try:
        return int(s)
    except ValueError:
        raise FormatError(f"{where}: '{s}' is not an integer") from None


def _float(s, where):
    try:
        return float(s)
    except ValueError:
        raise FormatError(f"{where}: '{s}' is not a number") from None


def parse_text(text, source="<text>"):
    """Parse a graph, complex or tree description; returns the built object."""
    kind, n, rows = _parse(text, source)
    if kind == "graph":
        return WeightedGraph.from_edges(n, [r[1] for r in rows], [r[2] for r in rows])
    if kind == "tree":
        try:
            return MetricTree(n, [(*r[1], r[2]) for r in rows])
        except ValueError as exc:
            raise FormatError(f"{source}: {exc}") from None
    faces = [(tuple(r[1]), r[2], r[3]) for r in rows if r[0] == "t"]
    free = [(*r[1], r[2]) for r in rows if r[0] == "e"]
    seen = {}
    for f, _, where in faces:
        key = tuple(sorted(f))
        if len(set(key)) != 3:
            raise FormatError(f"{where}: face needs three distinct vertices")
        if key in seen:
            raise FormatError(f"{where}: duplicate face {key} (first at {seen[key]})")
        seen[key] = where
    try:
        return propagate_weights([f for f, _, _ in faces], [w for _, w, _ in faces], n=n, free_edges=free)
    except ComplexError as exc:
        raise FormatError(f"{source}: {exc}") from None


def load(path):
    path = Path(path)
    return parse_text(path.read_text(encoding="utf-8"), str(path))


def _num(x):
    return repr(float(x))


def dump_text(obj) -> str:
    if isinstance(obj, WeightedGraph):
        lines = ["graph", f"v {obj.n}"]
        lines += [f"e {u} {v} {_num(w)}" for (u, v), w in zip(obj.edges, obj.edge_weights)]
    elif isinstance(obj, WeightedComplex):
        lines = ["complex", f"v {obj.n}"]
        lines += [f"t {a} {b} {c} {_num(w)}" for (a, b, c), w in zip(obj.faces, obj.face_weights)]
        for e in obj.edges_without_faces():
            lines.append(f"e {e[0]} {e[1]} {_num(obj.edge_weight(*e))}")
    elif isinstance(obj, MetricTree):
        lines = ["tree", f"v {obj.n}"] + [f"e {u} {v} {_num(L)}" for u, v, L in obj.edges]
    else:
        raise TypeError(f"cannot write {type(obj).__name__}")
    return "\n".join(lines) + "\n"


# -------------------------------------------------------------------- JSON

def to_jsonable(obj):
    """Plain JSON structures for the package's value types."""
    if isinstance(obj, WeightedGraph):
        return {
            "type": "graph",
            "n": obj.n,
            "edges": [[u, v, float(w)] for (u, v), w in zip(obj.edges, obj.edge_weights)],
            "vertex_weights": [float(w) for w in obj.vertex_weights],
        }
    if isinstance(obj, WeightedComplex):
        return {
            "type": "complex",
            "n": obj.n,
            "faces": [[*f, float(w)] for f, w in zip(obj.faces, obj.face_weights)],
            "edges": [[*e, float(w)] for e, w in zip(obj.edges, obj.edge_weights)],
            "vertex_weights": [float(w) for w in obj.vertex_weights],
        }
    if isinstance(obj, Euclidean):
        return {"type": "euclidean", "dim": obj.dim}
    if isinstance(obj, MetricTree):
        return {"type": "tree", "n": obj.n, "edges": [[u, v, L] for u, v, L in obj.edges]}
    if isinstance(obj, Product):
        return {"type": "product", "factors": [to_jsonable(Y) for Y in obj.factors]}
    if isinstance(obj, TreePoint):
        return {"edge": obj.edge, "offset": obj.offset}
    if isinstance(obj, VertexMap):
        return {"space": to_jsonable(obj.space), "points": [point_to_json(obj.space, p) for p in obj.points]}
    if isinstance(obj, EdgeCocycle):
        return {"dim": obj.dim, "values": [[u, v, [float(x) for x in c]] for (u, v), c in sorted(obj.values.items())]}
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    return obj


def point_to_json(space, p):
    if isinstance(space, Euclidean):
        return [float(x) for x in p]
    if isinstance(space, MetricTree):
        return {"edge": p.edge, "offset": p.offset}
    return [point_to_json(Y, q) for Y, q in zip(space.factors, p)]


def space_from_json(d):
    t = d.get("type")
    if t == "euclidean":
        return Euclidean(int(d["dim"]))
    if t == "tree":
        return MetricTree(int(d["n"]), [tuple(e) for e in d["edges"]])
    if t == "product":
        return Product(tuple(space_from_json(x) for x in d["factors"]))
    raise FormatError(f"unknown space type {t!r}")


def point_from_json(space, p):
    if isinstance(space, Euclidean):
        return np.asarray(p, dtype=float)
    if isinstance(space, MetricTree):
        return space.point(int(p["edge"]), float(p["offset"]))
    return tuple(point_from_json(Y, q) for Y, q in zip(space.factors, p))


def map_from_json(d):
    space = space_from_json(d["space"])
    return VertexMap(space, tuple(point_from_json(space, p) for p in d["points"]))


def cocycle_from_json(d):
    dim = int(d["dim"])
    return EdgeCocycle.from_oriented(dim, {(int(u), int(v)): c for u, v, c in d["values"]})


def dumps(obj) -> str:
    """Deterministic JSON text."""
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2, allow_nan=True) + "\n"


def read_json(path):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}:{exc.lineno}: {exc.msg}") from None
