"""JSON and OFF readers and writers.

Writers add a ``"type"`` tag; readers accept documents with or without
it.  Floats are written with Python's shortest round-trip representation,
so reading a written file gives back bit-identical arrays.

Schemas::

    polytope      {"dim": n, "vertices": [[x1..xn], ...]}
    measure       {"dim": n, "atoms": [{"u": [..], "w": x}, ...]}
    arc_measure   {"arcs": [{"a": [..], "b": [..], "d": x}, ...]}
    zonotope      {"dim": n, "center": [..], "generators": [[..], ...]}
    kernel        {"name": "projection"}
                  or {"name": str, "cheb_p": [..], "cheb_q": [..]}
                  with tables at cos(pi k / (N-1)), k = 0..N-1
    solve_report  {"iterations": int, "final_residual": float, "converged": bool,
                   "restarts": int, "polytope": polytope}
    report        free-form JSON

Facets of polytopes are always recomputed on load.
"""
from __future__ import annotations

import json
import math

import numpy as np

from .geomcore import Polytope
from .measures import ArcMeasure3D, DiscreteSphereMeasure
from .operators import KernelPair, Zonotope, chebyshev_nodes


class FormatError(ValueError):
    """Malformed or unexpected input document."""


def _finite(obj):
    """Replace non-finite floats so the output stays strict JSON."""
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    return obj


def dumps(doc):
    return json.dumps(_finite(doc), indent=1, sort_keys=True, allow_nan=False) + "\n"


def write_json(path, doc):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(doc))


def read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise FormatError(f"{path}: {exc}") from exc


def _array(doc, key, ndim):
    try:
        a = np.array(doc[key], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"field {key!r} missing or not numeric") from exc
    if a.ndim != ndim or not np.all(np.isfinite(a)):
        raise FormatError(f"field {key!r} must be a finite {ndim}-d array")
    return a


def _expect(doc, kind, keys):
    if not isinstance(doc, dict):
        raise FormatError(f"expected a {kind!r} document")
    if "type" in doc:
        if doc["type"] != kind:
            raise FormatError(f"expected a {kind!r} document, got {doc['type']!r}")
    elif not any(k in doc for k in keys):
        raise FormatError(f"expected a {kind!r} document with one of {sorted(keys)}")


# ---------------------------------------------------------------------------
# encoders

def polytope_to_json(P: Polytope):
    return {"type": "polytope", "dim": P.n, "vertices": P.vertices.tolist()}


def measure_to_json(mu: DiscreteSphereMeasure):
    return {"type": "measure", "dim": mu.n,
            "atoms": [{"u": u.tolist(), "w": float(w)}
                      for u, w in zip(mu.directions, mu.weights)]}


def arcs_to_json(arcs: ArcMeasure3D):
    return {"type": "arc_measure",
            "arcs": [{"a": a.tolist(), "b": b.tolist(), "d": float(d)}
                     for a, b, d in zip(arcs.starts, arcs.ends, arcs.densities)]}


def zonotope_to_json(Z: Zonotope):
    return {"type": "zonotope", "dim": Z.n, "center": Z.center.tolist(),
            "generators": Z.generators.tolist()}


def kernel_to_json(kernel: KernelPair, nodes=64):
    if kernel.name == "projection":
        return {"type": "kernel", "name": "projection"}
    t = chebyshev_nodes(nodes)
    p = kernel.table_p if kernel.table_p is not None else np.asarray(kernel.p(t), float)
    q = kernel.table_q if kernel.table_q is not None else np.asarray(kernel.q(t), float)
    return {"type": "kernel", "name": kernel.name, "cheb_p": np.asarray(p).tolist(),
            "cheb_q": np.asarray(q).tolist()}


def solve_report_to_json(report):
    return {"type": "solve_report", "iterations": int(report.iterations),
            "final_residual": float(report.final_residual),
            "converged": bool(report.converged), "restarts": int(report.restarts),
            "polytope": polytope_to_json(report.polytope)}


# ---------------------------------------------------------------------------
# decoders

def polytope_from_json(doc) -> Polytope:
    _expect(doc, "polytope", {"vertices"})
    V = _array(doc, "vertices", 2)
    if "dim" in doc and V.shape[1] != doc["dim"]:
        raise FormatError("vertex length does not match dim")
    try:
        return Polytope(V)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def measure_from_json(doc) -> DiscreteSphereMeasure:
    _expect(doc, "measure", {"atoms"})
    n = doc.get("dim")
    atoms = doc.get("atoms")
    if not isinstance(atoms, list):
        raise FormatError("field 'atoms' must be a list")
    try:
        U = np.array([a["u"] for a in atoms], dtype=float)
        w = np.array([a["w"] for a in atoms], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError("every atom needs a direction 'u' and a weight 'w'") from exc
    if U.size and (U.ndim != 2 or (n is not None and U.shape[1] != n)):
        raise FormatError("atom directions must have length dim")
    if n is None and not U.size:
        raise FormatError("an empty measure needs 'dim'")
    try:
        return DiscreteSphereMeasure(U, w, n=n)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def arcs_from_json(doc) -> ArcMeasure3D:
    _expect(doc, "arc_measure", {"arcs"})
    try:
        a = np.array([r["a"] for r in doc["arcs"]], dtype=float).reshape(-1, 3)
        b = np.array([r["b"] for r in doc["arcs"]], dtype=float).reshape(-1, 3)
        d = np.array([r["d"] for r in doc["arcs"]], dtype=float)
        return ArcMeasure3D(a, b, d)
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed arc measure: {exc}") from exc


def zonotope_from_json(doc) -> Zonotope:
    _expect(doc, "zonotope", {"generators"})
    c = _array(doc, "center", 1)
    G = np.array(doc.get("generators", []), dtype=float)
    try:
        return Zonotope(G.reshape(-1, len(c)), c, n=len(c))
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def kernel_from_json(doc) -> KernelPair:
    _expect(doc, "kernel", {"name", "cheb_p"})
    if doc.get("name") == "projection" and "cheb_p" not in doc:
        return KernelPair.projection()
    if "cheb_p" not in doc or "cheb_q" not in doc:
        raise FormatError("kernel needs 'cheb_p' and 'cheb_q' tables or name 'projection'")
    try:
        return KernelPair(_array(doc, "cheb_p", 1), _array(doc, "cheb_q", 1),
                          name=doc.get("name"))
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def solve_report_from_json(doc):
    from .minkowski_solver import SolveReport

    _expect(doc, "solve_report", {"polytope", "converged"})
    try:
        return SolveReport(polytope_from_json(doc["polytope"]), int(doc["iterations"]),
                           float(doc["final_residual"]), bool(doc["converged"]),
                           int(doc.get("restarts", 0)))
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed solve report: {exc}") from exc


def body_from_json(doc):
    """Polytope from either a polytope or a zonotope document."""
    if isinstance(doc, dict) and (doc.get("type") == "zonotope" or "generators" in doc):
        from .operators import zonotope_to_polytope
        return zonotope_to_polytope(zonotope_from_json(doc))
    return polytope_from_json(doc)


# ---------------------------------------------------------------------------
# OFF (3-polytopes)

def write_off(path, P: Polytope):
    """OFF file with one polygon per facet, vertices in counterclockwise order."""
    if P.n != 3 or not P.is_full:
        raise ValueError("OFF export needs a full-dimensional 3-polytope")
    V = P.vertices
    faces = []
    for f in P.facets:
        idx = np.asarray(f.vertex_indices)
        pts = V[idx] - V[idx].mean(axis=0)
        a = pts[0] / np.linalg.norm(pts[0])
        b = np.cross(f.normal, a)
        order = np.argsort(np.arctan2(pts @ b, pts @ a))
        faces.append(idx[order])
    lines = ["OFF", f"{len(V)} {len(faces)} 0"]
    lines += [" ".join(repr(float(x)) for x in v) for v in V]
    lines += [" ".join(str(int(k)) for k in [len(f), *f]) for f in faces]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def read_off(path) -> Polytope:
    """Polytope spanned by the vertices of an OFF file (faces are recomputed)."""
    try:
        with open(path, encoding="utf-8") as fh:
            tokens = [ln.split("#")[0].split() for ln in fh]
    except OSError as exc:
        raise FormatError(str(exc)) from exc
    tokens = [t for t in tokens if t]
    if not tokens or tokens[0][0] != "OFF":
        raise FormatError("missing OFF header")
    head = tokens[0][1:] or tokens[1]
    body = tokens[1:] if tokens[0][1:] else tokens[2:]
    try:
        nv = int(head[0])
        V = np.array([[float(x) for x in row[:3]] for row in body[:nv]])
    except (ValueError, IndexError) as exc:
        raise FormatError("malformed OFF vertex block") from exc
    if V.shape != (nv, 3):
        raise FormatError("malformed OFF vertex block")
    return Polytope(V)
