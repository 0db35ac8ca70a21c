"""Problem and result files: exact JSON in, byte-stable JSON out.

Scalars are integers, "p/q" strings, or "-inf"; floats are rejected so
nothing loses exactness on the way through a file.  Set expressions use
tagged nodes ({"op": "halfspace"/"complement"/"union"/"intersection"/
"empty"}).  Serialization builds dictionaries in a fixed key order, so
parse followed by re-serialize reproduces the bytes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

from .approx import (
    Complement,
    Empty,
    Halfspace,
    Intersection,
    SetExpr,
    Union,
    UnionOfPolyhedra,
)
from .cones import AffineHalfSpace
from .maxplus import EPS
from .reach import MplSystem, StepStats
from .scalars import Scalar, as_scalar, scalar_to_json


class FormatError(ValueError):
    """Malformed problem or result data; the message carries the path."""


def _fail(where: str, msg: str) -> None:
    raise FormatError(f"{where}: {msg}")


def parse_scalar(obj: object, where: str) -> Scalar:
    try:
        return as_scalar(obj)
    except (TypeError, ValueError) as exc:
        _fail(where, str(exc))


def parse_vector_json(obj: object, where: str,
                      dim: Optional[int] = None) -> Tuple[Scalar, ...]:
    if not isinstance(obj, list):
        _fail(where, f"expected a list, got {type(obj).__name__}")
    if dim is not None and len(obj) != dim:
        _fail(where, f"has {len(obj)} entries, expected {dim}")
    return tuple(parse_scalar(v, f"{where}[{i}]") for i, v in enumerate(obj))


def parse_matrix_json(obj: object, where: str, rows: int,
                      cols: int) -> Tuple[Tuple[Scalar, ...], ...]:
    if not isinstance(obj, list):
        _fail(where, f"expected a list of rows, got {type(obj).__name__}")
    if len(obj) != rows:
        _fail(where, f"has {len(obj)} rows, expected {rows}")
    return tuple(parse_vector_json(r, f"{where}[{i}]", cols)
                 for i, r in enumerate(obj))


def vector_to_json(v: Sequence[Scalar]) -> list:
    return [scalar_to_json(x) for x in v]


def matrix_to_json(m: Sequence[Sequence[Scalar]]) -> list:
    return [vector_to_json(r) for r in m]


# --- set expressions --------------------------------------------------------


def setexpr_from_json(obj: object, where: str, dim: Optional[int] = None) -> SetExpr:
    if not isinstance(obj, dict):
        _fail(where, f"expected an object with an \"op\" field, "
                     f"got {type(obj).__name__}")
    op = obj.get("op")
    if op == "empty":
        return Empty()
    if op == "halfspace":
        for key in ("a", "b"):
            if key not in obj:
                _fail(where, f"halfspace needs field {key!r}")
        a = parse_vector_json(obj["a"], f"{where}.a", dim)
        b = parse_vector_json(obj["b"], f"{where}.b", len(a))
        c = parse_scalar(obj["c"], f"{where}.c") if "c" in obj else EPS
        d = parse_scalar(obj["d"], f"{where}.d") if "d" in obj else EPS
        return Halfspace(AffineHalfSpace(a, b, c, d))
    if op == "complement":
        if "arg" not in obj:
            _fail(where, "complement needs field 'arg'")
        return Complement(setexpr_from_json(obj["arg"], f"{where}.arg", dim))
    if op in ("union", "intersection"):
        args = obj.get("args")
        if not isinstance(args, list):
            _fail(where, f"{op} needs a list field 'args'")
        parsed = tuple(setexpr_from_json(x, f"{where}.args[{i}]", dim)
                       for i, x in enumerate(args))
        return Union(parsed) if op == "union" else Intersection(parsed)
    _fail(where, f"unknown set-expression operator {op!r}")


def setexpr_to_json(s: SetExpr) -> dict:
    if isinstance(s, Empty):
        return {"op": "empty"}
    if isinstance(s, Halfspace):
        h = s.hs
        out = {"op": "halfspace", "a": vector_to_json(h.a),
               "b": vector_to_json(h.b)}
        if h.c is not EPS:
            out["c"] = scalar_to_json(h.c)
        if h.d is not EPS:
            out["d"] = scalar_to_json(h.d)
        return out
    if isinstance(s, Complement):
        return {"op": "complement", "arg": setexpr_to_json(s.arg)}
    if isinstance(s, Union):
        return {"op": "union", "args": [setexpr_to_json(a) for a in s.args]}
    if isinstance(s, Intersection):
        return {"op": "intersection",
                "args": [setexpr_to_json(a) for a in s.args]}
    raise TypeError(f"not a set expression: {type(s).__name__}")


# --- problem files ----------------------------------------------------------


MODES = ("one-shot", "iterated")


@dataclass(frozen=True)
class ProblemFile:
    """A reachability problem or, without a system block, a bare target set.

    ``dim`` is the ambient dimension of the target; with a system present
    it always equals the state count.  ``conic`` switches the bare-target
    mode to homogeneous semantics (no affine constants allowed).
    """

    target: SetExpr
    system: Optional[MplSystem] = None
    dim: Optional[int] = None
    conic: bool = False
    steps: int = 1
    mode: str = "one-shot"

    def require_system(self) -> MplSystem:
        if self.system is None:
            raise FormatError(
                "this command needs a full system block (n, m, A, B, U)")
        return self.system

    def ambient_dim(self) -> int:
        if self.system is not None:
            return self.system.n
        if self.dim is None:
            raise FormatError("problem gives no ambient dimension")
        return self.dim


def problem_from_json(obj: object) -> ProblemFile:
    if not isinstance(obj, dict):
        raise FormatError(
            f"top level must be an object, got {type(obj).__name__}")
    if "target" not in obj:
        _fail("problem", "missing required field 'target'")

    system = None
    sys_keys = [k for k in ("n", "m", "A", "B", "U") if k in obj]
    if sys_keys:
        missing = [k for k in ("n", "m", "A", "B", "U") if k not in obj]
        if missing:
            _fail("problem", f"system block incomplete: has {sys_keys}, "
                             f"missing {missing}")
        n, m = obj["n"], obj["m"]
        for name, v in (("n", n), ("m", m)):
            if not isinstance(v, int) or isinstance(v, bool) or v < 1:
                _fail(name, "must be a positive integer")
        a = parse_matrix_json(obj["A"], "A", n, n)
        b = parse_matrix_json(obj["B"], "B", n, m)
        u = setexpr_from_json(obj["U"], "U", m)
        try:
            system = MplSystem(n, m, a, b, u)
        except ValueError as exc:
            raise FormatError(str(exc)) from exc

    dim = obj.get("dim")
    if dim is not None and (not isinstance(dim, int) or isinstance(dim, bool)
                            or dim < 1):
        _fail("dim", "must be a positive integer")
    if system is not None and dim is not None and dim != system.n:
        _fail("dim", f"is {dim} but the system has {system.n} states")

    conic = obj.get("conic", False)
    if not isinstance(conic, bool):
        _fail("conic", "must be a boolean")
    if conic and system is not None:
        _fail("conic", "conic mode applies only to bare targets")

    options = obj.get("options", {})
    if not isinstance(options, dict):
        _fail("options", "must be an object")
    steps = options.get("steps", 1)
    if not isinstance(steps, int) or isinstance(steps, bool) or steps < 1:
        _fail("options.steps", "must be a positive integer")
    mode = options.get("mode", "one-shot")
    if mode not in MODES:
        _fail("options.mode", f"must be one of {MODES}, got {mode!r}")

    target_dim = system.n if system is not None else dim
    target = setexpr_from_json(obj["target"], "target", target_dim)
    return ProblemFile(target, system, dim if system is None else system.n,
                       conic, steps, mode)


def problem_to_json(p: ProblemFile) -> dict:
    out: dict = {}
    if p.system is not None:
        out["n"] = p.system.n
        out["m"] = p.system.m
        out["A"] = matrix_to_json(p.system.A)
        out["B"] = matrix_to_json(p.system.B)
        out["U"] = setexpr_to_json(p.system.U)
    else:
        if p.dim is not None:
            out["dim"] = p.dim
        if p.conic:
            out["conic"] = True
    out["target"] = setexpr_to_json(p.target)
    if p.steps != 1 or p.mode != "one-shot":
        out["options"] = {"steps": p.steps, "mode": p.mode}
    return out


def parse_problem(path: str) -> ProblemFile:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise FormatError(
            f"{path}: malformed JSON at line {exc.lineno} "
            f"column {exc.colno}: {exc.msg}") from exc
    return problem_from_json(obj)


# --- result files -----------------------------------------------------------


@dataclass(frozen=True)
class ResultFile:
    """Computed union of polyhedra plus provenance statistics.

    Affine polyhedra are stored dehomogenized: generators whose leading
    coordinate is finite become vertices (the leading coordinate is 0
    after normalization, so the tail is the point itself), the others
    become rays.  Conic results keep plain generator lists.
    """

    dim: int
    conic: bool
    exact: bool
    polyhedra: tuple
    stats: tuple


def result_from_union(u: UnionOfPolyhedra,
                      stats: Sequence[StepStats] = ()) -> ResultFile:
    polys = []
    for cone in u.cones:
        if u.conic:
            polys.append({"generators": tuple(cone.generators)})
        else:
            vertices = tuple(g[1:] for g in cone.generators if g[0] is not EPS)
            rays = tuple(g[1:] for g in cone.generators if g[0] is EPS)
            polys.append({"vertices": vertices, "rays": rays})
    return ResultFile(u.dim, u.conic, u.exact, tuple(polys), tuple(stats))


def result_to_json(r: ResultFile) -> dict:
    polys = []
    for p in r.polyhedra:
        if r.conic:
            polys.append({"generators": [vector_to_json(g)
                                         for g in p["generators"]]})
        else:
            polys.append({
                "vertices": [vector_to_json(g) for g in p["vertices"]],
                "rays": [vector_to_json(g) for g in p["rays"]],
            })
    return {
        "dim": r.dim,
        "conic": r.conic,
        "exact": r.exact,
        "polyhedra": polys,
        "stats": [{"step": s.step, "terms": s.terms,
                   "generators": s.generators} for s in r.stats],
    }


def result_from_json(obj: object) -> ResultFile:
    if not isinstance(obj, dict):
        raise FormatError(
            f"result must be an object, got {type(obj).__name__}")
    for key in ("dim", "conic", "exact", "polyhedra", "stats"):
        if key not in obj:
            _fail("result", f"missing field {key!r}")
    dim, conic, exact = obj["dim"], obj["conic"], obj["exact"]
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 0:
        _fail("dim", "must be a non-negative integer")
    if not isinstance(conic, bool) or not isinstance(exact, bool):
        _fail("result", "'conic' and 'exact' must be booleans")
    if not isinstance(obj["polyhedra"], list):
        _fail("polyhedra", "must be a list")
    polys = []
    for i, p in enumerate(obj["polyhedra"]):
        where = f"polyhedra[{i}]"
        if not isinstance(p, dict):
            _fail(where, "must be an object")
        if conic:
            if "generators" not in p:
                _fail(where, "conic polyhedron needs 'generators'")
            gens = p["generators"]
            if not isinstance(gens, list):
                _fail(f"{where}.generators", "must be a list")
            polys.append({"generators": tuple(
                parse_vector_json(g, f"{where}.generators[{k}]", dim)
                for k, g in enumerate(gens))})
        else:
            for key in ("vertices", "rays"):
                if not isinstance(p.get(key), list):
                    _fail(f"{where}.{key}", "must be a list")
            polys.append({
                "vertices": tuple(
                    parse_vector_json(g, f"{where}.vertices[{k}]", dim)
                    for k, g in enumerate(p["vertices"])),
                "rays": tuple(
                    parse_vector_json(g, f"{where}.rays[{k}]", dim)
                    for k, g in enumerate(p["rays"])),
            })
    if not isinstance(obj["stats"], list):
        _fail("stats", "must be a list")
    stats = []
    for i, s in enumerate(obj["stats"]):
        where = f"stats[{i}]"
        if not isinstance(s, dict):
            _fail(where, "must be an object")
        vals = []
        for key in ("step", "terms", "generators"):
            v = s.get(key)
            if not isinstance(v, int) or isinstance(v, bool) or v < 0:
                _fail(f"{where}.{key}", "must be a non-negative integer")
            vals.append(v)
        stats.append(StepStats(*vals))
    return ResultFile(dim, conic, exact, tuple(polys), tuple(stats))


def dumps_canonical(obj: object) -> str:
    """The one serializer everything user-visible goes through."""
    return json.dumps(obj, indent=2) + "\n"
