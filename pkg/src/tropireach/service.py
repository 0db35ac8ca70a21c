"""HTTP surface over the reachability pipeline.

Request bodies carry the problem in the same JSON shape as problem files
(a single source of truth for validation and diagnostics); command
parameters ride alongside as typed fields.  The run_* functions hold the
actual command logic and are callable without a server, which is how the
command line uses them.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from typing import Any, List, Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from .approx import approx_set, union_member
from .compare import compare_backward, sample_points
from .formats import (
    FormatError,
    ProblemFile,
    ResultFile,
    problem_from_json,
    result_from_union,
    result_to_json,
)
from .maxplus import Vector
from .oracle import OracleCapExceeded, dbm_union_member, oracle_n_step
from .reach import extract_control, n_step_backward
from .scalars import as_scalar, format_scalar, is_finite, scalar_to_json

SAMPLE_GRID_CAP = 200000


def _reach_mode(mode: str) -> str:
    return "one_shot" if mode == "one-shot" else "iterated"


def run_approx(p: ProblemFile) -> ResultFile:
    """Closure of the bare target set, no dynamics involved."""
    u = approx_set(p.target, p.ambient_dim(), conic=p.conic)
    return result_from_union(u)


def run_reach(p: ProblemFile, steps: Optional[int] = None,
              mode: Optional[str] = None) -> ResultFile:
    sysm = p.require_system()
    mode = mode if mode is not None else p.mode
    if mode not in ("one-shot", "iterated"):
        raise FormatError(f"mode must be 'one-shot' or 'iterated', got {mode!r}")
    res = n_step_backward(sysm, p.target, steps if steps is not None else p.steps,
                          _reach_mode(mode))
    return result_from_union(res.union, res.stats)


def run_member(p: ProblemFile, point: Vector,
               with_control: bool = False) -> dict:
    """Membership in the computed set; optionally a certifying control.

    For a multi-step one-shot problem the control comes back as the whole
    open-loop schedule (all steps, chronological); iterated problems give
    the first step's control.
    """
    dim = p.ambient_dim()
    if len(point) != dim:
        raise FormatError(f"point has {len(point)} coordinates, expected {dim}")
    if p.system is None:
        if with_control:
            raise FormatError("control extraction needs a system problem")
        u = approx_set(p.target, dim, conic=p.conic)
        return {"inside": union_member(u, point), "exact": u.exact}
    res = n_step_backward(p.system, p.target, p.steps, _reach_mode(p.mode))
    inside = union_member(res.union, point)
    out = {"inside": inside, "exact": res.exact}
    if with_control:
        if inside:
            control = extract_control(p.system, res, point)
            out["control"] = [scalar_to_json(v) for v in control.u]
            out["guaranteed"] = control.guaranteed
        else:
            out["control"] = None
            out["guaranteed"] = False
    return out


def _grid_axis(lo, hi, res: int) -> list:
    if res == 1:
        return [lo]
    span = Fraction(hi) - Fraction(lo)
    return [as_scalar(Fraction(lo) + span * k / (res - 1)) for k in range(res)]


def run_sample(p: ProblemFile, lo, hi, res: int,
               include_oracle: bool = False) -> str:
    """CSV over a uniform grid: coordinates, in_set, on_boundary.

    on_boundary marks grid cells straddling the set: the point has an
    axis neighbor (one grid step along a single axis) whose membership
    differs.  With include_oracle an in_oracle column is appended.
    """
    lo, hi = as_scalar(lo), as_scalar(hi)
    if not (is_finite(lo) and is_finite(hi)) or hi < lo:
        raise FormatError("box must be lo,hi with finite lo <= hi")
    if res < 1:
        raise FormatError("resolution must be at least 1")
    dim = p.ambient_dim()
    if res ** dim > SAMPLE_GRID_CAP:
        raise FormatError(
            f"grid of {res}^{dim} points exceeds the cap of {SAMPLE_GRID_CAP}")
    if p.system is not None:
        union = n_step_backward(p.system, p.target, p.steps,
                                _reach_mode(p.mode)).union
    else:
        union = approx_set(p.target, dim, conic=p.conic)
    oracle = None
    if include_oracle:
        sysm = p.require_system()
        oracle = oracle_n_step(sysm, p.target, p.steps)

    axis = _grid_axis(lo, hi, res)
    grid = list(product(axis, repeat=dim))
    inside = [union_member(union, x) for x in grid]
    strides = [res ** (dim - 1 - i) for i in range(dim)]

    def differs(flat: int, axis_i: int) -> bool:
        pos = (flat // strides[axis_i]) % res
        for nb in (flat - strides[axis_i], flat + strides[axis_i]):
            npos = pos + (1 if nb > flat else -1)
            if 0 <= npos < res and inside[nb] != inside[flat]:
                return True
        return False

    header = [f"x{i + 1}" for i in range(dim)] + ["in_set", "on_boundary"]
    if oracle is not None:
        header.append("in_oracle")
    lines = [",".join(header)]
    for flat, x in enumerate(grid):
        boundary = any(differs(flat, i) for i in range(dim))
        row = [format_scalar(v) for v in x]
        row.append("1" if inside[flat] else "0")
        row.append("1" if boundary else "0")
        if oracle is not None:
            row.append("1" if dbm_union_member(oracle, x) else "0")
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def run_compare(p: ProblemFile, samples: int, seed: int) -> dict:
    sysm = p.require_system()
    points = sample_points(sysm.n, samples, seed)
    report = compare_backward(sysm, p.target, points, p.steps,
                              _reach_mode(p.mode))
    return {"samples": samples, "seed": seed, "steps": p.steps,
            "mode": p.mode, **report}


# --- HTTP layer -------------------------------------------------------------


class ApproxRequest(BaseModel):
    problem: dict


class ReachRequest(BaseModel):
    problem: dict
    steps: Optional[int] = Field(default=None, ge=1)
    mode: Optional[str] = None


class MemberRequest(BaseModel):
    problem: dict
    point: List[Any]
    extract_control: bool = False


class SampleRequest(BaseModel):
    problem: dict
    lo: Any
    hi: Any
    res: int = Field(ge=1)
    include_oracle: bool = False


class CompareRequest(BaseModel):
    problem: dict
    samples: int = Field(default=1000, ge=1)
    seed: int = 0


class ResultResponse(BaseModel):
    result: dict


class MemberResponse(BaseModel):
    inside: bool
    exact: bool
    control: Optional[List[Any]] = None
    guaranteed: Optional[bool] = None


class SampleResponse(BaseModel):
    csv: str


class CompareResponse(BaseModel):
    report: dict


app = FastAPI(title="tropireach",
              description="Backward reachability for max-plus linear systems")


def _parse(problem: dict) -> ProblemFile:
    try:
        return problem_from_json(problem)
    except FormatError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc


def _guarded(fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except OracleCapExceeded as exc:
        raise HTTPException(status_code=409, detail=str(exc)) from exc
    except (FormatError, ValueError, TypeError) as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc


@app.get("/health")
def health() -> dict:
    return {"status": "ok"}


@app.post("/approx", response_model=ResultResponse)
def approx_endpoint(req: ApproxRequest) -> ResultResponse:
    r = _guarded(run_approx, _parse(req.problem))
    return ResultResponse(result=result_to_json(r))


@app.post("/reach", response_model=ResultResponse)
def reach_endpoint(req: ReachRequest) -> ResultResponse:
    r = _guarded(run_reach, _parse(req.problem), req.steps, req.mode)
    return ResultResponse(result=result_to_json(r))


@app.post("/member", response_model=MemberResponse)
def member_endpoint(req: MemberRequest) -> MemberResponse:
    p = _parse(req.problem)
    point = _guarded(
        lambda: tuple(as_scalar(v) for v in req.point))
    out = _guarded(run_member, p, point, req.extract_control)
    return MemberResponse(**out)


@app.post("/sample", response_model=SampleResponse)
def sample_endpoint(req: SampleRequest) -> SampleResponse:
    csv = _guarded(run_sample, _parse(req.problem), req.lo, req.hi,
                   req.res, req.include_oracle)
    return SampleResponse(csv=csv)


@app.post("/compare-oracle", response_model=CompareResponse)
def compare_endpoint(req: CompareRequest) -> CompareResponse:
    report = _guarded(run_compare, _parse(req.problem), req.samples, req.seed)
    return CompareResponse(report=report)
