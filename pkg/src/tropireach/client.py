"""Two interchangeable clients for the command surface.

LocalClient calls the service functions in-process; HttpClient talks to a
running server with the same payload shapes.  Both expose dict-in /
dict-out methods so the command line does not care which transport it
got.  HTTP error statuses are mapped back onto the same exceptions the
local path raises, keeping exit-code handling in one place.
"""

from __future__ import annotations

from typing import Optional, Sequence

import httpx

from .formats import FormatError, problem_from_json, result_to_json
from .oracle import OracleCapExceeded
from .scalars import as_scalar
from .service import run_approx, run_compare, run_member, run_reach, run_sample


class LocalClient:
    """In-process execution, no server involved."""

    def approx(self, problem: dict) -> dict:
        return result_to_json(run_approx(problem_from_json(problem)))

    def reach(self, problem: dict, steps: Optional[int] = None,
              mode: Optional[str] = None) -> dict:
        return result_to_json(
            run_reach(problem_from_json(problem), steps, mode))

    def member(self, problem: dict, point: Sequence,
               extract_control: bool = False) -> dict:
        parsed = tuple(as_scalar(v) for v in point)
        return run_member(problem_from_json(problem), parsed, extract_control)

    def sample(self, problem: dict, lo, hi, res: int,
               include_oracle: bool = False) -> str:
        return run_sample(problem_from_json(problem), lo, hi, res,
                          include_oracle)

    def compare_oracle(self, problem: dict, samples: int = 1000,
                       seed: int = 0) -> dict:
        return run_compare(problem_from_json(problem), samples, seed)


class HttpClient:
    """Same methods, over HTTP."""

    def __init__(self, base_url: str, client: Optional[httpx.Client] = None):
        self._http = client or httpx.Client(base_url=base_url, timeout=600.0)

    def _post(self, path: str, payload: dict) -> dict:
        resp = self._http.post(path, json=payload)
        if resp.status_code == 409:
            raise OracleCapExceeded(_detail(resp))
        if resp.status_code == 422:
            raise FormatError(_detail(resp))
        if resp.status_code >= 400:
            raise RuntimeError(
                f"server returned {resp.status_code}: {resp.text}")
        return resp.json()

    def approx(self, problem: dict) -> dict:
        return self._post("/approx", {"problem": problem})["result"]

    def reach(self, problem: dict, steps: Optional[int] = None,
              mode: Optional[str] = None) -> dict:
        payload: dict = {"problem": problem}
        if steps is not None:
            payload["steps"] = steps
        if mode is not None:
            payload["mode"] = mode
        return self._post("/reach", payload)["result"]

    def member(self, problem: dict, point: Sequence,
               extract_control: bool = False) -> dict:
        out = self._post("/member", {
            "problem": problem, "point": list(point),
            "extract_control": extract_control,
        })
        if not extract_control:
            out.pop("control", None)
            out.pop("guaranteed", None)
        return out

    def sample(self, problem: dict, lo, hi, res: int,
               include_oracle: bool = False) -> str:
        return self._post("/sample", {
            "problem": problem, "lo": lo, "hi": hi, "res": res,
            "include_oracle": include_oracle,
        })["csv"]

    def compare_oracle(self, problem: dict, samples: int = 1000,
                       seed: int = 0) -> dict:
        return self._post("/compare-oracle", {
            "problem": problem, "samples": samples, "seed": seed,
        })["report"]


def _detail(resp: httpx.Response) -> str:
    try:
        return str(resp.json().get("detail", resp.text))
    except ValueError:
        return resp.text
