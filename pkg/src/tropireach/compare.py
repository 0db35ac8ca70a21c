"""Sampled agreement checks between the polyhedral route and the oracle.

The approximation returns the closure of the true backward reachable set,
so the two can only disagree where the closure added something: points of
some oracle piece's closed boundary that the strict bounds exclude.  Such
points are counted separately as exempt; anything else is a genuine
mismatch.  With several steps the exemption logic stays sound for the
one-shot mode (a single approximation of the stacked system); the
iterated mode re-approximates closures of closures, which legitimately
accumulates slack on targets with complemented literals.
"""

from __future__ import annotations

import random
from typing import Sequence

from .approx import SetExpr, union_member
from .dbm import affine_member, dbm_close
from .maxplus import EPS, Vector
from .oracle import DbmUnion, dbm_union_member, oracle_n_step
from .reach import MplSystem, n_step_backward
from .scalars import scalar_to_json

MISMATCH_LIST_CAP = 20


def sample_points(dim: int, count: int, seed: int,
                  lo: int = -8, hi: int = 8, eps_p: float = 0.2) -> list:
    """Deterministic integer sample cloud with -inf coordinate patterns."""
    rng = random.Random(seed)
    return [
        tuple(EPS if rng.random() < eps_p else rng.randint(lo, hi)
              for _ in range(dim))
        for _ in range(count)
    ]


def on_strict_boundary(u: DbmUnion, x: Vector) -> bool:
    """Whether x sits on the closed hull of a piece its strict bounds reject.

    Exactly the exemption the closure approximation needs: every closed
    bound of the piece holds and at least one strict bound holds with
    equality (an equality between -inf values counts).
    """
    return any(
        not affine_member(p, x) and affine_member(dbm_close(p), x)
        for p in u.pieces
    )


def compare_backward(sys: MplSystem, target: SetExpr, points: Sequence,
                     steps: int = 1, mode: str = "one_shot") -> dict:
    """Classify sample points against both computations.

    Returns a plain report dictionary (JSON-ready): agreement and
    exemption counts, genuine mismatches (capped list of points), and the
    sizes of both computed descriptions.
    """
    approx = n_step_backward(sys, target, steps, mode)
    exact = oracle_n_step(sys, target, steps)
    agree = 0
    exempt = 0
    mismatches = []
    for x in points:
        a = union_member(approx.union, x)
        o = dbm_union_member(exact, x)
        if a == o:
            agree += 1
        elif a and on_strict_boundary(exact, x):
            exempt += 1
        else:
            mismatches.append(x)
    return {
        "points": len(points),
        "agree": agree,
        "exempt_boundary": exempt,
        "mismatches": len(mismatches),
        "mismatch_points": [
            [scalar_to_json(v) for v in x]
            for x in mismatches[:MISMATCH_LIST_CAP]
        ],
        "exact_flag": approx.exact,
        "approx_polyhedra": len(approx.union.cones),
        "oracle_pieces": len(exact.pieces),
    }
