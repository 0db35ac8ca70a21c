"""Brute-force grid search over DBM regions, used as an independent oracle.

Everything here works on integer-scaled coordinates (scale 4 by default)
so the inner loops stay in plain int arithmetic; None stands for -inf.
Constraint systems are translation invariant within each connected
component of their finite-bound graph, so one coordinate per component is
anchored at 0 and the rest range over a window wide enough to cover every
shortest-path offset, which makes the search complete, not just sound:
scale > longest simple cycle length covers strict-bound slack.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from typing import Iterator, List, Optional, Sequence, Tuple

from tropireach.dbm import Dbm
from tropireach.scalars import EPS, INF, as_scalar

Con = Tuple[int, int, Optional[int], bool]  # (i, j, scaled mag | None, strict)


def compile_scaled(m: Dbm, scale: int) -> List[Con]:
    cons: List[Con] = []
    for i, row in enumerate(m.rows):
        for j, b in enumerate(row):
            if b.mag is INF:
                continue
            if b.mag is EPS:
                cons.append((i, j, None, b.strict))
                continue
            q = Fraction(b.mag) * scale
            if q.denominator != 1:
                raise ValueError(f"magnitude {b.mag} not on the 1/{scale} grid")
            cons.append((i, j, q.numerator, b.strict))
    return cons


def holds_scaled(cons: Sequence[Con], x: Sequence[Optional[int]]) -> bool:
    for i, j, mag, strict in cons:
        xi = x[i]
        if mag is None:
            if xi is not None:
                return False
            continue
        xj = x[j]
        if xj is None:
            # rhs is -inf: strict can never hold, closed forces x_i there too
            if strict or xi is not None:
                return False
            continue
        if xi is None:
            continue
        t = mag + xj
        if xi > t or (strict and xi == t):
            return False
    return True


def _max_abs_mag(m: Dbm) -> int:
    worst = 1
    for row in m.rows:
        for b in row:
            if b.mag is INF or b.mag is EPS:
                continue
            f = Fraction(b.mag)
            worst = max(worst, abs(f.numerator) // f.denominator + 1)
    return worst


def _components(m: Dbm, keep: Sequence[int]) -> List[List[int]]:
    """Connected components of the finite-bound graph restricted to keep."""
    keep = list(keep)
    parent = {i: i for i in keep}

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    in_keep = set(keep)
    for i in keep:
        for j, b in enumerate(m.rows[i]):
            if j in in_keep and b.mag is not INF and b.mag is not EPS:
                parent[find(i)] = find(j)
    groups: dict = {}
    for i in keep:
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def grid_points(m: Dbm, scale: int = 4) -> Iterator[Tuple[Optional[int], ...]]:
    """All support patterns x anchor-translated candidate points (scaled)."""
    n = m.dim
    w = scale * ((n - 1) * _max_abs_mag(m) + 2)
    span = range(-w, w + 1)
    for mask in range(1 << n):
        keep = [i for i in range(n) if mask >> i & 1]
        comps = _components(m, keep)
        free = [i for c in comps for i in c[1:]]
        base: List[Optional[int]] = [None] * n
        for c in comps:
            base[c[0]] = 0
        if not free:
            yield tuple(base)
            continue
        for vals in product(span, repeat=len(free)):
            pt = list(base)
            for i, v in zip(free, vals):
                pt[i] = v
            yield tuple(pt)


def grid_witness(m: Dbm, scale: int = 4) -> Optional[Tuple[Optional[int], ...]]:
    """Some scaled point of the region, or None when the grid finds nothing."""
    cons = compile_scaled(m, scale)
    for pt in grid_points(m, scale):
        if holds_scaled(cons, pt):
            return pt
    return None


def grid_max_support(m: Dbm, scale: int = 4) -> Optional[frozenset]:
    """Union of supports over every satisfiable pattern; None when empty."""
    cons = compile_scaled(m, scale)
    seen: Optional[set] = None
    n = m.dim
    full = frozenset(range(n))
    for pt in grid_points(m, scale):
        if holds_scaled(cons, pt):
            supp = {i for i in range(n) if pt[i] is not None}
            seen = supp if seen is None else seen | supp
            if seen == full:
                break
    return frozenset(seen) if seen is not None else None


def unscale(pt: Sequence[Optional[int]], scale: int = 4):
    return tuple(EPS if v is None else as_scalar(Fraction(v, scale)) for v in pt)


def exists_completion(
    m: Dbm,
    y: Sequence[Optional[int]],
    scale: int = 4,
    allow_eps_tail: bool = True,
) -> bool:
    """Does some z (scaled, window-complete) make (y, z) a region point?"""
    n = m.dim
    k = len(y)
    cons = compile_scaled(m, scale)
    finite_y = [v for v in y if v is not None]
    pb = scale * ((n - 1) * _max_abs_mag(m) + 2)
    # span 0 as well so free-floating tail components, which can always be
    # translated near the origin, stay inside the window
    lo = min(finite_y, default=0) - pb
    hi = max(finite_y, default=0) + pb
    lo, hi = min(lo, -pb), max(hi, pb)
    tail_vals: List[Optional[int]] = list(range(lo, hi + 1))
    if allow_eps_tail:
        tail_vals.append(None)
    for z in product(tail_vals, repeat=n - k):
        if holds_scaled(cons, tuple(y) + z):
            return True
    return False
