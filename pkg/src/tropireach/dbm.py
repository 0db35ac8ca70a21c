"""Difference-bound matrices over exact rationals with strictness.

A bound is a pair (magnitude, strict) read as ``x_i < m + x_j`` when strict
and ``x_i <= m + x_j`` otherwise; magnitudes live in Q u {-inf, +inf}.  The
bound semiring orders pairs by tightness (smaller magnitude tighter, strict
beats non-strict at equal magnitude), its sum picks the tighter bound with
neutral (+inf, <=), and its product adds magnitudes with the +inf-dominant
convention and strictness composing to strict unless both sides are closed.

The one deliberate departure from the textbook product: a magnitude of
+-inf forces the result non-strict.  Chaining ``x <= -inf + y`` with a
strict bound only ever yields ``x <= -inf + z`` (both sides are -inf), so a
strict -inf bound would claim more than the premises allow.  This also
keeps the forbidden (-inf, <) pair out of every computed matrix.

Matrix entry [i][j] constrains x_i against m_ij + x_j; regions live in the
full space where coordinates may be -inf, with inf + (-inf) = inf so that
a +inf magnitude never constrains anything.

One consequence of evaluating literally at -inf coordinates: a strict
finite bound x_i < m + x_j is unsatisfiable when x_j = -inf (nothing is
< -inf), so it forces x_j to be finite.  In particular x_i < 1 + x_i says
exactly "x_i is finite".  The tightness order on bounds compares regions
correctly over real coordinates only; emptiness and support computations
below account for the -inf corner cases separately.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product
from typing import NamedTuple, Optional, Sequence

from .scalars import EPS, INF, ExtScalar, Scalar


class Bound(NamedTuple):
    mag: ExtScalar
    strict: bool

    def __repr__(self) -> str:
        return f"({self.mag!r},{'<' if self.strict else '<='})"


def bound(mag: ExtScalar, strict: bool = False) -> Bound:
    """Normalizing constructor: infinite magnitudes are always non-strict."""
    if mag is EPS or mag is INF:
        return Bound(mag, False)
    return Bound(mag, bool(strict))


TOP = Bound(INF, False)       # no constraint; neutral for bound_min
BOUND_ZERO = Bound(0, False)  # neutral for bound_add


def bound_min(a: Bound, b: Bound) -> Bound:
    """The tighter of two bounds."""
    if a.mag < b.mag:
        return a
    if b.mag < a.mag:
        return b
    return a if a.strict else b


def bound_add(a: Bound, b: Bound) -> Bound:
    """Compose bounds along a path (inf dominates -inf)."""
    if a.mag is INF or b.mag is INF:
        return TOP
    if a.mag is EPS or b.mag is EPS:
        return Bound(EPS, False)
    return Bound(a.mag + b.mag, a.strict or b.strict)


def bound_leq_tight(a: Bound, b: Bound) -> bool:
    """True when a is at least as tight as b (a implies b)."""
    if a.mag < b.mag:
        return True
    if b.mag < a.mag:
        return False
    return a.strict or not b.strict


def _holds(lhs: Scalar, b: Bound, rhs: Scalar) -> bool:
    """Evaluate lhs (< or <=) b.mag + rhs over Q u {-inf}."""
    if b.mag is INF:
        return True  # inf + anything = inf, including rhs = -inf
    if b.mag is EPS or rhs is EPS:
        total: ExtScalar = EPS
    else:
        total = b.mag + rhs
    return lhs < total if b.strict else lhs <= total


@dataclass(frozen=True)
class Dbm:
    """An n x n matrix of bounds; region {x : x_i ~_ij m_ij + x_j}."""

    rows: tuple  # tuple[tuple[Bound, ...], ...]

    @property
    def dim(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij) -> Bound:
        i, j = ij
        return self.rows[i][j]


def dbm_from_rows(rows: Sequence[Sequence[Bound]]) -> Dbm:
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ValueError("DBM must be square")
    return Dbm(tuple(tuple(bound(b.mag, b.strict) for b in r) for r in rows))


def dbm_top(n: int) -> Dbm:
    """The unconstrained DBM (whole space)."""
    row = (TOP,) * n
    return Dbm((row,) * n)


def _diag_class(b: Bound) -> str:
    """What a self-loop bound says about its coordinate.

    x <= m + x is vacuous for m >= 0 and pins x to -inf for m < 0;
    x < m + x holds for no x at m <= 0 and says "x is finite" at m > 0.
    """
    if b.mag is INF:
        return "all"
    if b.mag is EPS:
        return "eps"
    if b.strict:
        return "finite" if b.mag > 0 else "empty"
    return "all" if b.mag >= 0 else "eps"


def diag_conjunction(a: Bound, b: Bound) -> Bound:
    """A single self-loop bound equivalent to requiring both."""
    ca, cb = _diag_class(a), _diag_class(b)
    if ca == "empty":
        return a
    if cb == "empty":
        return b
    if ca == "all":
        return b
    if cb == "all":
        return a
    if ca == cb:
        return bound_min(a, b)
    return Bound(0, True)  # finite meets -inf: no value works


def dbm_from_entries(dim: int, entries) -> Dbm:
    """Exact conjunction of a stream of (i, j, bound) constraints.

    Cell-wise bound_min alone is wrong at -inf patterns: it would drop a
    strict bound's finiteness demand whenever a closed bound with smaller
    magnitude wins the cell, and self-loop bounds do not compose by
    magnitude at all.  Finiteness demands surface as strict self-loops on
    the affected column's coordinate.
    """
    rows = [[TOP] * dim for _ in range(dim)]
    need_finite = set()
    for i, j, b in entries:
        if b.mag is INF:
            continue
        if i == j:
            rows[i][j] = diag_conjunction(rows[i][j], b)
            continue
        if b.strict and b.mag is not EPS:
            need_finite.add((i, j))
        rows[i][j] = bound_min(rows[i][j], b)
    for i, j in need_finite:
        w = rows[i][j]
        if not (w.strict and w.mag is not EPS):
            rows[j][j] = diag_conjunction(rows[j][j], Bound(1, True))
    return Dbm(tuple(tuple(r) for r in rows))


def dbm_intersect(a: Dbm, b: Dbm) -> Dbm:
    """Exact region intersection, cell by cell."""
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    n = a.dim
    return dbm_from_entries(n, (
        (i, j, m.rows[i][j])
        for m in (a, b) for i in range(n) for j in range(n)
    ))


def dbm_member(m: Dbm, x: Sequence[Scalar]) -> bool:
    """Literal evaluation of every pairwise constraint at x."""
    if len(x) != m.dim:
        raise ValueError(f"point has {len(x)} coords, DBM has {m.dim}")
    for i, row in enumerate(m.rows):
        xi = x[i]
        for j, b in enumerate(row):
            if b.mag is INF:
                continue
            if not _holds(xi, b, x[j]):
                return False
    return True


def kleene_star(m: Dbm) -> Dbm:
    """Canonical form: all-pairs tightest derived bounds.

    Floyd-Warshall over the bound semiring, seeded with the reflexive
    (0,<=) diagonal.  Nodes on strictly negative cycles admit arbitrarily
    tight bounds, so after the relaxation pass every pair connected through
    such a node saturates to -inf; entries not touching a negative cycle
    are already shortest simple paths and stay put.

    The result keeps the region exactly over real-valued points, and
    exactly everywhere when every bound is closed.  Strict bounds can only
    lose information at -inf coordinates (the diagonal seed and the -inf
    saturation both discard "right side must be finite" facts), and losing
    a constraint only grows the region: the star's region always contains
    the original one.
    """
    n = m.dim
    s = [[bound_min(m.rows[i][j], BOUND_ZERO) if i == j else m.rows[i][j]
          for j in range(n)] for i in range(n)]
    _relax_pass(s)
    negative = [k for k in range(n) if s[k][k].mag < 0]
    if negative:
        neg_bound = Bound(EPS, False)
        for k in negative:
            reach_from = [i for i in range(n) if s[i][k].mag is not INF]
            reach_to = [j for j in range(n) if s[k][j].mag is not INF]
            for i in reach_from:
                si = s[i]
                for j in reach_to:
                    si[j] = neg_bound
    # the first pass settles every magnitude (negative cycles excepted, and
    # those just saturated), but equal-magnitude strictness upgrades can be
    # discovered late and need re-propagation; magnitudes only shrink and
    # strictness only flips one way, so this terminates
    while _relax_pass(s):
        pass
    # a -inf bound pins its whole coordinate, not a path: x_i <= -inf + x_j
    # says x_i = -inf outright, which no transitive composition can carry
    # onto the diagonal or across rows.  Pin every such row completely, and
    # any finite bound into a pinned coordinate pins its own row too.
    forced = set()
    queue = []
    for i in range(n):
        if s[i][i].mag < 0 or any(b.mag is EPS for b in s[i]):
            forced.add(i)
            queue.append(i)
    while queue:
        j = queue.pop()
        for i in range(n):
            if i not in forced and s[i][j].mag is not INF:
                forced.add(i)
                queue.append(i)
    if forced:
        eps_row = (Bound(EPS, False),) * n
        for i in forced:
            s[i] = eps_row
    return Dbm(tuple(tuple(r) for r in s))


def _relax_pass(s) -> bool:
    n = len(s)
    changed = False
    for k in range(n):
        sk = s[k]
        for i in range(n):
            sik = s[i][k]
            if sik.mag is INF:
                continue
            si = s[i]
            for j in range(n):
                cand = bound_add(sik, sk[j])
                cur = si[j]
                if cand.mag < cur.mag or (cand.mag == cur.mag and cand.strict and not cur.strict):
                    si[j] = cand
                    changed = True
    return changed


def _support_candidate_ok(m: Dbm, keep: frozenset) -> bool:
    """Support-pattern side conditions, read off the raw entries.

    At a point whose support is exactly ``keep``: a -inf bound forces its
    left coordinate out, a strict finite bound needs its right coordinate
    in, and a closed finite bound drags the left coordinate out with the
    right one.
    """
    for i, row in enumerate(m.rows):
        for j, b in enumerate(row):
            if b.mag is INF:
                continue
            if b.mag is EPS:
                if i in keep:
                    return False
            elif b.strict:
                if j not in keep:
                    return False
            elif j not in keep and i in keep:
                return False
    return True


def dbm_max_support(m: Dbm, star: Optional[Dbm] = None) -> Optional[frozenset]:
    """The largest support any point of the region can have, or None if empty.

    Regions are closed under entry-wise max, so feasible supports are
    closed under union and have a unique maximum.  When every bound is
    closed the canonical form already pins each coordinate forced to -inf
    (its row goes all -inf), so the answer can be read off the diagonal.
    Strict bounds force coordinates finite as well as -inf, which the
    canonical form does not keep, so in their presence supports are
    enumerated largest-first and each surviving pattern is checked for a
    real-valued solution on its finite part; exponential in dimension,
    fine at the small sizes strict matrices occur in.
    Pass ``star`` when the canonical form is already at hand (closed path
    only; it is ignored otherwise).
    """
    n = m.dim
    if any(b.strict for row in m.rows for b in row):
        for size in range(n, -1, -1):
            for keep in combinations(range(n), size):
                keep_set = frozenset(keep)
                if not _support_candidate_ok(m, keep_set):
                    continue
                if size == 0:
                    return keep_set
                sub = Dbm(tuple(tuple(m.rows[i][j] for j in keep) for i in keep))
                if dbm_diag_consistent(sub):
                    return keep_set
        return None
    s = star if star is not None else kleene_star(m)
    return frozenset(i for i in range(n) if s.rows[i][i].mag is not EPS)


def dbm_is_empty(m: Dbm) -> bool:
    """Exact emptiness over the full space (coordinates may be -inf)."""
    return dbm_max_support(m) is None


def dbm_diag_consistent(m: Dbm) -> bool:
    """The canonical-form diagonal test: every star diagonal entry is (0,<=).

    Decides whether a point of full support (all coordinates finite)
    exists: the canonical form pins every coordinate forced to -inf, so a
    forced coordinate shows up as a -inf diagonal entry, and a strict zero
    cycle as a (0,<) one.
    """
    s = kleene_star(m)
    return all(s.rows[i][i] == BOUND_ZERO for i in range(m.dim))


def dbm_project(m: Dbm, k: int) -> Dbm:
    """Drop coordinates k.. : the top-left k x k block of the canonical form.

    Exact everywhere for closed matrices, and exact on real-valued points
    for matrices without -inf magnitudes; kept coordinates forced to -inf
    arrive in the block through the canonical form's pinned rows, and a
    region emptied by its strict bounds yields an empty block (except at
    k = 0, where no empty representation exists).  Once strict bounds and
    -inf magnitudes mix, compositions erase the strict bounds' finiteness
    demands and the block can keep points that have no witness; it never
    loses a true one (the star's region only ever grows).
    """
    if not 0 <= k <= m.dim:
        raise ValueError(f"cannot project {m.dim}-dim DBM to {k}")
    if k > 0 and any(b.strict for row in m.rows for b in row) and dbm_is_empty(m):
        rows = [[TOP] * k for _ in range(k)]
        for i in range(k):
            rows[i][i] = Bound(0, True)
        return Dbm(tuple(tuple(r) for r in rows))
    s = kleene_star(m)
    return Dbm(tuple(row[:k] for row in s.rows[:k]))


def dbm_project_exact(m: Dbm, k: int) -> list:
    """Exact projection onto the first k coordinates, as a union of DBMs.

    The single-block formula of dbm_project can overshoot once strict
    bounds meet -inf coordinates: a strict finite bound x_i < c + x_j
    forces x_j finite outright, and path composition does not carry that
    demand onto surviving coordinates.  Here every support pattern of the
    source is handled separately: coordinates off the pattern are pinned
    to -inf, the rest form a real-valued zone whose star/block projection
    is classical and exact, and each output piece re-asserts its pattern
    with -inf pins and strict positive self-loops.  Exponential in the
    dimension; meant for oracle-scale inputs, not the main path.
    """
    n = m.dim
    if not 0 <= k <= n:
        raise ValueError(f"cannot project {n}-dim DBM to {k}")
    pieces = []
    seen = set()
    for mask in product((False, True), repeat=n):
        sigma = [i for i in range(n) if mask[i]]
        pos = {c: t for t, c in enumerate(sigma)}
        entries = []
        ok = True
        for i in range(n):
            if not ok:
                break
            for j in range(n):
                b = m.rows[i][j]
                if b.mag is INF:
                    continue
                if b.mag is EPS:
                    if b.strict or mask[i]:
                        ok = False
                        break
                    continue
                if mask[i]:
                    if not mask[j]:
                        ok = False
                        break
                    entries.append((pos[i], pos[j], b))
                elif not mask[j] and b.strict:
                    ok = False
                    break
        if not ok:
            continue
        sub = dbm_from_entries(len(sigma), entries)
        if sub.dim and not dbm_diag_consistent(sub):
            continue
        star = kleene_star(sub)
        rows = [[TOP] * k for _ in range(k)]
        for i in range(k):
            if mask[i]:
                rows[i][i] = Bound(1, True)
            else:
                rows[i][i] = Bound(EPS, False)
        for c in sigma:
            if c >= k:
                break
            for d in sigma:
                if d >= k:
                    break
                if c != d:
                    rows[c][d] = star.rows[pos[c]][pos[d]]
        piece = Dbm(tuple(tuple(r) for r in rows))
        if piece.rows not in seen:
            seen.add(piece.rows)
            pieces.append(piece)
    return pieces


def dbm_close(m: Dbm) -> Dbm:
    """Replace every strict bound by its closed version."""
    return Dbm(tuple(
        tuple(Bound(b.mag, False) for b in row) for row in m.rows
    ))


def dbm_force_eps(m: Dbm, coords: Sequence[int]) -> Dbm:
    """Pin the given coordinates to -inf (self-loop -inf bounds)."""
    rows = [list(r) for r in m.rows]
    for i in coords:
        rows[i][i] = diag_conjunction(rows[i][i], Bound(EPS, False))
    return Dbm(tuple(tuple(r) for r in rows))


def bound_implies(inner: Bound, outer: Bound) -> bool:
    """Pointwise implication over the full space, -inf coordinates included.

    Tightness (bound_leq_tight) is necessary but not sufficient here: a
    strict outer bound excludes points where its right coordinate is -inf,
    which no closed inner bound does, however tight.  An outer -inf bound
    pins the left coordinate, which only another -inf bound guarantees.
    """
    if outer.mag is INF:
        return True
    if outer.mag is EPS:
        return inner.mag is EPS
    if outer.strict:
        return inner.strict and inner.mag <= outer.mag
    return inner.mag is not INF and inner.mag <= outer.mag


def dbm_entry_subset(inner: Dbm, outer: Dbm) -> bool:
    """Sufficient containment test: every inner entry implies the outer one.

    Meant for canonical inner matrices; used to absorb redundant union
    members, never to prove non-containment.
    """
    return all(
        bound_implies(bi, bo)
        for ri, ro in zip(inner.rows, outer.rows)
        for bi, bo in zip(ri, ro)
    )


# --- affine view -----------------------------------------------------------
#
# An affine DBM over n variables is an (n+1)-dimensional DBM whose
# coordinate 0 is pinned to the value 0; bounds against coordinate 0 encode
# absolute (affine) bounds on the variables.

def affine_member(m: Dbm, x: Sequence[Scalar]) -> bool:
    return dbm_member(m, (0, *x))


def affine_is_empty(m: Dbm) -> bool:
    """No point of the affine section (coordinate 0 finite) exists."""
    j = dbm_max_support(m)
    return j is None or 0 not in j
