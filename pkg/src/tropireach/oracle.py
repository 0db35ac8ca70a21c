"""Exact backward reachability at small scale, over unions of affine DBMs.

The brute-force route: rewrite the target as a union of affine
difference-bound matrices with strictness preserved, split the combined
dynamics matrix into its piecewise-affine selection regions, pull every
DBM back through every region by substitution, intersect with the control
constraints, and eliminate the control block by exact projection.  Every
stage is exponential, so hard caps keep this a test fixture rather than a
production path.

Affine convention throughout: a DBM over k variables has dimension k + 1
with coordinate 0 pinned to the value 0, so bounds against coordinate 0
are absolute bounds.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Optional, Sequence, Tuple

from .approx import Empty, SetExpr, Term, Union, to_dnf
from .dbm import (
    Bound,
    Dbm,
    affine_is_empty,
    affine_member,
    dbm_from_entries,
    dbm_intersect,
    dbm_project_exact,
    dbm_top,
)
from .maxplus import EPS, Matrix, Scalar, Vector, mat_hstack
from .scalars import INF
from .reach import MplSystem, affine_dbm_to_setexpr

MAX_PIECES = 20000
MAX_STATE_PLUS_CONTROL = 6


class OracleCapExceeded(RuntimeError):
    """A brute-force stage outgrew its size guard."""


@dataclass(frozen=True)
class DbmUnion:
    """Finite union of affine DBMs over ``dim`` variables.

    Construction drops members with no affine point and collapses exact
    duplicates; beyond that members are kept as built, since entry-wise
    tightening is not semantics-preserving once -inf patterns and strict
    bounds mix.
    """

    dim: int
    pieces: Tuple[Dbm, ...]

    def __post_init__(self) -> None:
        kept = []
        seen = set()
        for p in self.pieces:
            if p.dim != self.dim + 1:
                raise ValueError(
                    f"piece has dimension {p.dim}, expected {self.dim + 1}")
            if affine_is_empty(p):
                continue
            if p.rows not in seen:
                seen.add(p.rows)
                kept.append(p)
        object.__setattr__(self, "pieces", tuple(kept))


def dbm_union_member(u: DbmUnion, x: Vector) -> bool:
    if len(x) != u.dim:
        raise ValueError(f"point has {len(x)} coords, union is over {u.dim}")
    return any(affine_member(p, x) for p in u.pieces)


def _halfspace_dbms(a: Vector, b: Vector) -> list:
    """max(a + y) <= max(b + y) as DBMs, split on the attaining right term.

    Some right term must dominate every left term; when the right side has
    no finite coefficient the left terms must all evaluate to -inf, which
    pins their coordinates.
    """
    q = len(a)
    left = [i for i in range(q) if a[i] is not EPS]
    finite_b = [j for j in range(q) if b[j] is not EPS]
    if not left:
        return [dbm_top(q)]
    if not finite_b:
        return [dbm_from_entries(q, [(i, i, Bound(EPS, False)) for i in left])]
    return [
        dbm_from_entries(q, [(i, j, Bound(b[j] - a[i], False)) for i in left])
        for j in finite_b
    ]


def _complement_dbms(a: Vector, b: Vector) -> list:
    """max(a + y) > max(b + y): one strict DBM per candidate left winner.

    The winner's term must be finite and strictly above every right term;
    dbm_from_entries turns the strict bounds into the finiteness demand on
    the winner's coordinate, and the explicit strict self-loop covers the
    case of a right side with no finite coefficient.
    """
    q = len(a)
    finite_b = [j for j in range(q) if b[j] is not EPS]
    out = []
    for i in range(q):
        if a[i] is EPS:
            continue
        entries = [(j, i, Bound(a[i] - b[j], True)) for j in finite_b]
        entries.append((i, i, Bound(1, True)))
        out.append(dbm_from_entries(q, entries))
    return out


def _term_dbms(t: Term, cap: int) -> list:
    pieces = [dbm_top(t.dim)]
    groups = [_halfspace_dbms(h.a, h.b) for h in t.closed]
    groups.extend(_complement_dbms(h.a, h.b) for h in t.complemented)
    for parts in groups:
        nxt = []
        for p in pieces:
            for part in parts:
                c = dbm_intersect(p, part)
                if not affine_is_empty(c):
                    nxt.append(c)
            if len(nxt) > cap:
                raise OracleCapExceeded(f"term expansion passed {cap} DBMs")
        pieces = nxt
        if not pieces:
            break
    return pieces


def setexpr_to_dbm_union(s: SetExpr, dim: Optional[int] = None,
                         cap: int = MAX_PIECES) -> DbmUnion:
    """Exact rewrite of a target expression as a union of affine DBMs.

    Strictness is preserved: complemented literals become strict bounds,
    so boundary points keep their membership status through the rewrite.
    """
    d = to_dnf(s, dim)
    pieces = []
    for t in d.terms:
        pieces.extend(_term_dbms(t, cap))
        if len(pieces) > cap:
            raise OracleCapExceeded(f"target rewrite passed {cap} DBMs")
    return DbmUnion(d.dim, tuple(pieces))


@dataclass(frozen=True)
class PwaRegion:
    """One affine piece of a max-plus matrix map.

    Within ``region`` (an affine DBM over the input space) output row r
    attains its maximum at column ``selection[r]``, so the map acts
    affinely there: output r equals offsets[r] + input[selection[r]].
    Rows without a finite entry select None and output -inf everywhere.
    Regions are closed and may overlap on argmax ties; covering is what
    matters, not disjointness.
    """

    selection: Tuple[Optional[int], ...]
    offsets: Tuple[Scalar, ...]
    region: Dbm


def pwa_partition(f: Matrix, cap: int = MAX_PIECES) -> list:
    """All selection regions of the map y -> f tensor y."""
    rows = [tuple(r) for r in f]
    q = len(rows)
    if q == 0 or any(len(r) != len(rows[0]) for r in rows):
        raise ValueError("matrix must be rectangular and nonempty")
    p = len(rows[0])
    choices = []
    count = 1
    for r in rows:
        finite = [j for j in range(p) if r[j] is not EPS]
        choices.append(finite if finite else [None])
        count *= max(1, len(finite))
        if count > cap:
            raise OracleCapExceeded(f"selection count passed {cap}")
    regions = []
    for sel in product(*choices):
        entries = []
        for r, j in enumerate(sel):
            if j is None:
                continue
            entries.extend(
                (1 + k, 1 + j, Bound(rows[r][j] - rows[r][k], False))
                for k in range(p) if rows[r][k] is not EPS and k != j
            )
        m = dbm_from_entries(1 + p, entries)
        if affine_is_empty(m):
            continue
        offsets = tuple(
            EPS if j is None else rows[r][j] for r, j in enumerate(sel))
        regions.append(PwaRegion(tuple(sel), offsets, m))
    return regions


def _substitute(m: Dbm, selmap: Sequence, newdim: int) -> Optional[Dbm]:
    """Rewrite a DBM's constraints under coordinate substitution.

    selmap[i] = (c, o) reads "old coordinate i equals o + new coordinate
    c", or (None, -inf) for coordinates that are constantly -inf.  Returns
    None when some constraint is unsatisfiable under the substitution.
    """
    entries = []
    for i in range(m.dim):
        ci, oi = selmap[i]
        for j in range(m.dim):
            b = m.rows[i][j]
            if b.mag is INF:
                continue
            cj, oj = selmap[j]
            if ci is None:
                # left side is -inf: closed holds vacuously, strict needs
                # a finite right side
                if not b.strict:
                    continue
                if b.mag is EPS or cj is None:
                    return None
                entries.append((cj, cj, Bound(1, True)))
                continue
            if b.mag is EPS or cj is None:
                # right side is -inf: pin the left coordinate or fail
                if b.strict:
                    return None
                entries.append((ci, ci, Bound(EPS, False)))
                continue
            entries.append((ci, cj, Bound(b.mag + oj - oi, b.strict)))
    return dbm_from_entries(newdim, entries)


def inverse_image(f: Matrix, x: DbmUnion, cap: int = MAX_PIECES) -> DbmUnion:
    """Exact preimage of a DBM union under the map y -> f tensor y."""
    rows = [tuple(r) for r in f]
    q = len(rows)
    if x.dim != q:
        raise ValueError(f"union is over {x.dim} variables, matrix has {q} rows")
    p = len(rows[0]) if q else 0
    out = []
    for reg in pwa_partition(f, cap):
        selmap = [(0, 0)]
        selmap.extend(
            (None, EPS) if reg.selection[r] is None
            else (1 + reg.selection[r], reg.offsets[r])
            for r in range(q)
        )
        for piece in x.pieces:
            sub = _substitute(piece, selmap, 1 + p)
            if sub is None:
                continue
            m = dbm_intersect(sub, reg.region)
            if affine_is_empty(m):
                continue
            out.append(m)
            if len(out) > cap:
                raise OracleCapExceeded(f"preimage passed {cap} DBMs")
    return DbmUnion(p, tuple(out))


def _embed_control_dbm(m: Dbm, n: int) -> Dbm:
    """Re-index an affine control-space DBM into (state, control) space."""
    k = m.dim - 1
    big = 1 + n + k
    rows = [[b for b in row] for row in dbm_top(big).rows]
    idx = [0] + [1 + n + j for j in range(k)]
    for i in range(m.dim):
        for j in range(m.dim):
            rows[idx[i]][idx[j]] = m.rows[i][j]
    return Dbm(tuple(tuple(r) for r in rows))


def oracle_backward(sys: MplSystem, target: SetExpr,
                    cap: int = MAX_PIECES) -> DbmUnion:
    """Exact one-step backward reachable set as a union of affine DBMs."""
    if sys.n + sys.m > MAX_STATE_PLUS_CONTROL:
        raise OracleCapExceeded(
            f"{sys.n} states + {sys.m} controls exceed the oracle cap of "
            f"{MAX_STATE_PLUS_CONTROL}")
    tgt = setexpr_to_dbm_union(target, sys.n, cap)
    pulled = inverse_image(mat_hstack(sys.A, sys.B), tgt, cap)
    controls = setexpr_to_dbm_union(sys.U, sys.m, cap)
    embedded = [_embed_control_dbm(cu, sys.n) for cu in controls.pieces]
    out = []
    for piece in pulled.pieces:
        for e in embedded:
            c = dbm_intersect(piece, e)
            if affine_is_empty(c):
                continue
            for pr in dbm_project_exact(c, 1 + sys.n):
                if not affine_is_empty(pr):
                    out.append(pr)
            if len(out) > cap:
                raise OracleCapExceeded(f"projection passed {cap} DBMs")
    return DbmUnion(sys.n, tuple(out))


def dbm_union_to_setexpr(u: DbmUnion) -> SetExpr:
    """A target expression with exactly the union's semantics."""
    parts = []
    for p in u.pieces:
        e = affine_dbm_to_setexpr(p)
        if not isinstance(e, Empty):
            parts.append(e)
    if not parts:
        return Empty()
    if len(parts) == 1:
        return parts[0]
    return Union(tuple(parts))


def oracle_n_step(sys: MplSystem, target: SetExpr, steps: int,
                  cap: int = MAX_PIECES) -> DbmUnion:
    """Iterate the exact one-step computation, feeding each result back."""
    if steps < 1:
        raise ValueError("steps must be at least 1")
    cur = target
    result = None
    for _ in range(steps):
        result = oracle_backward(sys, cur, cap)
        cur = dbm_union_to_setexpr(result)
    return result
