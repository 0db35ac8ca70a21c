"""Backward reachability for max-plus linear control systems.

A system x' = A(x)x (+) B(x)u with admissible controls U and target set E
has the one-step backward reachable set {x : exists u in U with
A(x)x (+) B(x)u in E}.  Substituting the dynamics into each target
constraint lifts everything to one constraint system over (lead, x, u);
its closure is a union of tropical polyhedra whose generator projection
onto (lead, x) is the closure of the reachable set, and the control block
of a membership certificate is a ready-made admissible control.
"""

from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

from .approx import (
    Complement,
    Empty,
    Halfspace,
    Intersection,
    SetExpr,
    Term,
    Union,
    UnionOfPolyhedra,
    approx_term,
    expr_dim,
    span_to_dbms,
    to_dnf,
)
from .cones import AffineHalfSpace, HalfSpace, cone_vform, extremal_filter
from .dbm import Dbm, affine_is_empty
from .scalars import INF
from .maxplus import (
    EPS,
    Matrix,
    Vector,
    eps_vector,
    mat_apply,
    mat_hstack,
    mat_mul,
    mat_power,
    residuation_coeff,
    vec_add,
    vec_scale,
)


@dataclass(frozen=True)
class MplSystem:
    """x' = A(x)x (+) B(x)u with controls constrained to U."""

    n: int
    m: int
    A: Matrix
    B: Matrix
    U: SetExpr

    def __post_init__(self) -> None:
        if len(self.A) != self.n or any(len(r) != self.n for r in self.A):
            raise ValueError(f"A must be {self.n}x{self.n}")
        if len(self.B) != self.n or any(len(r) != self.m for r in self.B):
            raise ValueError(f"B must be {self.n}x{self.m}")
        udim = expr_dim(self.U)
        if udim is not None and udim != self.m:
            raise ValueError(f"U is {udim}-dimensional, controls have {self.m}")

    def step(self, x: Vector, u: Vector) -> Vector:
        return vec_add(mat_apply(self.A, x), mat_apply(self.B, u))


@dataclass(frozen=True)
class LiftedConstraints:
    """Constraint rows over (lead, x, u): k1 (x) y <= l1 (x) y pairwise,
    k2 (x) y < l2 (x) y pairwise."""

    k1: tuple
    l1: tuple
    k2: tuple
    l2: tuple

    def __post_init__(self) -> None:
        if len(self.k1) != len(self.l1) or len(self.k2) != len(self.l2):
            raise ValueError("row counts of paired blocks differ")


class StepStats(NamedTuple):
    step: int
    terms: int
    generators: int


@dataclass(frozen=True)
class ReachResult:
    """Computed backward reachable set plus its certificate data.

    ``lifted`` keeps the pre-projection cones over (lead, x, u); control
    extraction reads certificates out of them.  ``exact`` means no literal
    anywhere was complemented, so the closure added nothing.
    """

    union: UnionOfPolyhedra
    exact: bool
    stats: tuple
    lifted: tuple


def _lift_state_row(row: Vector, a: Matrix, b: Matrix) -> Vector:
    """Row over (lead, z) becomes a row over (lead, x, u) via z = Ax (+) Bu."""
    lead, z = row[0], row[1:]
    za = mat_mul((z,), a)[0]
    zb = mat_mul((z,), b)[0]
    return (lead,) + za + zb


def _lift_control_row(row: Vector, n: int) -> Vector:
    lead, u = row[0], row[1:]
    return (lead,) + (EPS,) * n + u


def build_lift(sys: MplSystem, target_term: Term,
               u_term: Optional[Term] = None) -> LiftedConstraints:
    """Constraint system over (lead, x, u) for one target term and one
    control term.

    Target literals, written over (lead, z), get the dynamics substituted
    into their z-coefficients; control literals are padded with an all-eps
    state block.  When ``u_term`` is omitted, U must normalize to a single
    conjunction.
    """
    if target_term.dim != 1 + sys.n:
        raise ValueError(f"target term over dim {target_term.dim}, expected {1 + sys.n}")
    if u_term is None:
        udnf = to_dnf(sys.U, sys.m)
        if len(udnf.terms) != 1:
            raise ValueError("U does not normalize to a single conjunction; "
                             "pass the control term explicitly")
        u_term = udnf.terms[0]
    if u_term.dim != 1 + sys.m:
        raise ValueError(f"control term over dim {u_term.dim}, expected {1 + sys.m}")
    k1 = [_lift_state_row(h.a, sys.A, sys.B) for h in target_term.closed]
    l1 = [_lift_state_row(h.b, sys.A, sys.B) for h in target_term.closed]
    k2 = [_lift_state_row(h.b, sys.A, sys.B) for h in target_term.complemented]
    l2 = [_lift_state_row(h.a, sys.A, sys.B) for h in target_term.complemented]
    for h in u_term.closed:
        k1.append(_lift_control_row(h.a, sys.n))
        l1.append(_lift_control_row(h.b, sys.n))
    for h in u_term.complemented:
        k2.append(_lift_control_row(h.b, sys.n))
        l2.append(_lift_control_row(h.a, sys.n))
    return LiftedConstraints(tuple(k1), tuple(l1), tuple(k2), tuple(l2))


def lifted_term(lc: LiftedConstraints, dim: int) -> Term:
    """The lift as a conjunction ready for the closure computation."""
    closed = tuple(HalfSpace(a, b) for a, b in zip(lc.k1, lc.l1))
    complemented = tuple(HalfSpace(b, a) for a, b in zip(lc.k2, lc.l2))
    return Term(dim, closed, complemented)


def one_step_backward(sys: MplSystem, target: SetExpr,
                      trace: Optional[list] = None) -> ReachResult:
    """Closure of the one-step backward reachable set of ``target``.

    Every (target term, control term) pair of the two normal forms is
    lifted and closed independently; generators are then truncated to
    their (lead, x) block, which is exactly the projection of the lifted
    polyhedron, and the union is collected.
    """
    tdnf = to_dnf(target, sys.n)
    udnf = to_dnf(sys.U, sys.m)
    wdim = 1 + sys.n + sys.m
    exact = all(not t.complemented for t in tdnf.terms + udnf.terms)
    lifted = []
    cones = []
    seen = set()
    for tt in tdnf.terms:
        for ut in udnf.terms:
            lc = build_lift(sys, tt, ut)
            cone = approx_term(lifted_term(lc, wdim), trace=trace)
            if not cone.generators:
                continue
            lifted.append(cone)
            proj = extremal_filter(
                cone_vform(1 + sys.n, (g[:1 + sys.n] for g in cone.generators)))
            if proj.generators and proj.generators not in seen:
                seen.add(proj.generators)
                cones.append(proj)
    union = UnionOfPolyhedra(sys.n, False, tuple(cones), exact)
    stats = (StepStats(1, len(lifted), sum(c.size for c in cones)),)
    return ReachResult(union, exact, stats, tuple(lifted))


def _embed_expr(s: SetExpr, offset: int, total: int) -> SetExpr:
    """Re-home an expression over D^m into block ``offset`` of D^total."""
    if isinstance(s, Empty):
        return s
    if isinstance(s, Halfspace):
        h = s.hs
        pad_l, pad_r = (EPS,) * offset, (EPS,) * (total - offset - h.dim)
        return Halfspace(AffineHalfSpace(pad_l + tuple(h.a) + pad_r,
                                         pad_l + tuple(h.b) + pad_r, h.c, h.d))
    if isinstance(s, Complement):
        return Complement(_embed_expr(s.arg, offset, total))
    if isinstance(s, Union):
        return Union(tuple(_embed_expr(a, offset, total) for a in s.args))
    if isinstance(s, Intersection):
        return Intersection(tuple(_embed_expr(a, offset, total) for a in s.args))
    raise TypeError(f"not a set expression: {s!r}")


def _bound_side(idx: int, shift, n: int):
    """One side of an affine constraint: coordinate idx of (0, x) plus shift."""
    a = list(eps_vector(n))
    if idx == 0:
        return tuple(a), shift
    a[idx - 1] = shift
    return tuple(a), EPS


def affine_dbm_to_setexpr(m: Dbm) -> SetExpr:
    """The region of an affine DBM as a conjunction of half-space literals.

    Strict bounds come back as complements of the swapped closed bound;
    trivially satisfied cells are skipped, trivially violated ones make
    the whole conjunction Empty.
    """
    n = m.dim - 1
    parts = []
    for i, row in enumerate(m.rows):
        for j, b in enumerate(row):
            if b.mag is INF:
                continue
            if i == 0 and j == 0:
                # a pure-constant cell: 0 on both sides
                if b.mag is EPS or b.mag < 0 or (b.strict and b.mag == 0):
                    return Empty()
                continue
            if b.mag is EPS:
                if b.strict or i == 0:
                    return Empty()
                la, lc = _bound_side(i, 0, n)
                parts.append(Halfspace(AffineHalfSpace(la, eps_vector(n), lc, EPS)))
                continue
            la, lc = _bound_side(i, 0, n)
            ra, rc = _bound_side(j, b.mag, n)
            if b.strict:
                parts.append(Complement(Halfspace(AffineHalfSpace(ra, la, rc, lc))))
            else:
                parts.append(Halfspace(AffineHalfSpace(la, ra, lc, rc)))
    if not parts:
        return Complement(Empty())
    if len(parts) == 1:
        return parts[0]
    return Intersection(tuple(parts))


def union_to_setexpr(u: UnionOfPolyhedra) -> SetExpr:
    """A set expression for an affine union, via span decomposition.

    Each polyhedron's span splits exactly into closed difference-bound
    regions, and each region is a conjunction of half-space literals, so
    feeding a computed union back in as a target stays inside the input
    grammar without any outer-description conversion.
    """
    if u.conic:
        raise ValueError("only affine unions convert to target expressions")
    branches = []
    for cone in u.cones:
        for m in span_to_dbms(cone):
            if affine_is_empty(m):
                continue
            e = affine_dbm_to_setexpr(m)
            if not isinstance(e, Empty):
                branches.append(e)
    if not branches:
        return Empty()
    if len(branches) == 1:
        return branches[0]
    return Union(tuple(branches))


def n_step_backward(sys: MplSystem, target: SetExpr, steps: int,
                    mode: str = "one_shot",
                    trace: Optional[list] = None) -> ReachResult:
    """N-step backward reachable set.

    one_shot: one lift over the N-step unrolled dynamics
    x_N = A^N x (+) [A^(N-1)B | ... | AB | B] (u_1..u_N), controls
    constrained to N independent copies of U.  iterated: N successive
    one-step computations, each feeding its result back as the next
    target; closures compound, so the result contains the one_shot set.
    """
    if steps < 1:
        raise ValueError("steps must be at least 1")
    if mode not in ("one_shot", "iterated"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "one_shot":
        a_n = mat_power(sys.A, steps)
        b_blocks = [mat_mul(mat_power(sys.A, steps - 1 - k), sys.B)
                    for k in range(steps)]
        total = steps * sys.m
        copies = tuple(_embed_expr(sys.U, k * sys.m, total) for k in range(steps))
        stacked = MplSystem(sys.n, total, a_n, mat_hstack(*b_blocks),
                            copies[0] if steps == 1 else Intersection(copies))
        return one_step_backward(stacked, target, trace=trace)
    cur = target
    stats = []
    exact = True
    res = None
    for step in range(1, steps + 1):
        res = one_step_backward(sys, cur, trace=trace)
        exact = exact and res.exact
        s = res.stats[0]
        stats.append(StepStats(step, s.terms, s.generators))
        if step < steps:
            cur = union_to_setexpr(res.union)
    return ReachResult(res.union, exact, tuple(stats), res.lifted)


class ControlResult(NamedTuple):
    u: Vector
    guaranteed: bool


def extract_control(sys: MplSystem, result: ReachResult, x: Vector) -> ControlResult:
    """An admissible control driving x into the target, from a certificate.

    Greatest-coefficient certificates over each lifted cone's (lead, x)
    block are tried in turn; the first one reaching (0, x) has its control
    block evaluated at the same coefficients.  For exact (complement-free)
    results the control is guaranteed; otherwise the target was closed
    first and only membership of the closure is certified, which the flag
    reports.
    """
    if len(x) != sys.n:
        raise ValueError(f"point has {len(x)} coords, states have {sys.n}")
    y = (0,) + tuple(x)
    head = 1 + sys.n
    for cone in result.lifted:
        lams = []
        combo = eps_vector(cone.dim)
        for g in cone.generators:
            state = g[:head]
            if all(c is EPS for c in state):
                continue
            lam = residuation_coeff(y, state)
            if lam is EPS:
                continue
            combo = vec_add(combo, vec_scale(lam, g))
        if combo[:head] == y:
            return ControlResult(combo[head:], result.exact)
    raise ValueError("point is not in the computed backward reachable set")
