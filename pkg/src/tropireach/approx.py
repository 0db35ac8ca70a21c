"""Target-set grammar and closure computation.

Target regions are built from affine max-plus half-spaces by complement,
union, and intersection.  After normalization to a union of conjunctions,
each conjunction's topological closure is a single tropical polyhedron,
computed in V-form: the closed literals go through the double description
fold, and every complemented literal peels the cone with the
closure-of-difference generator formula, re-restricting the working
support whenever the peeled cone loses coordinates.

The class of finite unions of tropical polyhedra is closed under all of
this, which is what makes the result representable at all; the price is
that strict boundaries are rounded up to closed ones, so the output is
the exact closure of the requested set, never less, never more.
"""

from dataclasses import dataclass
from itertools import product as _cartesian
from typing import Iterator, Optional, Sequence

from .cones import (
    AffineHalfSpace,
    ConeMForm,
    ConeVForm,
    HalfSpace,
    affine_halfspace_member,
    cone_vform,
    extremal_filter,
    mform_to_vform,
    span_member,
    unit_cone,
)
from .dbm import Bound, dbm_from_entries
from .maxplus import (
    EPS,
    Scalar,
    Vector,
    scalar_product,
    support,
    vec_add,
    vec_scale,
)
from .scalars import is_finite


# ---------------------------------------------------------------------------
# set expressions


class SetExpr:
    """Base marker for target-set syntax trees."""

    __slots__ = ()


@dataclass(frozen=True)
class Empty(SetExpr):
    pass


@dataclass(frozen=True)
class Halfspace(SetExpr):
    hs: AffineHalfSpace


@dataclass(frozen=True)
class Complement(SetExpr):
    arg: SetExpr


@dataclass(frozen=True)
class Union(SetExpr):
    args: tuple

    def __post_init__(self) -> None:
        object.__setattr__(self, "args", tuple(self.args))


@dataclass(frozen=True)
class Intersection(SetExpr):
    args: tuple

    def __post_init__(self) -> None:
        object.__setattr__(self, "args", tuple(self.args))


def eval_setexpr(s: SetExpr, x: Vector) -> bool:
    """Direct membership semantics of the syntax tree at x."""
    if isinstance(s, Empty):
        return False
    if isinstance(s, Halfspace):
        return affine_halfspace_member(s.hs, x)
    if isinstance(s, Complement):
        return not eval_setexpr(s.arg, x)
    if isinstance(s, Union):
        return any(eval_setexpr(a, x) for a in s.args)
    if isinstance(s, Intersection):
        return all(eval_setexpr(a, x) for a in s.args)
    raise TypeError(f"not a set expression: {s!r}")


def expr_halfspaces(s: SetExpr) -> Iterator[AffineHalfSpace]:
    """All half-space leaves, in syntax order."""
    if isinstance(s, Halfspace):
        yield s.hs
    elif isinstance(s, Complement):
        yield from expr_halfspaces(s.arg)
    elif isinstance(s, (Union, Intersection)):
        for a in s.args:
            yield from expr_halfspaces(a)
    elif not isinstance(s, Empty):
        raise TypeError(f"not a set expression: {s!r}")


def expr_dim(s: SetExpr) -> Optional[int]:
    """Common leaf dimension, or None when there is no half-space leaf."""
    dim = None
    for hs in expr_halfspaces(s):
        if dim is None:
            dim = hs.dim
        elif hs.dim != dim:
            raise ValueError(f"half-space dimensions differ: {dim} vs {hs.dim}")
    return dim


# ---------------------------------------------------------------------------
# disjunctive normal form


@dataclass(frozen=True)
class Term:
    """One conjunction: closed literals and strictly-complemented literals.

    Literals live in the working dimension: the ambient one for conic
    problems, ambient + 1 after homogenization for affine ones.
    """

    dim: int
    closed: tuple
    complemented: tuple

    def __post_init__(self) -> None:
        for h in self.closed + self.complemented:
            if h.dim != self.dim:
                raise ValueError(f"literal dim {h.dim} in a {self.dim}-dim term")


@dataclass(frozen=True)
class Dnf:
    dim: int
    conic: bool
    terms: tuple


def term_member(t: Term, y: Vector) -> bool:
    """Membership in working coordinates (already homogenized if affine)."""
    for h in t.closed:
        if scalar_product(h.a, y) > scalar_product(h.b, y):
            return False
    for h in t.complemented:
        if scalar_product(h.a, y) <= scalar_product(h.b, y):
            return False
    return True


def _literal_lists(s: SetExpr, positive: bool) -> list:
    """DNF of s (or of its complement): a list of literal lists.

    Each literal is (AffineHalfSpace, complemented_flag); the outer list is
    a union, each inner list a conjunction.
    """
    if isinstance(s, Empty):
        return [] if positive else [[]]
    if isinstance(s, Halfspace):
        return [[(s.hs, not positive)]]
    if isinstance(s, Complement):
        return _literal_lists(s.arg, not positive)
    if isinstance(s, (Union, Intersection)):
        branch = positive if isinstance(s, Union) else not positive
        parts = [_literal_lists(a, positive) for a in s.args]
        if branch:
            return [t for p in parts for t in p]
        merged = []
        for combo in _cartesian(*parts):
            seen = dict()
            for term in combo:
                for lit in term:
                    seen[lit] = None
            merged.append(list(seen))
        return merged
    raise TypeError(f"not a set expression: {s!r}")


def to_dnf(s: SetExpr, dim: Optional[int] = None, conic: bool = False) -> Dnf:
    """Union-of-conjunctions normal form.

    Complements are pushed to the leaves (an even number of them cancels),
    unions distribute over intersections, Empty annihilates conjunctions
    and vanishes from unions.  ``dim`` is the ambient dimension; it may be
    omitted when the expression has at least one half-space leaf.

    In conic mode the literals must be genuinely linear (no affine
    constants) and are used as-is; otherwise each literal is lifted by one
    homogenizing coordinate.
    """
    leaf_dim = expr_dim(s)
    if dim is None:
        dim = leaf_dim
        if dim is None:
            raise ValueError("ambient dimension needed: expression has no half-space leaf")
    elif leaf_dim is not None and leaf_dim != dim:
        raise ValueError(f"expression is {leaf_dim}-dimensional, not {dim}")
    terms = []
    seen = set()
    for lits in _literal_lists(s, True):
        closed = []
        complemented = []
        for hs, comp in lits:
            if conic:
                if is_finite(hs.c) or is_finite(hs.d):
                    raise ValueError("conic mode needs half-spaces without affine constants")
                h = HalfSpace(hs.a, hs.b)
            else:
                h = HalfSpace((hs.c,) + tuple(hs.a), (hs.d,) + tuple(hs.b))
            (complemented if comp else closed).append(h)
        key = (frozenset(closed), frozenset(complemented))
        if key in seen:
            continue
        seen.add(key)
        wdim = dim if conic else dim + 1
        terms.append(Term(wdim, tuple(dict.fromkeys(closed)), tuple(dict.fromkeys(complemented))))
    return Dnf(dim, conic, tuple(terms))


# ---------------------------------------------------------------------------
# closure of one conjunction


def closure_minus_halfspace(v0: ConeVForm, h: HalfSpace,
                            trace: Optional[list] = None) -> ConeVForm:
    """Generators of the closure of Span(v0) minus the half-space h.

    With h = {x : (a|x) <= (b|x)}, the closure of Span(v0) \\ h is spanned
    by the generators strictly outside h together with, for each such v
    and each generator w inside h, the boundary combination
    (b|w)v + (a|v)w.  An all-epsilon a makes h the whole space and the
    difference empty.
    """
    if h.dim != v0.dim:
        raise ValueError("half-space and cone dimensions differ")
    if h.trivial:
        return cone_vform(v0.dim, ())
    outside = []
    inside = []
    for g in v0.generators:
        if scalar_product(h.b, g) < scalar_product(h.a, g):
            outside.append(g)
        else:
            inside.append(g)
    combos = list(outside)
    for v in outside:
        av = scalar_product(h.a, v)
        for w in inside:
            combos.append(vec_add(vec_scale(scalar_product(h.b, w), v),
                                  vec_scale(av, w)))
    raw = cone_vform(v0.dim, combos)
    kept = extremal_filter(raw)
    if trace is not None and raw.generators:
        trace.append((raw.generators, kept.generators))
    return kept


def support_union(v: ConeVForm) -> frozenset:
    """Coordinates finite in at least one generator."""
    out = frozenset()
    for g in v.generators:
        out |= support(g)
    return out


def restrict_to_support(v: ConeVForm, keep: frozenset) -> ConeVForm:
    """Intersect Span(v) with {x : x_i = eps outside keep}.

    Dropping every generator with a finite coordinate off the support is
    exact: any combination touching such a generator sticks out of the
    restricted space unless the generator enters with coefficient eps.
    """
    gens = [g for g in v.generators if support(g) <= keep]
    return ConeVForm(v.dim, tuple(gens))


def _mask(vec: Sequence[Scalar], keep: frozenset) -> tuple:
    return tuple(c if i in keep else EPS for i, c in enumerate(vec))


def approx_term(t: Term, trace: Optional[list] = None) -> ConeVForm:
    """V-form of the topological closure of one conjunction.

    The closed literals fold through double description.  Each complemented
    literal is then peeled off with closure_minus_halfspace, restricted to
    the current working support: whenever the peel loses coordinates, the
    cone is restricted to the smaller support and the same literal is
    redone there.  The support shrinks strictly at each redo and never
    grows back, so there are at most dim restrictions in total.
    """
    d = t.dim
    if t.closed:
        a_rows = tuple(h.a for h in t.closed)
        b_rows = tuple(h.b for h in t.closed)
        v = mform_to_vform(ConeMForm(a_rows, b_rows, d), trace=trace)
    else:
        v = unit_cone(d)
    empty = cone_vform(d, ())
    for h in t.complemented:
        if not v.generators:
            return empty
        j = support_union(v)
        while True:
            if not j:
                return empty
            a = _mask(h.a, j)
            if all(c is EPS for c in a):
                # restricted to this support the half-space is everything,
                # so its complement contributes nothing
                return empty
            v1 = closure_minus_halfspace(v, HalfSpace(a, _mask(h.b, j)), trace=trace)
            s = support_union(v1)
            if s == j:
                v = v1
                break
            j = s
            v = restrict_to_support(v, j)
    return v


# ---------------------------------------------------------------------------
# unions of polyhedra


@dataclass(frozen=True)
class UnionOfPolyhedra:
    """Finitely many tropical polyhedra covering the closure of a target set.

    Affine results store cones one dimension up (leading homogenizing
    coordinate); conic results store them in the ambient dimension.  The
    exact flag records that no literal was complemented, in which case the
    closure added nothing.
    """

    dim: int
    conic: bool
    cones: tuple
    exact: bool

    def __post_init__(self) -> None:
        want = self.dim if self.conic else self.dim + 1
        for c in self.cones:
            if c.dim != want:
                raise ValueError(f"cone dim {c.dim}, expected {want}")


def approx_set(s: SetExpr, dim: Optional[int] = None, conic: bool = False,
               trace: Optional[list] = None) -> UnionOfPolyhedra:
    """Closure of the target set as a union of tropical polyhedra."""
    dnf = to_dnf(s, dim, conic=conic)
    cones = []
    seen = set()
    for t in dnf.terms:
        c = approx_term(t, trace=trace)
        if c.generators and c.generators not in seen:
            seen.add(c.generators)
            cones.append(c)
    exact = all(not t.complemented for t in dnf.terms)
    return UnionOfPolyhedra(dnf.dim, conic, tuple(cones), exact)


def union_member(u: UnionOfPolyhedra, x: Vector) -> bool:
    """Whether x lies in some stored polyhedron."""
    if len(x) != u.dim:
        raise ValueError(f"point has {len(x)} coords, union is {u.dim}-dimensional")
    y = tuple(x) if u.conic else (0,) + tuple(x)
    return any(span_member(c, y) for c in u.cones)


# ---------------------------------------------------------------------------
# span decomposition into difference-bound regions

def span_to_dbms(v: ConeVForm, cap: int = 20000) -> list:
    """Exact cover of Span(v) by closed DBM regions.

    x belongs to the span iff every coordinate is attained by some
    generator at its greatest admissible coefficient.  Fixing, per
    coordinate i, the generator g that attains it gives the region
    {x : x_i <= g_i - g_j + x_j  for every j in supp(g)}, plus x_i = eps
    when g_i is; the union over all attainment choices is the span.
    """
    d = v.dim
    gens = v.generators
    if not gens:
        return []
    choices = 1
    for _ in range(d):
        choices *= len(gens)
        if choices > cap:
            raise ValueError(f"span decomposition needs more than {cap} regions")
    out = []
    seen = set()
    for pick in _cartesian(range(len(gens)), repeat=d):
        entries = []
        for i in range(d):
            g = gens[pick[i]]
            if g[i] is EPS:
                entries.append((i, i, Bound(EPS, False)))
                continue
            for j in support(g):
                if j != i:
                    entries.append((i, j, Bound(g[i] - g[j], False)))
        m = dbm_from_entries(d, entries)
        if m.rows not in seen:
            seen.add(m.rows)
            out.append(m)
    return out
