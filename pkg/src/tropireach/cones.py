"""Tropical cones and polyhedra: half-space descriptions and generator sets.

A half-space {x | (a|x) <= (b|x)} is a max-plus analogue of a linear
inequality; finite intersections of them are tropical cones, and affine
variants homogenize to cones one dimension up by routing the constant
terms through a leading coordinate that gets pinned to 0.  Cones carry
two descriptions: an M-form (rows of half-spaces) and a V-form (a finite
generating set under max and scaling).  The V-form is what downstream set
operations consume, so the conversion and the pruning of redundant
generators live here, together with the local tangent-cone tests used to
certify extremality cheaply.
"""

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Optional, Sequence, Union

from .maxplus import (
    Matrix,
    Scalar,
    Vector,
    argmax_product,
    eps_vector,
    mat_apply,
    mp_add,
    residuation_coeff,
    scalar_product,
    support,
    unit_vector,
    vec_add,
    vec_leq,
    vec_scale,
    vec_sort_key,
    vector,
)
from .scalars import EPS


@dataclass(frozen=True)
class HalfSpace:
    """{x | (a|x) <= (b|x)}; trivial (all of space) when a is the eps vector."""

    a: Vector
    b: Vector

    def __post_init__(self) -> None:
        if len(self.a) != len(self.b):
            raise ValueError("half-space sides must share a dimension")

    @property
    def dim(self) -> int:
        return len(self.a)

    @property
    def trivial(self) -> bool:
        return all(u is EPS for u in self.a)


@dataclass(frozen=True)
class AffineHalfSpace:
    """{x | (a|x) + c <= (b|x) + d} with + read as max against the constant."""

    a: Vector
    b: Vector
    c: Scalar
    d: Scalar

    def __post_init__(self) -> None:
        if len(self.a) != len(self.b):
            raise ValueError("half-space sides must share a dimension")

    @property
    def dim(self) -> int:
        return len(self.a)


@dataclass(frozen=True)
class ConeMForm:
    """Conjunction of half-spaces {x | A (x) x <= B (x) x}, row by row.

    n is only needed when there are no rows to infer it from.
    """

    A: Matrix
    B: Matrix
    n: Optional[int] = None

    def __post_init__(self) -> None:
        if len(self.A) != len(self.B):
            raise ValueError("M-form sides must have the same row count")
        for ra, rb in zip(self.A, self.B):
            if len(ra) != len(rb):
                raise ValueError("M-form rows must share a dimension")
        if self.n is None:
            if not self.A:
                raise ValueError("row-free M-form needs an explicit dimension")
            object.__setattr__(self, "n", len(self.A[0]))
        elif self.A and len(self.A[0]) != self.n:
            raise ValueError("M-form rows disagree with the declared dimension")

    @property
    def dim(self) -> int:
        return self.n

    def halfspaces(self) -> tuple:
        return tuple(HalfSpace(ra, rb) for ra, rb in zip(self.A, self.B))


def halfspace_member(h: HalfSpace, x: Vector) -> bool:
    return scalar_product(h.a, x) <= scalar_product(h.b, x)


def affine_halfspace_member(h: AffineHalfSpace, x: Vector) -> bool:
    lhs = mp_add(scalar_product(h.a, x), h.c)
    rhs = mp_add(scalar_product(h.b, x), h.d)
    return lhs <= rhs


def mform_member(c: ConeMForm, x: Vector) -> bool:
    return vec_leq(mat_apply(c.A, x), mat_apply(c.B, x))


def normalize_generator(v: Vector) -> Optional[Vector]:
    """Scale so the first finite coordinate is 0; None for the eps vector.

    Scaling is a free action on rays, so this makes generator sets
    canonical: duplicates collide and sets compare by equality.  Anchoring
    the first finite coordinate (rather than, say, the largest one) keeps
    homogenized vertices at leading coordinate 0.
    """
    for u in v:
        if u is not EPS:
            return vec_scale(-u, v)
    return None


@dataclass(frozen=True)
class ConeVForm:
    """Span of finitely many generators under entrywise max and scaling."""

    dim: int
    generators: tuple

    @property
    def size(self) -> int:
        return len(self.generators)


def cone_vform(dim: int, gens: Iterable[Sequence[object]]) -> ConeVForm:
    seen = {}
    for g in gens:
        v = vector(g)
        if len(v) != dim:
            raise ValueError(f"generator of length {len(v)} in a {dim}-dim cone")
        n = normalize_generator(v)
        if n is not None:
            seen[n] = None
    return ConeVForm(dim, tuple(sorted(seen, key=vec_sort_key)))


def unit_cone(dim: int) -> ConeVForm:
    """The whole space as a V-form: the max-plus unit basis."""
    return cone_vform(dim, (unit_vector(dim, i) for i in range(dim)))


def span_coefficients(v: ConeVForm, x: Vector) -> tuple:
    """Greatest sub-solution coefficients: the largest lambda with
    combination <= x, one per generator."""
    if len(x) != v.dim:
        raise ValueError(f"point of length {len(x)} in a {v.dim}-dim cone")
    return tuple(residuation_coeff(x, g) for g in v.generators)


def span_member(v: ConeVForm, x: Vector) -> bool:
    """x lies in the span iff the greatest sub-combination reaches it."""
    lams = span_coefficients(v, x)
    combo = eps_vector(v.dim)
    for lam, g in zip(lams, v.generators):
        if lam is not EPS:
            combo = vec_add(combo, vec_scale(lam, g))
    return combo == tuple(x)


def extremal_filter(v: ConeVForm) -> ConeVForm:
    """Drop every generator reachable from the others; span is unchanged.

    A removed generator lies in the span of the rest, so removals never
    interact: one sweep leaves exactly the scaled extreme rays.
    """
    kept = list(v.generators)
    i = 0
    while i < len(kept):
        rest = ConeVForm(v.dim, tuple(kept[:i] + kept[i + 1:]))
        if rest.generators and span_member(rest, kept[i]):
            kept.pop(i)
        else:
            i += 1
    return ConeVForm(v.dim, tuple(kept))


def intersect_halfspace(v0: ConeVForm, h: HalfSpace, trace: Optional[list] = None) -> ConeVForm:
    """One double-description step: generators of Span(v0) intersected with h.

    Keeps the generators already inside h and, for each inside/outside
    pair (v, w), adds the boundary combination (a|w)v + (b|v)w; the result
    is pruned to its extreme rays before returning, otherwise the count
    compounds exponentially across successive steps.

    When ``trace`` is a list, every (candidates, kept) generator-tuple pair
    that went through the pruning step is appended to it.
    """
    if h.dim != v0.dim:
        raise ValueError("half-space and cone dimensions differ")
    if h.trivial:
        return v0
    inside = []
    outside = []
    for g in v0.generators:
        if halfspace_member(h, g):
            inside.append(g)
        else:
            outside.append(g)
    if not outside:
        return v0
    combos = list(inside)
    for g in inside:
        bv = scalar_product(h.b, g)
        for w in outside:
            aw = scalar_product(h.a, w)
            combos.append(vec_add(vec_scale(aw, g), vec_scale(bv, w)))
    raw = cone_vform(v0.dim, combos)
    kept = extremal_filter(raw)
    if trace is not None:
        trace.append((raw.generators, kept.generators))
    return kept


def mform_to_vform(c: ConeMForm, trace: Optional[list] = None) -> ConeVForm:
    """Generator set of an M-form cone: fold its rows over the unit basis."""
    v = unit_cone(c.dim)
    for h in c.halfspaces():
        if h.trivial:
            continue
        v = intersect_halfspace(v, h, trace=trace)
    return v


@dataclass(frozen=True)
class PolyVForm:
    """Tropical polyhedron: max-combinations of vertices (coefficients
    capped at 0, at least one hitting it) shifted by a cone of rays."""

    dim: int
    rays: tuple
    vertices: tuple


def poly_vform(dim: int, rays: Iterable, vertices: Iterable) -> PolyVForm:
    rs = {}
    for r in rays:
        v = vector(r)
        if len(v) != dim:
            raise ValueError("ray dimension mismatch")
        n = normalize_generator(v)
        if n is not None:
            rs[n] = None
    vs = {}
    for e in vertices:
        v = vector(e)
        if len(v) != dim:
            raise ValueError("vertex dimension mismatch")
        vs[v] = None
    return PolyVForm(
        dim,
        tuple(sorted(rs, key=vec_sort_key)),
        tuple(sorted(vs, key=vec_sort_key)),
    )


def homogenize(obj: Union[AffineHalfSpace, PolyVForm, Sequence[AffineHalfSpace]]):
    """Lift an affine object to a conic one with a leading 0-pinned coordinate.

    AffineHalfSpace -> HalfSpace (constants become the leading entries);
    PolyVForm -> ConeVForm (rays get a leading eps, vertices a leading 0);
    a sequence of AffineHalfSpace -> ConeMForm.
    """
    if isinstance(obj, AffineHalfSpace):
        return HalfSpace((obj.c,) + tuple(obj.a), (obj.d,) + tuple(obj.b))
    if isinstance(obj, PolyVForm):
        gens = [(EPS,) + tuple(r) for r in obj.rays]
        gens += [(0,) + tuple(e) for e in obj.vertices]
        return cone_vform(obj.dim + 1, gens)
    rows = [homogenize(h) for h in obj]
    if not rows:
        raise ValueError("cannot homogenize an empty constraint list")
    return ConeMForm(tuple(h.a for h in rows), tuple(h.b for h in rows))


def dehomogenize(c: ConeVForm) -> PolyVForm:
    """Split generators on the leading coordinate: eps -> ray, finite ->
    rescale so it reads 0 -> vertex."""
    if c.dim < 1:
        raise ValueError("nothing to dehomogenize in dimension 0")
    rays = []
    vertices = []
    for g in c.generators:
        if g[0] is EPS:
            rays.append(g[1:])
        else:
            vertices.append(vec_scale(-g[0], g)[1:])
    return poly_vform(c.dim - 1, rays, vertices)


def poly_member(p: PolyVForm, x: Vector) -> bool:
    return span_member(homogenize(p), (0,) + tuple(x))


class TangentConstraint(NamedTuple):
    """max over lhs of x_i (<|<=) max over rhs of x_j; empty side reads eps."""

    lhs: frozenset
    rhs: frozenset
    strict: bool


@dataclass(frozen=True)
class TangentCone:
    """Directions x with v + t*x locally inside the region, t > 0 small.

    Always contains the all-zeros direction and is stable under positive
    conventional scaling of x.
    """

    dim: int
    constraints: tuple


def _side_value(idx: frozenset, x: Vector) -> Scalar:
    best: Scalar = EPS
    for i in idx:
        if best < x[i]:
            best = x[i]
    return best


def tangent_member(t: TangentCone, x: Vector) -> bool:
    if len(x) != t.dim:
        raise ValueError("direction dimension mismatch")
    for c in t.constraints:
        lhs = _side_value(c.lhs, x)
        rhs = _side_value(c.rhs, x)
        if lhs > rhs or (c.strict and lhs == rhs):
            return False
    return True


def tangent_cone(v: Vector, c: ConeMForm) -> TangentCone:
    """Local shape of an M-form cone at one of its points.

    Only rows active at v (equal products, above eps) constrain nearby
    points, and near v each side's max is attained on its argmax set, so
    the local test compares perturbations over those index sets.  The
    locality reading assumes v has full support; for partial support the
    constraints still only mention support coordinates and describe the
    cone restricted to that support.
    """
    if not mform_member(c, v):
        raise ValueError("tangent cone requested at a point outside the cone")
    cons = []
    for ra, rb in zip(c.A, c.B):
        av = scalar_product(ra, v)
        bv = scalar_product(rb, v)
        if av == bv and av is not EPS:
            cons.append(
                TangentConstraint(argmax_product(ra, v), argmax_product(rb, v), False)
            )
    return TangentCone(len(v), tuple(cons))


def tangent_cone_complement(v: Vector, h: HalfSpace) -> tuple:
    """Local shape of a half-space complement at a boundary point.

    The complement {(a|x) > (b|x)} is open, so its tangent constraint is
    strict with the argmax sets swapping sides; its closure rewrites the
    right side to rhs minus lhs with <=, which is what the extremality
    test intersects with.  Returns (strict constraint, closed constraint).
    """
    av = scalar_product(h.a, v)
    bv = scalar_product(h.b, v)
    if av != bv:
        raise ValueError("complement tangent cone needs equal products at v")
    lhs = argmax_product(h.b, v)
    rhs = argmax_product(h.a, v)
    return (
        TangentConstraint(lhs, rhs, True),
        TangentConstraint(lhs, rhs - lhs, False),
    )


def _largest_admissible(avoid: int, coords: frozenset, cons: Sequence[TangentConstraint]) -> frozenset:
    # greatest S inside coords - {avoid} with: lhs meets S => rhs meets S.
    # admissible sets are closed under union, so deleting forced-out
    # elements until stable lands exactly on the maximum one
    s = set(coords)
    s.discard(avoid)
    changed = True
    while changed:
        changed = False
        for c in cons:
            if not (c.rhs & s) and (c.lhs & s):
                s -= c.lhs
                changed = True
    return frozenset(s)


def zero_extremal(coords: frozenset, cons: Sequence[TangentConstraint]) -> bool:
    """Is the all-zeros direction extremal in the cone over these coordinates?

    Zero is a max of two cone members iff two proper admissible index sets
    cover all coordinates (an admissible set S marks the 0/eps pattern
    with zeros exactly on S, and any witness pair rounds to such patterns),
    so extremality reduces to checking the pairwise unions of the maximal
    admissible sets missing each coordinate.
    """
    best = {i: _largest_admissible(i, coords, cons) for i in coords}
    items = sorted(coords)
    for ai in range(len(items)):
        for bj in range(ai + 1, len(items)):
            if best[items[ai]] | best[items[bj]] == coords:
                return False
    return True


def is_extremal_in_closure(
    v: Vector,
    c: ConeMForm,
    h: HalfSpace,
    generators: Optional[ConeVForm] = None,
) -> str:
    """Classify a generator of the closure of (cone minus half-space).

    Strictly outside the half-space the closure looks exactly like the
    cone near v, so extremality there is extremality in the cone, decided
    by a redundancy test against the cone's generators.  On the boundary
    a sufficient local test applies: if the zero direction is extremal in
    the intersection of the cone's tangent cone at v with the closed
    tangent of the complement, v is extremal; when that test fails the
    answer is genuinely undecided here and the caller falls back to a
    global redundancy pass.  Returns "extremal", "not_extremal" or
    "unknown".
    """
    av = scalar_product(h.a, v)
    bv = scalar_product(h.b, v)
    if bv < av:
        gens = generators if generators is not None else mform_to_vform(c)
        mine = normalize_generator(vector(v))
        rest = ConeVForm(gens.dim, tuple(g for g in gens.generators if g != mine))
        if not rest.generators:
            return "extremal"
        return "not_extremal" if span_member(rest, v) else "extremal"
    if bv > av:
        return "unknown"
    if av is EPS:
        return "unknown"
    combined = tangent_cone(v, c).constraints + (tangent_cone_complement(v, h)[1],)
    if zero_extremal(support(v), combined):
        return "extremal"
    return "unknown"
