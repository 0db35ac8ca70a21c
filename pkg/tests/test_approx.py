"""Target-set grammar, DNF normalization, and closure computation.

The frozen two-dimensional peel example and its three scalar products were
checked by hand against the generator formula before being pinned here.
"""

import random

import pytest

from tropireach.approx import (
    Complement,
    Empty,
    Halfspace,
    Intersection,
    Term,
    Union,
    UnionOfPolyhedra,
    approx_set,
    approx_term,
    closure_minus_halfspace,
    eval_setexpr,
    expr_dim,
    restrict_to_support,
    span_to_dbms,
    support_union,
    term_member,
    to_dnf,
    union_member,
)
from tropireach.cones import (
    AffineHalfSpace,
    ConeMForm,
    HalfSpace,
    cone_vform,
    mform_to_vform,
    span_member,
    unit_cone,
)
from tropireach.dbm import dbm_member
from tropireach.maxplus import EPS as E
from tropireach.maxplus import scalar_product, vec_add, vec_scale, vector


def hs(a, b, c=E, d=E):
    return Halfspace(AffineHalfSpace(vector(a), vector(b), c, d))


def rand_scalar(rng, eps_p=0.3):
    if rng.random() < eps_p:
        return E
    return rng.randint(-3, 3)


def rand_halfspace(rng, dim):
    while True:
        a = tuple(rand_scalar(rng) for _ in range(dim))
        b = tuple(rand_scalar(rng) for _ in range(dim))
        c, d = rand_scalar(rng, 0.6), rand_scalar(rng, 0.6)
        if any(u is not E for u in a + b + (c, d)):
            return Halfspace(AffineHalfSpace(a, b, c, d))


def rand_expr(rng, dim, depth):
    if depth == 0 or rng.random() < 0.3:
        return rand_halfspace(rng, dim)
    kind = rng.randrange(4)
    if kind == 0:
        return Complement(rand_expr(rng, dim, depth - 1))
    if kind == 1:
        return Union(tuple(rand_expr(rng, dim, depth - 1) for _ in range(2)))
    if kind == 2:
        return Intersection(tuple(rand_expr(rng, dim, depth - 1) for _ in range(2)))
    return Empty()


def rand_point(rng, dim, eps_p=0.25):
    return tuple(E if rng.random() < eps_p else rng.randint(-4, 4) for _ in range(dim))


class TestSetExpr:
    def test_direct_semantics(self):
        h = hs((0, E), (E, 0))  # x0 <= x1
        assert eval_setexpr(h, (1, 2))
        assert not eval_setexpr(h, (2, 1))
        assert eval_setexpr(Complement(h), (2, 1))
        assert not eval_setexpr(Empty(), (0, 0))
        both = Intersection((h, hs((E, 0), (0, E))))  # x0 <= x1 and x1 <= x0
        assert eval_setexpr(both, (3, 3))
        assert not eval_setexpr(both, (3, 4))
        either = Union((h, hs((E, 0), (0, E))))
        assert eval_setexpr(either, (5, 1))

    def test_expr_dim(self):
        assert expr_dim(hs((0, E), (E, 0))) == 2
        assert expr_dim(Empty()) is None
        with pytest.raises(ValueError):
            expr_dim(Union((hs((0,), (E,)), hs((0, E), (E, 0)))))


class TestToDnf:
    def test_single_halfspace(self):
        d = to_dnf(hs((0, E), (E, 0)))
        assert d.dim == 2 and len(d.terms) == 1
        t = d.terms[0]
        assert len(t.closed) == 1 and not t.complemented
        assert t.dim == 3  # homogenized

    def test_de_morgan_over_union(self):
        h1, h2 = hs((0, E), (E, 0)), hs((E, 0), (0, E))
        d = to_dnf(Complement(Union((h1, h2))))
        assert len(d.terms) == 1
        t = d.terms[0]
        assert not t.closed and len(t.complemented) == 2

    def test_distribution(self):
        h1, h2, h3 = hs((0, E), (E, 0)), hs((E, 0), (0, E)), hs((1, E), (E, 0))
        d = to_dnf(Intersection((Union((h1, h2)), Complement(h3))))
        assert len(d.terms) == 2
        for t in d.terms:
            assert len(t.closed) == 1 and len(t.complemented) == 1

    def test_double_complement_cancels(self):
        h = hs((0, E), (E, 0))
        d = to_dnf(Complement(Complement(h)))
        assert len(d.terms) == 1 and len(d.terms[0].closed) == 1

    def test_empty_handling(self):
        h = hs((0, E), (E, 0))
        assert to_dnf(Empty(), 2).terms == ()
        full = to_dnf(Complement(Empty()), 2)
        assert len(full.terms) == 1
        assert not full.terms[0].closed and not full.terms[0].complemented
        assert to_dnf(Intersection((h, Empty()))).terms == ()
        assert len(to_dnf(Union((h, Empty()))).terms) == 1

    def test_duplicate_terms_collapse(self):
        h = hs((0, E), (E, 0))
        assert len(to_dnf(Union((h, h))).terms) == 1

    def test_dnf_preserves_semantics(self):
        rng = random.Random(41)
        for _ in range(40):
            s = rand_expr(rng, 2, 3)
            d = to_dnf(s, 2)
            for _ in range(25):
                x = rand_point(rng, 2)
                y = (0,) + x
                assert eval_setexpr(s, x) == any(term_member(t, y) for t in d.terms)

    def test_conic_mode(self):
        h = hs((1, 0), (0, 0))
        d = to_dnf(Complement(h), 2, conic=True)
        assert d.conic and d.terms[0].dim == 2
        with pytest.raises(ValueError):
            to_dnf(hs((0, E), (E, 0), c=1), 2, conic=True)

    def test_missing_dimension(self):
        with pytest.raises(ValueError):
            to_dnf(Empty())
        with pytest.raises(ValueError):
            to_dnf(hs((0, E), (E, 0)), 3)


class TestClosureMinusHalfspace:
    def test_peel_example(self):
        v0 = unit_cone(2)
        h = HalfSpace((1, 0), (0, 0))
        out = closure_minus_halfspace(v0, h)
        assert set(out.generators) == {(0, E), (0, 1)}

    def test_peel_example_products(self):
        # the three scalar products behind the combination (0, 1)
        a, b = (1, 0), (0, 0)
        v, w = (0, E), (E, 0)
        assert scalar_product(a, v) == 1
        assert scalar_product(b, v) == 0
        assert scalar_product(a, w) == 0
        assert scalar_product(b, w) == 0
        comb = vec_add(vec_scale(scalar_product(b, w), v),
                       vec_scale(scalar_product(a, v), w))
        assert comb == (0, 1)

    def test_trivial_halfspace_gives_empty(self):
        out = closure_minus_halfspace(unit_cone(2), HalfSpace((E, E), (0, 0)))
        assert out.generators == ()

    def test_nothing_outside_gives_empty(self):
        # cone inside h: complement misses it entirely
        v0 = cone_vform(2, [(0, 0)])
        out = closure_minus_halfspace(v0, HalfSpace((0, E), (E, 0)))
        assert out.generators == ()

    def test_result_stays_inside_original_span(self):
        rng = random.Random(43)
        for _ in range(60):
            dim = rng.randint(1, 3)
            gens = [tuple(rand_scalar(rng) for _ in range(dim))
                    for _ in range(rng.randint(1, 4))]
            v0 = cone_vform(dim, gens)
            a = tuple(rand_scalar(rng) for _ in range(dim))
            b = tuple(rand_scalar(rng) for _ in range(dim))
            out = closure_minus_halfspace(v0, HalfSpace(a, b))
            for g in out.generators:
                assert span_member(v0, g)
                # never strictly inside h: outside or on its boundary
                assert scalar_product(b, g) <= scalar_product(a, g)

    def test_strictly_outside_generators_survive(self):
        rng = random.Random(44)
        for _ in range(60):
            dim = rng.randint(1, 3)
            gens = [tuple(rand_scalar(rng) for _ in range(dim))
                    for _ in range(rng.randint(1, 4))]
            v0 = cone_vform(dim, gens)
            a = tuple(rand_scalar(rng) for _ in range(dim))
            b = tuple(rand_scalar(rng) for _ in range(dim))
            out = closure_minus_halfspace(v0, HalfSpace(a, b))
            for g in v0.generators:
                if scalar_product(b, g) < scalar_product(a, g):
                    assert span_member(out, g)


class TestApproxTerm:
    def test_closed_only_is_plain_double_description(self):
        a_rows = ((0, E, E), (E, 1, E))
        b_rows = ((E, 0, E), (E, E, 0))
        t = Term(3, tuple(HalfSpace(a, b) for a, b in zip(a_rows, b_rows)), ())
        direct = mform_to_vform(ConeMForm(a_rows, b_rows))
        assert approx_term(t).generators == direct.generators

    def test_peel_term(self):
        t = Term(2, (), (HalfSpace((1, 0), (0, 0)),))
        out = approx_term(t)
        assert set(out.generators) == {(0, E), (0, 1)}

    def test_contradictory_conjunction_is_empty(self):
        # x <= -1 and x >= 2, homogenized
        t = Term(2, (HalfSpace((E, 0), (-1, E)), HalfSpace((2, E), (E, 0))), ())
        assert approx_term(t).generators == ()

    def test_complement_of_everything_is_empty(self):
        t = Term(2, (), (HalfSpace((0, 0), (0, 0)),))
        assert approx_term(t).generators == ()

    def test_masked_complement_on_restricted_support(self):
        # closed part pins x1 = eps; the complement {x1 > eps} then has
        # nothing left on that support
        t = Term(2, (HalfSpace((E, 0), (E, E)),), (HalfSpace((E, 0), (E, E)),))
        assert approx_term(t).generators == ()

    def test_restriction_count_bounded_by_dimension(self, monkeypatch):
        import tropireach.approx as mod
        calls = []
        orig = mod.restrict_to_support

        def counting(v, keep):
            calls.append(keep)
            return orig(v, keep)

        monkeypatch.setattr(mod, "restrict_to_support", counting)
        rng = random.Random(47)
        for _ in range(40):
            dim = rng.randint(1, 3)
            closed = tuple(HalfSpace(tuple(rand_scalar(rng) for _ in range(dim)),
                                     tuple(rand_scalar(rng) for _ in range(dim)))
                           for _ in range(rng.randint(0, 2)))
            comp = tuple(HalfSpace(tuple(rand_scalar(rng) for _ in range(dim)),
                                   tuple(rand_scalar(rng) for _ in range(dim)))
                         for _ in range(rng.randint(1, 2)))
            calls.clear()
            approx_term(Term(dim, closed, comp))
            assert len(calls) <= dim


class TestRestriction:
    def test_diagonal_span_restriction_drops_generator(self):
        v = cone_vform(2, [(0, 0)])
        out = restrict_to_support(v, frozenset({0}))
        assert out.generators == ()

    def test_support_union(self):
        v = cone_vform(3, [(0, E, E), (E, 0, 1)])
        assert support_union(v) == frozenset({0, 1, 2})


class TestApproxSet:
    def test_empty_expression(self):
        u = approx_set(Empty(), 2)
        assert u.cones == () and u.exact
        assert not union_member(u, (0, 0))

    def test_single_closed_halfspace_is_exact(self):
        s = hs((0, E), (E, 0))
        u = approx_set(s, 2)
        assert u.exact and len(u.cones) == 1
        rng = random.Random(53)
        for _ in range(200):
            x = rand_point(rng, 2)
            assert union_member(u, x) == eval_setexpr(s, x)

    def test_peel_example_conic(self):
        s = Complement(hs((1, 0), (0, 0)))
        u = approx_set(s, 2, conic=True)
        assert len(u.cones) == 1 and not u.exact
        assert set(u.cones[0].generators) == {(0, E), (0, 1)}

    def test_peel_example_affine_membership(self):
        s = Complement(hs((1, 0), (0, 0)))
        u = approx_set(s, 2)
        assert union_member(u, (0, 1))
        assert not union_member(u, (0, 2))

    def test_soundness(self):
        rng = random.Random(59)
        for _ in range(30):
            s = rand_expr(rng, 2, 2)
            u = approx_set(s, 2)
            for _ in range(40):
                x = rand_point(rng, 2)
                if eval_setexpr(s, x):
                    assert union_member(u, x)

    def test_tightness_up_to_boundary(self):
        rng = random.Random(61)
        d_cache = {}
        for _ in range(30):
            s = rand_expr(rng, 2, 2)
            u = approx_set(s, 2)
            d = to_dnf(s, 2)
            for _ in range(40):
                x = rand_point(rng, 2)
                if union_member(u, x) and not eval_setexpr(s, x):
                    y = (0,) + x
                    lits = [h for t in d.terms for h in t.closed + t.complemented]
                    assert any(scalar_product(h.a, y) == scalar_product(h.b, y)
                               for h in lits)

    def test_exact_flag_only_without_complements(self):
        h1, h2 = hs((0, E), (E, 0)), hs((E, 0), (0, E))
        assert approx_set(Union((h1, h2)), 2).exact
        assert not approx_set(Union((h1, Complement(h2))), 2).exact

    def test_closed_expressions_match_everywhere(self):
        rng = random.Random(67)
        for _ in range(25):
            h1 = rand_halfspace(rng, 2)
            h2 = rand_halfspace(rng, 2)
            s = rng.choice([Intersection((h1, h2)), Union((h1, h2)), h1])
            u = approx_set(s, 2)
            assert u.exact
            for _ in range(50):
                x = rand_point(rng, 2)
                assert union_member(u, x) == eval_setexpr(s, x)

    def test_determinism(self):
        rng = random.Random(71)
        for _ in range(10):
            s = rand_expr(rng, 2, 2)
            assert approx_set(s, 2) == approx_set(s, 2)

    def test_trace_pairs_preserve_span_and_minimality(self):
        rng = random.Random(73)
        for _ in range(15):
            s = rand_expr(rng, 2, 2)
            trace = []
            approx_set(s, 2, trace=trace)
            for raw, kept in trace:
                kform = cone_vform(3, kept)
                for g in raw:
                    assert span_member(kform, g)
                for i, g in enumerate(kept):
                    rest = cone_vform(3, kept[:i] + kept[i + 1:])
                    if rest.generators:
                        assert not span_member(rest, g)
                    else:
                        assert len(kept) == 1


class TestSpanToDbms:
    def test_single_generator(self):
        v = cone_vform(2, [(0, -1)])
        dbms = span_to_dbms(v)
        rng = random.Random(79)
        for _ in range(120):
            x = rand_point(rng, 2)
            assert span_member(v, x) == any(dbm_member(m, x) for m in dbms)

    def test_all_regions_closed(self):
        v = cone_vform(3, [(0, E, 1), (E, 0, 0)])
        for m in span_to_dbms(v):
            assert all(not b.strict for row in m.rows for b in row)

    def test_matches_span_membership(self):
        rng = random.Random(83)
        for _ in range(25):
            dim = rng.randint(1, 3)
            gens = [tuple(rand_scalar(rng) for _ in range(dim))
                    for _ in range(rng.randint(1, 3))]
            v = cone_vform(dim, gens)
            if not v.generators:
                continue
            dbms = span_to_dbms(v)
            pts = [rand_point(rng, dim) for _ in range(60)]
            pts += [tuple(vec_add(vec_scale(rng.randint(-2, 2), a),
                                  vec_scale(rng.randint(-2, 2), b)))
                    for a in v.generators for b in v.generators]
            for x in pts:
                assert span_member(v, x) == any(dbm_member(m, x) for m in dbms)

    def test_cap(self):
        v = cone_vform(3, [(0, 0, 0), (0, 1, 2), (0, 2, 1), (1, 0, 2)])
        with pytest.raises(ValueError):
            span_to_dbms(v, cap=10)
