from collections import defaultdict

import pytest
from hypothesis import given, strategies as st

from hodgewitt.errors import NotAUnit, ParseError, RosterMismatch
from hodgewitt.laurent import (
    LaurentPoly,
    LaurentRing,
    VarRoster,
    frobenius_lift,
    frobenius_root,
    invert_unit,
    substitute,
    unit_decomposition,
)

from strategies import ROSTERS, polys, ring_and_poly


def naive_mul(f, g):
    q = f.ring.q
    acc = defaultdict(int)
    for e1, c1 in f.terms.items():
        for e2, c2 in g.terms.items():
            acc[tuple(a + b for a, b in zip(e1, e2))] += c1 * c2
    return {e: c % q for e, c in acc.items() if c % q}


TS = VarRoster.parse("t:log, s:plain")


def test_roster_parse_and_header():
    r = VarRoster.parse("vars: t:log, s:plain")
    assert r.names == ("t", "s")
    assert r.is_log(0) and not r.is_log(1)
    assert r.header() == "vars: t:log, s:plain"
    with pytest.raises(ParseError):
        VarRoster.parse("")
    with pytest.raises(ParseError):
        VarRoster.parse("t:weird")


def test_plain_variables_cannot_go_negative():
    ring = LaurentRing(TS, 3, 2)
    with pytest.raises(ValueError):
        ring.monomial((0, -1))
    assert ring.monomial((-2, 1)).to_text() == "t^-2*s^1"


def test_ring_identities():
    ring = LaurentRing(TS, 3, 2)
    t, s = ring.gen("t"), ring.gen("s")
    assert t * ring.one() == t
    assert (t + s) * (t - s) == t ** 2 - s ** 2


def test_nilpotent_product_over_z4():
    ring = LaurentRing(TS, 2, 2)
    t = ring.gen("t")
    assert (t.scale(2) * (t ** -1).scale(2)).is_zero()


def test_text_form():
    ring = LaurentRing(TS, 3, 2)
    f = ring.parse("3*t^-2*s^1 + 1")
    assert f.to_text() == "3*t^-2*s^1 + 1"
    assert ring.zero().to_text() == "0"
    assert ring.parse("t^2").to_text() == "t^2"


def test_different_rings_do_not_mix():
    a = LaurentRing(TS, 3, 2).one()
    b = LaurentRing(TS, 3, 1).one()
    with pytest.raises(RosterMismatch):
        a + b


def test_invert_unit_examples():
    ring = LaurentRing(TS, 2, 2)
    assert invert_unit(ring.one()) == ring.one()
    u = ring.parse("1 + 2*s")
    assert invert_unit(u) == u
    assert u * u == ring.one()
    r9 = LaurentRing(TS, 3, 2)
    with pytest.raises(NotAUnit):
        invert_unit(r9.parse("3*t"))
    with pytest.raises(NotAUnit):
        invert_unit(r9.parse("1 + s"))


def test_substitute_examples():
    src = LaurentRing(TS, 2, 2)
    tgt = LaurentRing(VarRoster.parse("t':log, s:plain"), 2, 2)
    tp = tgt.gen("t'")
    assert substitute(src.gen("t"), "t", tgt.one(), "t'", 2) == tp ** 2
    u = tgt.parse("1 + 2*s")
    assert substitute(src.gen("t") ** -1, "t", u, "t'", 3) == invert_unit(u) * tp ** -3
    assert substitute(src.gen("t") ** 2, "t", u, "t'", 1) == tp ** 2
    with pytest.raises(ValueError):
        substitute(src.gen("t"), "t", u, "t'", 0)


def test_frobenius_examples():
    ring = LaurentRing(TS, 2, 2)
    t, s = ring.gen("t"), ring.gen("s")
    assert frobenius_lift(t) == t ** 2
    assert frobenius_lift(ring.const(3)) == ring.const(3)
    f = t + s
    assert frobenius_lift(f) == t ** 2 + s ** 2
    assert (f ** 2).reduce(1) == frobenius_lift(f).reduce(1)


@st.composite
def two_polys(draw):
    ring = draw(ring_and_poly())
    return ring, draw(polys(ring)), draw(polys(ring)), draw(polys(ring))


@given(two_polys())
def test_multiplication_matches_naive(args):
    ring, f, g, _ = args
    assert (f * g).terms == naive_mul(f, g)


@given(two_polys())
def test_ring_axioms(args):
    ring, f, g, h = args
    assert f + g == g + f
    assert (f * g) * h == f * (g * h)
    assert f * (g + h) == f * g + f * h
    assert f - f == ring.zero()


@given(two_polys())
def test_frobenius_is_multiplicative_and_lifts_frobenius(args):
    ring, f, g, _ = args
    assert frobenius_lift(f * g) == frobenius_lift(f) * frobenius_lift(g)
    assert frobenius_lift(f).reduce(1) == (f ** ring.p).reduce(1)
    assert frobenius_root(frobenius_lift(f)) == f


@st.composite
def units(draw):
    ring = draw(ring_and_poly(Ns=(1, 2, 3, 4)))
    p = ring.p
    c = draw(st.sampled_from([x for x in range(1, ring.q) if x % p]))
    a = tuple(draw(st.integers(-3, 3)) if v.log else 0 for v in ring.roster)
    w = draw(polys(ring, 4, 0, 3)).scale(p)
    u = ring.monomial(a, c) * (ring.one() + w)
    return ring, u


@given(units())
def test_invert_unit_exact(args):
    ring, u = args
    assert u * invert_unit(u) == ring.one()
    c, a, w = unit_decomposition(u)
    assert all(x % ring.p == 0 for x in w.terms.values())


@given(st.sampled_from([2, 3]), st.integers(1, 4), st.integers(1, 4), st.data())
def test_substitute_composes(p, e1, e2, data):
    r0 = LaurentRing(VarRoster.parse("t:log, s:plain"), p, 3)
    r1 = LaurentRing(VarRoster.parse("t':log, s:plain"), p, 3)
    r2 = LaurentRing(VarRoster.parse("t'':log, s:plain"), p, 3)
    f = data.draw(polys(r0, 4))
    g = data.draw(polys(r0, 4))
    once = substitute(substitute(f, "t", r1.one(), "t'", e1), "t'", r2.one(), "t''", e2)
    direct = substitute(f, "t", r2.one(), "t''", e1 * e2)
    assert once == direct
    # ring homomorphism
    assert substitute(f * g, "t", r1.one(), "t'", e1) == substitute(f, "t", r1.one(), "t'", e1) * substitute(g, "t", r1.one(), "t'", e1)


@given(st.sampled_from([2, 3]), st.integers(1, 3), st.data())
def test_substitute_with_unit_is_homomorphism(p, e, data):
    r0 = LaurentRing(VarRoster.parse("t:log, s:plain"), p, 3)
    r1 = LaurentRing(VarRoster.parse("t':log, s:plain"), p, 3)
    u = r1.one() + data.draw(polys(r1, 2, 0, 2)).scale(p).change_ring(r1)
    u = LaurentPoly(r1, {k: v for k, v in u.terms.items() if k[0] == 0})
    f = data.draw(polys(r0, 3))
    g = data.draw(polys(r0, 3))
    sub = lambda x: substitute(x, "t", u, "t'", e)
    assert sub(f + g) == sub(f) + sub(g)
    assert sub(f * g) == sub(f) * sub(g)


def test_divide_by_p_power():
    ring = LaurentRing(TS, 3, 3)
    f = ring.parse("9*t + 18")
    assert f.divide_by_p_power(2) == ring.parse("t + 2")
    assert ring.parse("3*t").divide_by_p_power(2) is None
