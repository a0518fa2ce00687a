import pytest
from hypothesis import given, strategies as st

from hodgewitt.errors import ParseError
from hodgewitt.forms import LogForm, dlog
from hodgewitt.grammar import parse_cover, parse_form, parse_poly, parse_witt_literal, parse_with_header, tokenize
from hodgewitt.laurent import LaurentRing, VarRoster

from strategies import ROSTERS, forms, polys

TS = VarRoster.parse("t:log, s:plain")


def test_poly_grammar_example():
    ring = LaurentRing(TS, 3, 2)
    f = parse_poly("3*t^-2*s^1 + 1", ring)
    assert f.terms == {(-2, 1): 3, (0, 0): 1}
    assert parse_poly(" 3 * t ^ -2 * s ^ 1+1 ", ring) == f


def test_header_line():
    f = parse_with_header("vars: t:log, s:plain\n2*t^-1 + s^3", 3, 1)
    assert f.ring.roster == TS
    assert f.to_text() == "2*t^-1 + s^3"
    with pytest.raises(ParseError):
        parse_with_header("2*t", 3, 1)


def test_forms():
    ring = LaurentRing(TS, 3, 1)
    w = parse_form("t^-2 * dlog(t) w d(s)", ring)
    assert w.degree == 2
    assert w == LogForm.monomial(ring, (-2, 0), (0, 1))
    assert parse_form("d(t)", ring) == parse_form("t*dlog(t)", ring)
    assert parse_form("d(s) ∧ dlog(t)", ring) == -parse_form("dlog(t) w d(s)", ring)


@pytest.mark.parametrize("bad", ["", "t^", "dlog(s", "2**t", "dlog(t) w dlog(t)", "t^-1 + x", "3 $ t"])
def test_malformed_inputs(bad):
    ring = LaurentRing(TS, 3, 1)
    with pytest.raises(ParseError):
        parse_form(bad, ring)


def test_function_expected():
    ring = LaurentRing(TS, 3, 1)
    with pytest.raises(ParseError):
        parse_poly("dlog(t)", ring)


def test_witt_literal():
    w = parse_witt_literal("W(p=2,n=2)[t^2; 0]", VarRoster.parse("t:log"))
    assert w.to_text() == "W(p=2,n=2)[t^2; 0]"
    with pytest.raises(ParseError):
        parse_witt_literal("W(p=2,n=2)[t^2]", VarRoster.parse("t:log"))


def test_cover():
    assert parse_cover("t = t'^2", TS) == ("t", "1", "t'", 2)
    assert parse_cover("t = (1 + 2*s) * t'^3", TS) == ("t", "(1 + 2*s)", "t'", 3)
    with pytest.raises(ParseError):
        parse_cover("s = t'^2", TS)


def test_tokenize():
    assert tokenize("t^-2") == [("name", "t"), ("op", "^"), ("op", "-"), ("int", "2")]


@st.composite
def ring_form(draw):
    ring = LaurentRing(ROSTERS[draw(st.sampled_from([1, 2, 3]))], draw(st.sampled_from([2, 3])), draw(st.integers(1, 3)))
    deg = draw(st.integers(0, ring.nvars))
    return ring, draw(forms(ring, deg))


@given(ring_form())
def test_form_text_round_trip(rf):
    ring, w = rf
    assert parse_form(w.to_text(), ring) == w


@given(st.data())
def test_poly_text_round_trip(data):
    ring = LaurentRing(ROSTERS[3], 3, 2)
    f = data.draw(polys(ring))
    assert parse_poly(f.to_text(), ring) == f
