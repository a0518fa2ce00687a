import itertools
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from hodgewitt.complexes import Complex, ComplexSpec, DegreeWindow
from hodgewitt.errors import NotClosedError
from hodgewitt.filtration import (
    FilChart,
    ModulusChart,
    fil_membership,
    graded_certificate_nonzero,
    membership_two_sided,
    modulus_sections,
    verify_local_ls,
    verify_ls_certificates,
    verify_trace_inclusion,
)
from hodgewitt.forms import pole_membership
from hodgewitt.grammar import parse_form
from hodgewitt.laurent import LaurentRing, VarRoster
from hodgewitt.pushforward import FiniteCover

T = VarRoster.parse("t:log")
X = VarRoster.parse("x:log")
TS = VarRoster.parse("t:log, s:plain")
R_GRID = [0, Fraction(1, 2), 1, Fraction(3, 2), 2, Fraction(5, 2), 3]


def test_basic_memberships():
    chart = FilChart(TS, 3, 1)
    ring = chart.ring
    assert chart.membership(parse_form("d(t)", ring), 0)
    assert not chart.membership(parse_form("dlog(t)", ring), 0)
    assert chart.membership(parse_form("dlog(t)", ring), 1)
    assert fil_membership(parse_form("d(t)", ring), 0)


def test_t_minus_3_dlog_t():
    chart = FilChart(T, 3, 1)
    w = parse_form("t^-3 * dlog(t)", chart.ring)
    for r in [Fraction(1, 2), 1, Fraction(7, 6), Fraction(3, 2), 2, 3]:
        assert chart.fil(w, r) == (r > 1)


def test_not_closed_rejected():
    chart = FilChart(T, 3, 1)
    with pytest.raises(NotClosedError):
        chart.membership(parse_form("t^-1", chart.ring), 1)


def test_negative_r_rejected():
    chart = FilChart(T, 3, 1)
    with pytest.raises(ValueError):
        chart.membership(parse_form("dlog(t)", chart.ring), -1)


def _window_classes(chart, window):
    for i in range(len(chart.roster) + 1):
        for g in chart.laurent.cohomology_basis(i, window):
            yield g.rep


@pytest.mark.parametrize("p,n", [(2, 1), (2, 2), (3, 1)])
def test_monotone_and_renumbered(p, n):
    chart = FilChart(TS, p, n)
    W = DegreeWindow.uniform(TS, -7, 7)
    for w in _window_classes(chart, W):
        for variant in ("Fil'", "Fil"):
            seq = [chart.membership(w, r, variant) for r in R_GRID]
            # once in, stays in
            assert seq == sorted(seq), (w.to_text(), variant, seq)
        for r in R_GRID[1:]:
            assert chart.fil(w, r) == chart.fil_prime(w, p * Fraction(int(-(-r // 1))))


@pytest.mark.parametrize("p,n", [(2, 1), (2, 2), (3, 1)])
def test_fil_matches_modulus_sections(p, n):
    # Fil_r = image of H(t^(-p ceil r + 1)) = modulus sections of the divisor r.D
    chart = FilChart(TS, p, n)
    W = DegreeWindow.uniform(TS, -6, 6)
    for r in R_GRID[1:]:
        up = Complex(ModulusChart(TS, {"t": r}, p, n).spec_upper())
        for w in _window_classes(chart, W):
            assert chart.fil(w, r) == chart.laurent.image_contains(up, w)


def test_modulus_sections_example():
    chart = ModulusChart(X, {"x": 1}, 2, 1)
    W = DegreeWindow.uniform(X, -6, 6)
    secs = sorted(g.rep.to_text() for g in modulus_sections(chart, 0, W))
    assert secs == ["1", "x^2", "x^4", "x^6"]
    assert modulus_sections(chart, 2, W) == []


def test_sections_contain_closed_functions_of_small_pole():
    for p in (2, 3):
        chart = ModulusChart(X, {"x": 1}, p, 1)
        L = chart.laurent()
        up = Complex(chart.spec_upper())
        for m in range(-(p - 1), 7):
            f = parse_form(f"x^{m}", L.ring)
            if L.is_closed(f):
                assert L.image_contains(up, f)


@pytest.mark.parametrize("b", ["1/2", "1", "3/2", "2"])
@pytest.mark.parametrize("p,n", [(2, 1), (2, 2), (3, 1)])
def test_local_ls_collapse(b, p, n):
    chart = ModulusChart(TS.rename("t", "x"), {"x": Fraction(b)}, p, n)
    W = DegreeWindow.uniform(chart.roster, -8, 8)
    for i in range(3):
        assert verify_local_ls(chart, i, W).passed


def test_collapse_is_sharp():
    # below x^(-p(ceil b - 1)) the image shrinks: the step at a multiple of p is not onto
    p = 3
    L = Complex(ComplexSpec.make(X, p, 1, {"x": None}))
    at = Complex(ComplexSpec.make(X, p, 1, {"x": p}))
    below = Complex(ComplexSpec.make(X, p, 1, {"x": p - 1}))
    w = parse_form("x^-3 * dlog(x)", L.ring)
    assert L.image_contains(at, w) and not L.image_contains(below, w)


def test_certificate_example():
    chart = ModulusChart(X, {"x": 1}, 2, 1)
    w = parse_form("x^-2 * dlog(x)", chart.laurent().ring)
    res = membership_two_sided(chart, w)
    assert res["status"] == "outside"
    cert = res["certificate"]
    assert cert.c == 2 and cert.n0 == 1 and cert.nonzero
    assert graded_certificate_nonzero(chart, cert)
    inside = parse_form("dlog(x)", chart.laurent().ring)
    assert membership_two_sided(chart, inside) == {"status": "member"}


def test_certificate_devissage_level():
    chart = ModulusChart(X, {"x": 1}, 2, 2)
    L = chart.laurent()
    levels = set()
    for g in L.cohomology_basis(1, DegreeWindow.uniform(X, -8, 8)):
        res = membership_two_sided(chart, g.rep)
        if res["status"] == "outside":
            cert = res["certificate"]
            assert cert.n0 in (1, 2)
            assert cert.nonzero and graded_certificate_nonzero(chart, cert)
            levels.add(cert.n0)
    assert levels == {1}
    # a class divisible by p dies in the graded piece mod p and survives mod p^2
    w = parse_form("2*x^-4 * dlog(x)", L.ring)
    cert = membership_two_sided(chart, w)["certificate"]
    assert cert.n0 == 2 and cert.nonzero and graded_certificate_nonzero(chart, cert)
    assert cert.omega3 == parse_form("x^-4 * dlog(x)", cert.omega3.ring)


@pytest.mark.parametrize("p,n", [(2, 1), (2, 2), (3, 1), (3, 2)])
def test_ls_certificates(p, n):
    chart = ModulusChart(TS.rename("t", "x"), {"x": Fraction(3, 2)}, p, n)
    W = DegreeWindow.uniform(chart.roster, -8, 8)
    for i in range(3):
        rep = verify_ls_certificates(chart, i, W)
        assert rep.passed, rep.failures


def test_trace_inclusion_examples():
    ring = LaurentRing(TS, 2, 1)
    W = DegreeWindow.make(VarRoster.parse("t':log, s:plain"), [(-8, 8), (0, 3)])
    assert verify_trace_inclusion(FiniteCover(ring, "t", 1), 1, 1, 1, W).passed
    rep = verify_trace_inclusion(FiniteCover(ring, "t", 2), 2, 1, 1, W)
    assert rep.passed
    assert "(" in rep.checks[0].name
    for e in (1, 2, 3, 4):
        assert verify_trace_inclusion(FiniteCover(ring, "t", e), 0, 1, 1, W).passed


def test_trace_inclusion_is_not_vacuous():
    # t'^-6 dlog t' is in Fil'_7; along t = t'^2 it goes to t^-3 dlog t, in Fil'_(7/2) but not Fil'_3
    ring = LaurentRing(T, 3, 1)
    c = FiniteCover(ring, "t", 2)
    src = FilChart(c.source.roster, 3, 1, "t'")
    dst = FilChart(c.target.roster, 3, 1, "t")
    w = parse_form("t'^-6 * dlog(t')", c.source)
    assert src.fil_prime(w, 7) and not src.fil_prime(w, 6)
    y = c.pushforward(w)
    assert y == parse_form("t^-3 * dlog(t)", ring)
    assert dst.fil_prime(y, Fraction(7, 2)) and not dst.fil_prime(y, 3)
