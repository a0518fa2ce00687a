import itertools
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from hodgewitt.cartier import cartier_inverse, cartier_inverse_form, verify_fil_correspondence
from hodgewitt.complexes import Complex, ComplexSpec, DegreeWindow
from hodgewitt.errors import PrecisionError
from hodgewitt.filtration import FilChart
from hodgewitt.forms import LogForm
from hodgewitt.grammar import parse_form
from hodgewitt.laurent import LaurentRing, VarRoster, frobenius_lift
from hodgewitt.zpn import ceil_rat, howell_form

from strategies import forms, polys

T = VarRoster.parse("t:log")
TS = VarRoster.parse("t:log, s:plain")


def laurent(roster, p):
    return Complex(ComplexSpec(roster, p, 1, tuple(None if v.log else 0 for v in roster)))


def test_examples():
    ring = LaurentRing(TS, 3, 1)
    L = laurent(TS, 3)
    assert cartier_inverse(LogForm.function(ring.one())).rep == LogForm.function(ring.one())
    assert cartier_inverse(parse_form("dlog(t)", ring)).rep == parse_form("dlog(t)", ring)
    img = cartier_inverse(parse_form("t^-1 * dlog(t)", ring)).rep
    assert img == parse_form("t^-3 * dlog(t)", ring)
    assert L.is_closed(img) and not L.is_exact(img)
    assert cartier_inverse_form(parse_form("d(s)", ring)) == parse_form("s^2 * d(s)", ring)


def test_needs_fp_coefficients():
    with pytest.raises(PrecisionError):
        cartier_inverse_form(parse_form("dlog(t)", LaurentRing(T, 3, 2)))


@pytest.mark.parametrize("p", [2, 3])
def test_closed_and_injective_on_monomials(p):
    ring = LaurentRing(TS, p, 1)
    L = laurent(TS, p)
    for i in range(3):
        by_md = {}
        for ex in itertools.product(range(-4, 5), range(0, 4)):
            for S in itertools.combinations(range(2), i):
                x = LogForm.monomial(ring, ex, S)
                y = L.reduce(cartier_inverse_form(x))
                assert L.is_closed(y)
                for M, piece in y.by_multidegree().items():
                    by_md.setdefault(M, []).append(L.vector(piece, M, i))
        for M, rows in by_md.items():
            B = L.local(M, i).B
            h = howell_form(rows + [list(b) for b in B.rows], L.modulus, len(L.words(M, i)))
            # images of distinct monomials are independent modulo boundaries
            assert len(h.rows) - len(B.rows) == len(rows)


@given(st.sampled_from([2, 3]), st.integers(0, 2), st.data())
def test_semilinearity(p, deg, data):
    ring = LaurentRing(TS, p, 1)
    f = data.draw(polys(ring, 3))
    w = data.draw(forms(ring, deg))
    fw = LogForm.function(f).wedge(w)
    assert cartier_inverse_form(fw) == LogForm.function(frobenius_lift(f)).wedge(cartier_inverse_form(w))


@pytest.mark.parametrize("r", [0, 1])
def test_correspondence_examples(r):
    rep = verify_fil_correspondence(T, 2, r, 0, DegreeWindow.uniform(T, -8, 8))
    assert rep.passed, rep.failures
    assert rep.extra["multidegrees_compared"] > 0


def test_above_dimension_both_zero():
    rep = verify_fil_correspondence(T, 3, 1, 2, DegreeWindow.uniform(T, -6, 6))
    assert rep.passed


@pytest.mark.parametrize("p", [2, 3])
@pytest.mark.parametrize("r", [Fraction(1, 2), 1, Fraction(3, 2), 2, 3])
def test_renumbering_consistency(p, r):
    # at n = 1, Fil_r inside H^i of the Laurent complex is spanned by C^-1 of t^(-ceil r + 1) Omega(log)
    chart = FilChart(TS, p, 1)
    L = chart.laurent
    sub = chart._sub(chart.prime_index(r, "Fil"))
    src = Complex(ComplexSpec.make(TS, p, 1, {"t": ceil_rat(r) - 1}))
    W = DegreeWindow.uniform(TS, -3 * p, 3 * p)
    for i in range(3):
        for M in W:
            B = [list(b) for b in L.local(M, i).B.rows]
            fil = L.image_span(sub, M, i)
            rows = []
            if all(m % p == 0 for m in M):
                Ms = tuple(m // p for m in M)
                for S in src.words(Ms, i):
                    y = L.reduce(cartier_inverse_form(src.basis_form(Ms, S)))
                    rows.append(L.vector(y, M, i))
            cart = howell_form(rows + B, L.modulus, len(L.words(M, i)))
            assert cart.rows == fil.rows, (M, i)
