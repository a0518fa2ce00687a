import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from hodgewitt.errors import DimensionMismatch, ModulusMismatch
from hodgewitt.zpn import (
    Modulus,
    Scalar,
    ceil_identity,
    ceil_rat,
    howell_form,
    is_prime,
    left_kernel,
    span_membership,
)

from oracles import kernel_set, span_set


def test_is_prime():
    assert [x for x in range(20) if is_prime(x)] == [2, 3, 5, 7, 11, 13, 17, 19]


def test_modulus_rejects_composite():
    with pytest.raises(ValueError):
        Modulus(4, 2)


def test_scalar_arithmetic_and_valuation():
    m = Modulus(3, 2)
    x = Scalar(6, m)
    assert x.valuation() == 1
    assert not x.is_unit()
    assert (x * 3).value == 0
    assert Scalar(2, m).inverse().value == 5
    with pytest.raises(Exception):
        x.inverse()


def test_mixed_moduli_rejected():
    with pytest.raises(ModulusMismatch):
        Scalar.of(1, 2, 2) + Scalar.of(1, 3, 1)


def test_zero_matrix_has_empty_form():
    h = howell_form([[0]], Modulus(2, 2))
    assert h.rows == ()


def test_identity_is_its_own_form():
    ident = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    h = howell_form(ident, Modulus(3, 2))
    assert [list(r) for r in h.rows] == ident


def test_z4_example_against_enumeration():
    rows = [[2, 0], [0, 2]]
    h = howell_form(rows, Modulus(2, 2))
    assert span_set(rows, 4, 2) == {(0, 0), (2, 0), (0, 2), (2, 2)}
    assert h.contains([2, 2])
    assert not h.contains([1, 0])


def test_z9_example():
    h = howell_form([[3]], Modulus(3, 2))
    c = span_membership([6], h)
    assert c is not None and (c[0] * 3) % 9 == 6
    assert span_membership([1], h) is None


def test_zero_vector_and_first_row():
    rows = [[1, 2, 0], [0, 3, 3]]
    h = howell_form(rows, Modulus(3, 2))
    assert span_membership([0, 0, 0], h) == [0, 0]
    c = span_membership(rows[0], h)
    assert c is not None


def test_dimension_mismatch():
    h = howell_form([[1, 0]], Modulus(2, 1))
    with pytest.raises(DimensionMismatch):
        h.contains([1, 0, 0])
    with pytest.raises(DimensionMismatch):
        howell_form([[1, 0], [1]], Modulus(2, 1))


def _distinct_spans(q, ncols):
    """One generating set (<= 2 vectors) for every distinct span in (Z/q)^ncols."""
    vecs = list(itertools.product(range(q), repeat=ncols))
    code = {v: k for k, v in enumerate(vecs)}
    add = [[code[tuple((x + y) % q for x, y in zip(a, b))] for b in vecs] for a in vecs]
    mul = [[code[tuple(c * x % q for x in a)] for a in vecs] for c in range(q)]
    seen = {}
    for a in range(len(vecs)):
        for b in range(a, len(vecs)):
            span = frozenset(add[mul[c][a]][mul[d][b]] for c in range(q) for d in range(q))
            if span not in seen:
                seen[span] = [list(vecs[a]), list(vecs[b])]
    return vecs, code, seen


@pytest.mark.parametrize("p,N", [(2, 2), (3, 2)])
@pytest.mark.parametrize("ncols", [1, 2, 3])
def test_membership_exhaustive_small(p, N, ncols):
    # every span with <= 2 generators and <= ncols columns over Z/4 and Z/9
    q = p ** N
    mod = Modulus(p, N)
    vecs, code, spans = _distinct_spans(q, ncols)
    for span, rows in spans.items():
        h = howell_form(rows, mod, ncols)
        for v in vecs:
            c = span_membership(v, h)
            assert (c is not None) == (code[v] in span), (rows, v)
            if c is not None:
                combo = tuple(sum(a * r[j] for a, r in zip(c, rows)) % q for j in range(ncols))
                assert combo == v
        # the pivot valuations give the size of the span
        assert p ** sum(N - v for _, v in h.pivots) == len(span)


matrices = st.integers(1, 3).flatmap(
    lambda ncols: st.lists(st.lists(st.integers(0, 26), min_size=ncols, max_size=ncols), min_size=0, max_size=4)
    .map(lambda rows: (rows, ncols)))


@given(matrices, st.sampled_from([(2, 3), (3, 2), (3, 3)]))
def test_howell_idempotent(mat, pn):
    rows, ncols = mat
    mod = Modulus(*pn)
    h = howell_form(rows, mod, ncols)
    h2 = howell_form([list(r) for r in h.rows], mod, ncols)
    assert h2.rows == h.rows


@given(matrices, st.sampled_from([(2, 2), (3, 1), (2, 3)]))
def test_canonical_form_depends_only_on_span(mat, pn):
    rows, ncols = mat
    mod = Modulus(*pn)
    q = mod.q
    rows = [[x % q for x in r] for r in rows]
    h = howell_form(rows, mod, ncols)
    # adding a combination of rows and reversing keeps the span
    extra = [sum(r[j] for r in rows) % q for j in range(ncols)] if rows else [0] * ncols
    h2 = howell_form(list(reversed(rows)) + [extra], mod, ncols)
    assert h.rows == h2.rows


@given(matrices, st.sampled_from([(2, 2), (3, 1)]))
def test_left_kernel_against_enumeration(mat, pn):
    rows, ncols = mat
    mod = Modulus(*pn)
    q = mod.q
    rows = [[x % q for x in r] for r in rows[:3]]
    ker = left_kernel(rows, mod, ncols)
    expected = kernel_set(rows, q, ncols)
    got = span_set(ker, q, len(rows)) if rows else {()}
    assert got == expected


def test_ceil_examples():
    assert ceil_rat(Fraction(5, 2)) == 3
    assert ceil_rat(0) == 0
    assert ceil_identity(Fraction(5, 2), 3)
    assert ceil_rat(Fraction(ceil_rat(Fraction(5, 2)), 3)) == 1 == ceil_rat(Fraction(5, 6))
    assert ceil_identity(Fraction(7, 3), 1) and ceil_rat(Fraction(7, 3)) == 3


@given(st.integers(-10 ** 4, 10 ** 4), st.integers(1, 100))
def test_ceil_matches_math_ceil(a, b):
    assert ceil_rat(Fraction(a, b)) == math.ceil(Fraction(a, b))


@given(st.integers(0, 10 ** 4), st.integers(1, 100), st.integers(1, 50))
def test_ceil_identity_property(a, b, e):
    r = Fraction(a, b)
    assert ceil_identity(r, e)
    assert math.ceil(Fraction(math.ceil(r), e)) == math.ceil(r / e)
