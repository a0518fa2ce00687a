"""Hypothesis strategies for polynomials and forms."""

import itertools

from hypothesis import strategies as st

from hodgewitt.forms import LogForm
from hodgewitt.laurent import LaurentPoly, LaurentRing, VarRoster

ROSTERS = {
    1: VarRoster.parse("t:log"),
    2: VarRoster.parse("t:log, s:plain"),
    3: VarRoster.parse("t:log, u:log, s:plain"),
}


def exps_for(roster, lo=-3, hi=3):
    return st.tuples(*[st.integers(lo, hi) if v.log else st.integers(0, hi) for v in roster])


def polys(ring: LaurentRing, max_terms=6, lo=-3, hi=3):
    return st.dictionaries(exps_for(ring.roster, lo, hi), st.integers(0, ring.q - 1), max_size=max_terms).map(
        lambda d: LaurentPoly(ring, d))


def words(d, degree):
    return st.sampled_from(list(itertools.combinations(range(d), degree)))


def forms(ring: LaurentRing, degree: int, max_terms=4, lo=-3, hi=3):
    d = ring.nvars
    if degree > d:
        return st.just(LogForm.zero(ring, degree))
    return st.lists(st.tuples(words(d, degree), polys(ring, 3, lo, hi)), max_size=max_terms).map(
        lambda parts: _assemble(ring, degree, parts))


def _assemble(ring, degree, parts):
    comps = {}
    for S, f in parts:
        comps[S] = comps.get(S, ring.zero()) + f
    return LogForm(ring, degree, comps)


@st.composite
def ring_and_poly(draw, ps=(2, 3), Ns=(1, 2, 3, 4), nvars=(1, 2, 3)):
    p = draw(st.sampled_from(ps))
    N = draw(st.sampled_from(Ns))
    ring = LaurentRing(ROSTERS[draw(st.sampled_from(nvars))], p, N)
    return ring
