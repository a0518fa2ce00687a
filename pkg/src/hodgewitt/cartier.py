"""The inverse Cartier operator over F_p and the n = 1 filtration correspondence."""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Optional

from .complexes import Complex, ComplexSpec, CohClass, DegreeWindow, span_length
from .errors import PrecisionError
from .forms import LogForm
from .laurent import LaurentPoly, VarRoster, frobenius_lift
from .report import Report
from .zpn import ceil_rat, howell_form


def cartier_inverse_form(omega: LogForm) -> LogForm:
    """``f -> f^p``, ``dlog t -> dlog t``, ``ds -> s^(p-1) ds`` on each component."""
    ring = omega.ring
    if ring.N != 1:
        raise PrecisionError(f"the inverse Cartier operator needs coefficients in F_p, got {ring}")
    p = ring.p
    comps = {}
    for S, f in omega.comps.items():
        sh = [0] * ring.nvars
        for k in S:
            if not ring.roster.is_log(k):
                sh[k] = p - 1
        comps[S] = frobenius_lift(f).shift(tuple(sh))
    return LogForm(ring, omega.degree, comps)


def cartier_inverse(omega: LogForm, spec: Optional[ComplexSpec] = None) -> CohClass:
    """The class of the inverse Cartier image, in ``spec`` (default: the Laurent complex)."""
    img = cartier_inverse_form(omega)
    if spec is None:
        ring = omega.ring
        spec = ComplexSpec(ring.roster, ring.p, 1, tuple(None if v.log else 0 for v in ring.roster))
    c = Complex(spec)
    img = c.reduce(img)
    if not c.is_closed(img):
        raise AssertionError(f"inverse Cartier image {img.to_text()} is not closed")
    return CohClass(spec, omega.degree, img)


def correspondence_poles(r) -> tuple:
    """Pole orders (source, target) for the n = 1 correspondence at r.

    Source: ``t^(-ceil(r)+1) Omega(log)``; target: ``H(t^(-p ceil(r)+1) Omega(log))``.
    At r = 0 both are taken with pole order 0 (the classical isomorphism).
    """
    r = Fraction(r)
    if r < 0:
        raise ValueError("r must be nonnegative")
    if r == 0:
        return 0, 0
    c = ceil_rat(r)
    return c - 1, None  # target depends on p


def verify_fil_correspondence(roster: VarRoster, p: int, r, i: int, window: DegreeWindow, t: Optional[str] = None) -> Report:
    """Rank comparison of the source forms and the target cohomology, multidegree by multidegree.

    ``window`` bounds the target multidegrees.  At each target multidegree
    ``pM`` the number of source basis forms in multidegree M must equal the
    length of H^i, and their inverse Cartier images must be independent in
    cohomology; at multidegrees not divisible by p the cohomology must vanish.
    """
    r = Fraction(r)
    if t is None:
        t = roster.names[roster.log_indices[0]]
    src_pole, _ = correspondence_poles(r)
    tgt_pole = 0 if r == 0 else p * ceil_rat(r) - 1
    poles = {v.name: 0 for v in roster if v.log}
    src_spec = ComplexSpec.make(roster, p, 1, {**poles, t: src_pole})
    tgt_spec = ComplexSpec.make(roster, p, 1, {**poles, t: tgt_pole})
    src = Complex(src_spec)
    tgt = Complex(tgt_spec)
    rep = Report({"vars": str(roster), "p": p, "n": 1, "r": str(r), "source": src_spec.describe(),
                  "target": tgt_spec.describe()}, degree=i, window=window.to_list())
    bad_closed = bad_rank = bad_indep = bad_vanish = bad_pole = None
    checked = 0
    for M in tgt._window_iter(window):
        loc = tgt.local(M, i)
        if any(m % p for m in M):
            if loc.length and bad_vanish is None:
                bad_vanish = f"H^{i} nonzero at multidegree {M} not divisible by p"
            continue
        Ms = tuple(m // p for m in M)
        words = src.words(Ms, i)
        checked += 1
        if len(words) != loc.length and bad_rank is None:
            bad_rank = f"at {M}: {len(words)} source forms, H^{i} has length {loc.length}"
        rows = []
        for S in words:
            x = src.basis_form(Ms, S)
            y = cartier_inverse_form(x)
            if not tgt.contains(y) and bad_pole is None:
                bad_pole = f"C^-1({x.to_text()}) = {y.to_text()} leaves the target complex"
                continue
            if not tgt.is_closed(y) and bad_closed is None:
                bad_closed = f"C^-1({x.to_text()}) = {y.to_text()} is not closed"
            rows.append(tgt.vector(y, M, i))
        # independence modulo boundaries: images plus B span length(B) + #images
        h = howell_form(rows + [list(b) for b in loc.B.rows], tgt.modulus, len(loc.words))
        if span_length(h) - span_length(loc.B) != len(rows) and bad_indep is None:
            bad_indep = f"inverse Cartier images dependent in H^{i} at {M}"
    rep.add("images lie in the target complex", bad_pole is None, bad_pole)
    rep.add("images closed", bad_closed is None, bad_closed)
    rep.add("images independent in cohomology", bad_indep is None, bad_indep)
    rep.add("rank equality at multidegrees divisible by p", bad_rank is None, bad_rank)
    rep.add("cohomology vanishes off p-divisible multidegrees", bad_vanish is None, bad_vanish)
    rep.extra["multidegrees_compared"] = checked
    return rep
