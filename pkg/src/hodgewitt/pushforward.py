"""Traces along ``t = u * t'^e`` and the induced pushforward of forms.

The source ring is the target ring with ``t`` renamed to ``t'``; the unit
``u`` may involve only the other variables.  The source is then free over
the target with basis ``1, t', ..., t'^(e-1)`` because ``t'^e = t / u``.

On functions the pushforward is the trace of multiplication.  On forms,
write ``w' = a + b ^ dlog t'`` with a, b free of ``dlog t'``; the first part
is pushed coefficientwise by the trace, and ``h' dlog t'`` goes to
``h (dlog t - dlog u)`` where ``h`` is determined by the residue pairing
``res_t(h t^-m) = res_t'(h' u^-m t'^(-e m))``.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .complexes import Complex, ComplexSpec, DegreeWindow
from .errors import NotAUnit, UnsupportedSpec, WindowError
from .forms import LogForm, Word, pole_membership, split_top_variable
from .laurent import LaurentPoly, LaurentRing, hom, invert_unit, substitute, unit_decomposition
from .report import Report
from .zpn import ceil_rat


class FiniteCover:
    """The finite map ``t = u * t'^e`` between Laurent rings over Z/p^N."""

    def __init__(self, target: LaurentRing, t: str, e: int, u=None, new_var: Optional[str] = None):
        if e < 1:
            raise ValueError(f"ramification degree must be >= 1, got {e}")
        k = target.roster.index(t)
        if not target.roster.is_log(k):
            raise ValueError(f"{t} is not a log variable")
        new_var = new_var or t + "'"
        if new_var in target.roster.names:
            raise ValueError(f"{new_var} already names a target variable")
        self.target = target
        self.t = t
        self.k = k
        self.e = e
        self.tp = new_var
        self.source = target.with_roster(target.roster.rename(t, new_var))
        if u is None:
            u = self.source.one()
        elif isinstance(u, str):
            u = self.source.parse(u)
        if u.ring != self.source:
            raise UnsupportedSpec(f"unit must live in {self.source}")
        for ex in u.terms:
            if ex[k]:
                raise UnsupportedSpec(f"the unit {u.to_text()} may not involve {new_var}")
        try:
            unit_decomposition(u)
        except NotAUnit as exc:
            raise NotAUnit(f"{u.to_text()} is not a unit; the cover is not finite free of rank {e}") from exc
        self.u = u
        self.u_target = LaurentPoly(target, u.terms)
        self.u_target_inv = invert_unit(self.u_target)
        tg = target.gen(t)
        self.t1 = tg * self.u_target_inv  # t'^e written in the target
        self.t1_inv = self.u_target * target.monomial(tuple(-1 if j == k else 0 for j in range(target.nvars)))
        self._t1_pow: Dict[int, LaurentPoly] = {0: target.one()}
        self._dlog_u_target = LogForm.function(self.u_target).d().scale(self.u_target_inv)
        self._dlog_u_source = LogForm.function(u).d().scale(invert_unit(u))

    def __repr__(self):
        return f"FiniteCover({self.t} = ({self.u.to_text()}) * {self.tp}^{self.e} over {self.target.modulus})"

    def describe(self) -> str:
        unit = "" if self.u == self.source.one() else f"({self.u.to_text()}) * "
        return f"{self.t} = {unit}{self.tp}^{self.e}"

    def t1_power(self, m: int) -> LaurentPoly:
        if m not in self._t1_pow:
            base = self.t1 if m > 0 else self.t1_inv
            self._t1_pow[m] = base ** abs(m)
        return self._t1_pow[m]

    def reduce(self, n: int) -> "FiniteCover":
        """The same cover over Z/p^n."""
        tgt = self.target.with_precision(n)
        src = self.source.with_precision(n)
        return FiniteCover(tgt, self.t, self.e, LaurentPoly(src, self.u.terms), self.tp)

    # -- pullback ------------------------------------------------------

    def pullback(self, g: LaurentPoly) -> LaurentPoly:
        if g.ring != self.target:
            raise ValueError(f"expected a function on {self.target}")
        return substitute(g, self.t, self.u, self.tp, self.e)

    def pullback_form(self, omega: LogForm) -> LogForm:
        src = self.source
        dlog_t = LogForm.basis(src, [self.tp]).scale(self.e) + self._dlog_u_source
        out = LogForm.zero(src, omega.degree)
        names = src.roster.names
        for S, f in omega.comps.items():
            piece = LogForm.function(self.pullback(f))
            for j in S:
                piece = piece.wedge(dlog_t if j == self.k else LogForm.basis(src, [names[j]]))
            out = out + piece
        return out

    # -- functions -----------------------------------------------------

    def _by_tp_exponent(self, a: LaurentPoly) -> Dict[int, LaurentPoly]:
        k = self.k
        groups: Dict[int, Dict] = {}
        for ex, c in a.terms.items():
            groups.setdefault(ex[k], {})[ex[:k] + (0,) + ex[k + 1:]] = c
        return {m: LaurentPoly(self.target, t) for m, t in groups.items()}

    def trace0(self, a: LaurentPoly) -> LaurentPoly:
        """Trace of multiplication by a; ``t'^m g -> e g (t/u)^(m/e)`` if e | m, else 0."""
        if a.ring != self.source:
            raise ValueError(f"expected a function on {self.source}")
        out = self.target.zero()
        for m, g in self._by_tp_exponent(a).items():
            if m % self.e == 0:
                out = out + (g * self.t1_power(m // self.e)).scale(self.e)
        return out

    def multiplication_matrix(self, a: LaurentPoly) -> List[List[LaurentPoly]]:
        """Matrix of multiplication by a on the basis ``t'^0 .. t'^(e-1)`` (column j = image of t'^j)."""
        e = self.e
        cols = []
        for j in range(e):
            col = [self.target.zero() for _ in range(e)]
            for m, g in self._by_tp_exponent(a).items():
                q, rem = divmod(m + j, e)
                col[rem] = col[rem] + g * self.t1_power(q)
            cols.append(col)
        return [[cols[j][i] for j in range(e)] for i in range(e)]

    def trace0_by_matrix(self, a: LaurentPoly) -> LaurentPoly:
        mat = self.multiplication_matrix(a)
        out = self.target.zero()
        for i in range(self.e):
            out = out + mat[i][i]
        return out

    def residue_coefficient(self, h: LaurentPoly) -> LaurentPoly:
        """The h in ``trace1(h' dlog t') = h dlog t`` from the residue pairing.

        ``coefficient of t^m in h`` is the coefficient of ``t'^(e m)`` in ``h' u^-m``.
        """
        if h.ring != self.source:
            raise ValueError(f"expected a function on {self.source}")
        k = self.k
        out = self.target.zero()
        ms = sorted({ex[k] // self.e for ex in h.terms if ex[k] % self.e == 0})
        uinv = invert_unit(self.u)
        for m in ms:
            prod = h * (uinv ** m if m >= 0 else self.u ** (-m))
            part = self._by_tp_exponent(prod).get(self.e * m)
            if part is None:
                continue
            out = out + part.shift(tuple(m if j == k else 0 for j in range(self.target.nvars)))
        return out

    def trace1(self, omega: LogForm) -> LogForm:
        """``h' dlog t' -> h dlog t`` (the part of the pushforward along dlog t)."""
        if omega.degree != 1 or set(omega.comps) - {(self.k,)}:
            raise ValueError("trace1 takes a multiple of dlog t'")
        h = self.residue_coefficient(omega.component((self.k,)))
        return LogForm(self.target, 1, {(self.k,): h})

    # -- forms ---------------------------------------------------------

    def pushforward(self, omega: LogForm) -> LogForm:
        if omega.ring != self.source:
            raise ValueError(f"expected a form on {self.source}")
        alpha, beta = split_top_variable(omega, self.tp)
        tgt = self.target
        out = LogForm(tgt, omega.degree, {S: self.trace0(f) for S, f in alpha.comps.items()})
        if beta:
            hb = LogForm(tgt, beta.degree, {S: self.residue_coefficient(f) for S, f in beta.comps.items()})
            dlog_t = LogForm.basis(tgt, [self.t]) - self._dlog_u_target
            out = out + hb.wedge(dlog_t)
        return out

    def pushforward_class_map(self, src: Complex, dst: Complex):
        return lambda w: dst.reduce(self.pushforward(w.change_ring(self.source) if w.ring != self.source else w))


# --------------------------------------------------------------------------
# verification helpers


def compose_covers(first: FiniteCover, second: FiniteCover) -> FiniteCover:
    """``t = u1 t'^e1`` then ``t' = u2 t''^e2`` as ``t = u1 u2^e1 t''^(e1 e2)``."""
    if second.target != first.source or second.t != first.tp:
        raise ValueError("covers do not compose")
    direct_src = second.source.with_roster(first.target.roster.rename(first.t, second.tp))
    u1 = LaurentPoly(direct_src, first.u.terms)
    u2 = LaurentPoly(direct_src, second.u.terms)
    return FiniteCover(first.target, first.t, first.e * second.e, u1 * u2 ** first.e, second.tp)


def lemma43_report(cover: FiniteCover, rs, window: DegreeWindow, degrees=None) -> Report:
    """Pole bounds for pushforwards of monomial generators.

    (1) ``t'^k`` with ``k >= 1`` lands in ``t Omega(log t)``;
    (2) for each r, ``k >= -ceil(r) + 1`` lands in ``t^(-ceil(r/e)+1) Omega(log t)``.
    ``window`` bounds the source coefficient exponents.
    """
    src = cover.source
    d = src.nvars
    degrees = range(d + 1) if degrees is None else degrees
    rep = Report({"cover": cover.describe(), "p": src.p, "N": src.N, "r": [str(Fraction(r)) for r in rs]},
                 window=window.to_list())
    k = cover.k
    words = {i: list(itertools.combinations(range(d), i)) for i in degrees}
    bad1 = None
    bad2 = {Fraction(r): None for r in rs}
    count = 0
    for ex in window:
        for i in degrees:
            for S in words[i]:
                x = LogForm.monomial(src, ex, S)
                y = cover.pushforward(x)
                count += 1
                if ex[k] >= 1 and not pole_membership(y, {cover.t: -1}) and bad1 is None:
                    bad1 = f"{x.to_text()} -> {y.to_text()}"
                for r in bad2:
                    if ex[k] >= -ceil_rat(r) + 1:
                        bound = ceil_rat(r / cover.e) - 1
                        if not pole_membership(y, {cover.t: bound}) and bad2[r] is None:
                            bad2[r] = f"{x.to_text()} -> {y.to_text()}"
    rep.add("positive order is preserved", bad1 is None, bad1)
    for r, b in bad2.items():
        rep.add(f"pole bound at r={r}", b is None, b)
    rep.extra["generators"] = count
    return rep


def random_poly(ring: LaurentRing, rng: random.Random, window, terms: int = 3) -> LaurentPoly:
    out = ring.zero()
    for _ in range(terms):
        ex = tuple(rng.randint(lo, hi) for lo, hi in window)
        out = out + ring.monomial(ex, rng.randrange(ring.q))
    return out


def random_form(ring: LaurentRing, rng: random.Random, degree: int, window, terms: int = 3) -> LogForm:

    words = list(itertools.combinations(range(ring.nvars), degree))
    out = LogForm.zero(ring, degree)
    for _ in range(terms):
        S = rng.choice(words)
        out = out + LogForm(ring, degree, {S: random_poly(ring, rng, window, 1)})
    return out


def projection_formula_report(cover: FiniteCover, rng: random.Random, pairs: int, window) -> Report:
    """``f_*(f^* w ^ eta') = w ^ f_*(eta')`` on random pairs of forms."""
    tgt, src = cover.target, cover.source
    d = tgt.nvars
    rep = Report({"cover": cover.describe(), "p": tgt.p, "N": tgt.N, "pairs": pairs})
    bad_proj = bad_ff = None
    for _ in range(pairs):
        i = rng.randint(0, d)
        j = rng.randint(0, d - i)
        w = random_form(tgt, rng, i, window, rng.randint(1, 3))
        eta = random_form(src, rng, j, window, rng.randint(1, 3))
        lhs = cover.pushforward(cover.pullback_form(w).wedge(eta))
        rhs = w.wedge(cover.pushforward(eta))
        if lhs != rhs and bad_proj is None:
            bad_proj = f"w = {w.to_text()}, eta' = {eta.to_text()}: {lhs.to_text()} vs {rhs.to_text()}"
        ff = cover.pushforward(cover.pullback_form(w))
        if ff != w.scale(cover.e) and bad_ff is None:
            bad_ff = f"f_* f^* ({w.to_text()}) = {ff.to_text()}"
    rep.add("projection formula", bad_proj is None, bad_proj)
    rep.add("f_* f^* = e", bad_ff is None, bad_ff)
    return rep


def laurent_spec(roster, p: int, n: int, t: str) -> ComplexSpec:
    """The complex with no bound along t and no poles along the other log variables."""
    poles = {v.name: 0 for v in roster if v.log}
    poles[t] = None
    return ComplexSpec.make(roster, p, n, poles)


def check_lift_independence(cover_a: FiniteCover, cover_b: FiniteCover, i: int, n: int, window: DegreeWindow) -> Report:
    """Two lifts of the same cover mod p induce the same map on H^i over Z/p^n."""
    if cover_a.e != cover_b.e or cover_a.t != cover_b.t or cover_a.target.roster != cover_b.target.roster:
        raise ValueError("covers differ in more than the lift of the unit")
    ua = cover_a.u.reduce(1)
    ub = LaurentPoly(cover_a.source, cover_b.u.terms).reduce(1)
    if ua != ub:
        raise ValueError(f"units {cover_a.u.to_text()} and {cover_b.u.to_text()} differ mod p")
    a, b = cover_a.reduce(n), cover_b.reduce(n)
    p = a.target.p
    src = Complex(laurent_spec(a.source.roster, p, n, a.tp))
    dst = Complex(laurent_spec(a.target.roster, p, n, a.t))
    rep = Report({"covers": [cover_a.describe(), cover_b.describe()], "p": p, "n": n},
                 degree=i, window=window.to_list())
    gens = src.cohomology_basis(i, window)
    bad_closed = bad_eq = None
    for g in gens:
        x = a.pushforward(g.rep)
        y = b.pushforward(g.rep)
        if not (dst.is_closed(x) and dst.is_closed(y)) and bad_closed is None:
            bad_closed = f"pushforward of {g.rep.to_text()} not closed"
        if not dst.same_class(x, y) and bad_eq is None:
            bad_eq = f"{g.rep.to_text()}: {x.to_text()} vs {y.to_text()}"
    rep.add("pushforwards of cycles are cycles", bad_closed is None, bad_closed)
    rep.add("induced maps agree", bad_eq is None, bad_eq)
    rep.classes = [str(g) for g in gens]
    return rep
