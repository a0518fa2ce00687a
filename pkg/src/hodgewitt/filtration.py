"""Ramification filtrations on chart cohomology and modulus sections.

On the chart with distinguished log variable t, a class of the complex
with no bound along t lies in ``Fil'_r`` when it comes from
``t^(-ceil(r)+1) Omega(log)`` (r > 0) or from the complex with no pole at
all along t (r = 0).  ``Fil_r`` is ``Fil'_(p ceil(r))``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence

from .complexes import CohClass, Complex, ComplexSpec, DegreeWindow, exactseq_maps
from .errors import NotClosedError, UnsupportedSpec
from .forms import LogForm, split_top_variable
from .laurent import LaurentPoly, LaurentRing, VarRoster
from .pushforward import FiniteCover, laurent_spec
from .report import Report
from .zpn import ceil_rat, howell_form

VARIANTS = ("Fil'", "Fil")


def _check_r(r) -> Fraction:
    r = Fraction(r)
    if r < 0:
        raise ValueError(f"r must be nonnegative, got {r}")
    return r


class FilChart:
    """Filtration data for one roster, distinguished log variable and precision."""

    def __init__(self, roster: VarRoster, p: int, n: int, t: Optional[str] = None):
        if t is None:
            if not roster.log_indices:
                raise UnsupportedSpec("the chart needs a log variable")
            t = roster.names[roster.log_indices[0]]
        if not roster.vars[roster.index(t)].log:
            raise UnsupportedSpec(f"{t} is not a log variable")
        self.roster, self.p, self.n, self.t = roster, p, n, t
        self.laurent = Complex(laurent_spec(roster, p, n, t))
        self._subs: Dict[int, Complex] = {}

    @property
    def ring(self) -> LaurentRing:
        return self.laurent.ring

    def sub_spec(self, r) -> ComplexSpec:
        """The complex whose image is ``Fil'_r``."""
        r = _check_r(r)
        poles = {v.name: 0 for v in self.roster if v.log}
        if r == 0:
            return ComplexSpec.make(self.roster, self.p, self.n, poles, regular=[self.t])
        poles[self.t] = ceil_rat(r) - 1
        return ComplexSpec.make(self.roster, self.p, self.n, poles)

    def _sub(self, r) -> Complex:
        r = _check_r(r)
        key = -1 if r == 0 else ceil_rat(r) - 1
        if key not in self._subs:
            self._subs[key] = Complex(self.sub_spec(r))
        return self._subs[key]

    def prime_index(self, r, variant: str) -> Fraction:
        r = _check_r(r)
        if variant == "Fil'":
            return r
        if variant == "Fil":
            return Fraction(self.p * ceil_rat(r))
        raise ValueError(f"unknown variant {variant!r}")

    def is_class(self, omega: LogForm) -> bool:
        return self.laurent.is_closed(omega)

    def fil_prime(self, omega: LogForm, r) -> bool:
        omega = self.laurent.reduce(omega)
        if not self.laurent.is_closed(omega):
            raise NotClosedError(f"{omega.to_text()} is not closed")
        return self.laurent.image_contains(self._sub(r), omega)

    def fil(self, omega: LogForm, r) -> bool:
        return self.fil_prime(omega, self.prime_index(r, "Fil"))

    def membership(self, omega: LogForm, r, variant: str = "Fil'") -> bool:
        return self.fil_prime(omega, self.prime_index(r, variant))

    def generators(self, r, variant: str, i: int, window: DegreeWindow) -> List[CohClass]:
        """Cohomology generators of the complex whose image is the requested piece."""
        return self._sub(self.prime_index(r, variant)).cohomology_basis(i, window)


def fil_membership(omega: LogForm, r, variant: str = "Fil'", t: Optional[str] = None, n: Optional[int] = None) -> bool:
    ring = omega.ring
    chart = FilChart(ring.roster, ring.p, n or ring.N, t)
    return chart.membership(omega, r, variant)


def verify_trace_inclusion(cover: FiniteCover, r, i: int, n: int, window: DegreeWindow,
                           variants: Sequence[str] = VARIANTS) -> Report:
    """Pushforwards of generators of ``Fil_r`` on the source lie in ``Fil_(r/e)`` on the target."""
    r = _check_r(r)
    cov = cover.reduce(n)
    p = cov.target.p
    src = FilChart(cov.source.roster, p, n, cov.tp)
    dst = FilChart(cov.target.roster, p, n, cov.t)
    rep = Report({"cover": cov.describe(), "p": p, "n": n, "r": str(r)}, degree=i, window=window.to_list())
    for variant in variants:
        bad_closed = bad_in = None
        gens = src.generators(r, variant, i, window)
        for g in gens:
            y = dst.laurent.reduce(cov.pushforward(g.rep))
            if not dst.laurent.is_closed(y):
                bad_closed = bad_closed or f"{g.rep.to_text()} -> {y.to_text()}"
                continue
            if not dst.membership(y, r / cov.e, variant):
                bad_in = bad_in or f"{g.rep.to_text()} -> {y.to_text()} not in {variant}_{r / cov.e}"
        rep.add(f"{variant}: pushforward closed ({len(gens)} generators)", bad_closed is None, bad_closed)
        rep.add(f"{variant}_{r} -> {variant}_{r / cov.e}", bad_in is None, bad_in)
    return rep


# --------------------------------------------------------------------------
# modulus sections on log smooth charts


@dataclass
class ModulusChart:
    """``(A^d, sum b_a {x_a = 0})`` with rational multiplicities on the log variables."""

    roster: VarRoster
    b: Dict[str, Fraction]
    p: int
    n: int

    def __post_init__(self):
        self.b = {k: Fraction(v) for k, v in self.b.items()}
        for name, v in self.b.items():
            if not self.roster.vars[self.roster.index(name)].log:
                raise ValueError(f"{name} is not a log variable")
            if v <= 0:
                raise ValueError("multiplicities must be positive")

    def laurent(self) -> Complex:
        return Complex(ComplexSpec.make(self.roster, self.p, self.n, {a: None for a in self.b}))

    def spec_upper(self) -> ComplexSpec:
        """``x^(-p ceil(b) + 1) Omega(log)``."""
        return ComplexSpec.make(self.roster, self.p, self.n, {a: self.p * ceil_rat(v) - 1 for a, v in self.b.items()})

    def spec_lower(self) -> ComplexSpec:
        """``x^(-p (ceil(b) - 1)) Omega(log)``."""
        return ComplexSpec.make(self.roster, self.p, self.n, {a: self.p * (ceil_rat(v) - 1) for a, v in self.b.items()})

    def describe(self) -> dict:
        return {"vars": str(self.roster), "b": {k: str(v) for k, v in self.b.items()}, "p": self.p, "n": self.n}


def modulus_sections(chart: ModulusChart, i: int, window: DegreeWindow) -> List[CohClass]:
    return Complex(chart.spec_upper()).cohomology_basis(i, window)


def verify_local_ls(chart: ModulusChart, i: int, window: DegreeWindow) -> Report:
    """Both pole normalisations have the same image in the cohomology with no bound."""
    L = chart.laurent()
    up = Complex(chart.spec_upper())
    lo = Complex(chart.spec_lower())
    rep = Report(chart.describe(), degree=i, window=window.to_list())
    bad = None
    for M in L._window_iter(window):
        a = L.image_span(up, M, i)
        b = L.image_span(lo, M, i)
        if a.rows != b.rows:
            bad = f"images differ at multidegree {M}"
            break
    rep.add("image equality of the two normalisations", bad is None, bad)
    bad = None
    for M in L._window_iter(window):
        if not (L.inclusion_injective(up, M, i) and L.inclusion_injective(lo, M, i)):
            bad = f"restriction to the open part not injective at {M}"
            break
    rep.add("both inject into the cohomology with no bound", bad is None, bad)
    return rep


@dataclass
class Certificate:
    c: int
    n0: int
    omega2: LogForm
    omega3: LogForm
    alpha: LogForm
    beta: LogForm
    nonzero: bool

    def to_dict(self) -> dict:
        return {
            "pole_step": self.c,
            "level": self.n0,
            "representative": self.omega2.to_text(),
            "graded": self.omega3.to_text(),
            "alpha": self.alpha.to_text(),
            "beta": self.beta.to_text(),
            "nonzero": self.nonzero,
        }


def membership_two_sided(chart: ModulusChart, omega: LogForm, max_steps: int = 64) -> dict:
    """Either "member", or a nonzero class in a graded quotient witnessing non-membership.

    For a class outside the sections, take the least c > ceil(b) with the
    class coming from ``x^(-p(c-1)) Omega``, a representative omega2 there, its
    image in ``F = x^(-p(c-1)) Omega / x^(-p(c-1)+1) Omega``, the least level
    n0 where it survives in ``F mod p^n0``, and finally the element omega3 of
    ``F mod p`` with ``p^(n0-1) omega3 = omega2 - d(eta)``.
    """
    if len(chart.b) != 1:
        raise UnsupportedSpec("certificates are produced for a single divisor")
    (x, bx), = chart.b.items()
    p, n = chart.p, chart.n
    L = chart.laurent()
    omega = L.reduce(omega)
    if not L.is_closed(omega):
        raise NotClosedError(f"{omega.to_text()} is not closed")
    up = Complex(chart.spec_upper())
    if L.image_contains(up, omega):
        return {"status": "member"}
    k = chart.roster.index(x)
    base = {v.name: 0 for v in chart.roster if v.log}
    c = ceil_rat(bx) + 1
    while True:
        if c > ceil_rat(bx) + max_steps:
            raise RuntimeError("no pole step found; raise max_steps")
        sub = Complex(ComplexSpec.make(chart.roster, p, n, {**base, x: p * (c - 1)}))
        omega2 = L.image_preimage(sub, omega)
        if omega2 is not None:
            break
        c += 1
    P = p * (c - 1)

    def graded(m: int) -> Complex:
        return Complex(ComplexSpec.make(chart.roster, p, n, {**base, x: P}, sub={**base, x: P - 1}, n_red=m))

    Fn = graded(n)
    if Fn.is_exact(omega2):
        raise AssertionError("class vanishes in the graded piece, contradicting minimality of the pole step")
    n0 = next(m for m in range(1, n + 1) if not graded(m).is_exact(omega2.change_ring(graded(m).ring)))
    F1 = graded(1)
    if n0 == 1:
        omega3 = F1.reduce(omega2.change_ring(F1.ring))
    else:
        Fm1 = graded(n0 - 1)
        eta = Fm1.primitive(omega2.change_ring(Fm1.ring))
        Fn0 = graded(n0)
        eta_lift = LogForm(Fn0.ring, eta.degree, {S: LaurentPoly(Fn0.ring, f.terms) for S, f in eta.comps.items()})
        delta = Fn0.reduce(omega2.change_ring(Fn0.ring)) - Fn0.differential(eta_lift)
        comps = {}
        for S, f in delta.comps.items():
            g = f.divide_by_p_power(n0 - 1)
            if g is None:
                raise AssertionError("difference not divisible by p^(n0-1)")
            comps[S] = LaurentPoly(F1.ring, g.terms)
        omega3 = F1.reduce(LogForm(F1.ring, delta.degree, comps))
    nonzero = F1.is_closed(omega3) and not F1.is_exact(omega3)
    alpha, beta = _graded_parts(chart, x, P, omega3)
    return {"status": "outside", "certificate": Certificate(c, n0, omega2, omega3, alpha, beta, nonzero)}


def _graded_parts(chart: ModulusChart, x: str, P: int, omega3: LogForm):
    """Strip ``x^-P`` and split along dlog x into forms on the divisor."""
    spec = ComplexSpec.make(chart.roster, chart.p, chart.n, {x: P}, sub={x: P - 1}, n_red=1)
    f, g = exactseq_maps(spec)
    alpha = g.apply(omega3)
    _, beta_full = split_top_variable(omega3, x)
    k = chart.roster.index(x)
    D = g.dst.ring
    beta = LogForm(D, beta_full.degree, {
        tuple(j if j < k else j - 1 for j in S): LaurentPoly(D, {e[:k] + e[k + 1:]: c for e, c in h.terms.items()})
        for S, h in beta_full.comps.items()
    })
    return alpha, beta


def graded_certificate_nonzero(chart: ModulusChart, cert: Certificate) -> bool:
    """Second route: the class is nonzero iff alpha or beta is a nonzero class on the divisor."""
    (x, _), = chart.b.items()
    spec = ComplexSpec.make(chart.roster, chart.p, chart.n, {x: 1}, sub={x: 0}, n_red=1)
    f, g = exactseq_maps(spec)
    D = g.dst
    a_nz = not cert.alpha.is_zero() and not D.is_exact(cert.alpha)
    b_nz = not cert.beta.is_zero() and not D.is_exact(cert.beta)
    return (D.is_closed(cert.alpha) and D.is_closed(cert.beta)) and (a_nz or b_nz)


def verify_ls_certificates(chart: ModulusChart, i: int, window: DegreeWindow) -> Report:
    """Every generator of the unbounded cohomology is a member or carries a nonzero certificate."""
    L = chart.laurent()
    rep = Report(chart.describe(), degree=i, window=window.to_list())
    members = outside = 0
    bad = None
    for g in L.cohomology_basis(i, window):
        res = membership_two_sided(chart, g.rep)
        if res["status"] == "member":
            members += 1
            continue
        outside += 1
        cert = res["certificate"]
        if not (cert.nonzero and graded_certificate_nonzero(chart, cert)) and bad is None:
            bad = f"{g.rep.to_text()}: certificate {cert.to_dict()}"
    rep.add(f"nonzero certificates ({outside} outside, {members} members)", bad is None, bad)
    rep.extra["members"] = members
    rep.extra["outside"] = outside
    return rep
