"""Verification suites: each expands a run configuration into cases and runs them.

Cases are plain picklable tuples so a process pool can run them; results
are merged in case order, which keeps reports deterministic.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .cartier import verify_fil_correspondence
from .complexes import (
    Complex,
    ComplexSpec,
    DegreeWindow,
    devissage_sequence,
    exactseq_maps,
    pole_step_sequence,
    verify_exact_sequence,
    verify_homotopy,
    window_representatives,
)
from .filtration import FilChart, ModulusChart, verify_local_ls, verify_ls_certificates, verify_trace_inclusion
from .forms import LogForm, is_regular_in, lemma42_criterion
from .laurent import LaurentPoly, LaurentRing, VarRoster
from .pushforward import (
    FiniteCover,
    check_lift_independence,
    lemma43_report,
    projection_formula_report,
    random_poly,
)
from .report import Report
from .witt import beta, beta_filtration_membership, closed_functions_sample
from .zpn import ceil_identity, ceil_rat

R_GRID = (Fraction(0), Fraction(1, 2), Fraction(1), Fraction(3, 2), Fraction(2), Fraction(5, 2), Fraction(3))


@dataclass(frozen=True)
class RunConfig:
    p: int = 2
    n: int = 2
    N: Optional[int] = None
    vars: str = "t:log, s:plain"
    window: Tuple[Tuple[int, int], ...] = ((-8, 8),)
    seed: int = 0
    trials: int = 100
    jobs: int = 1

    @property
    def roster(self) -> VarRoster:
        return VarRoster.parse(self.vars)

    @property
    def precision(self) -> int:
        return self.N if self.N is not None else 2 * self.n

    def degree_window(self, roster: Optional[VarRoster] = None) -> DegreeWindow:
        roster = roster or self.roster
        if len(self.window) == 1:
            lo, hi = self.window[0]
            return DegreeWindow.uniform(roster, lo, hi)
        return DegreeWindow.make(roster, self.window)

    def describe(self) -> dict:
        return {
            "p": self.p,
            "n": self.n,
            "N": self.precision,
            "vars": str(self.roster),
            "window": [list(w) for w in self.window],
            "seed": self.seed,
            "trials": self.trials,
        }


def _log_names(roster: VarRoster) -> List[str]:
    return [v.name for v in roster if v.log]


def _plain_names(roster: VarRoster) -> List[str]:
    return [v.name for v in roster if not v.log]


def _first_log(roster: VarRoster) -> str:
    logs = _log_names(roster)
    if not logs:
        raise ValueError("this suite needs at least one log variable")
    return logs[0]


def case_rng(cfg: RunConfig, suite: str, label: str) -> random.Random:
    return random.Random(f"{cfg.seed}:{suite}:{label}")


def _e_values(p: int) -> List[int]:
    return sorted({1, 2, 3, p, 2 * p})


def _units(cfg: RunConfig, roster: VarRoster) -> List[str]:
    plain = _plain_names(roster)
    out = ["1"]
    if plain:
        out.append(f"1 + {cfg.p}*{plain[0]}")
    return out


# --------------------------------------------------------------------------
# case planners and runners


def plan_homotopy(cfg: RunConfig):
    roster = cfg.roster
    logs = _log_names(roster)
    for a in logs:
        others = [x for x in logs if x != a]
        for ba in range(1, 2 * cfg.p + 1):
            for rest in itertools.product(range(0, 2), repeat=len(others)):
                yield (a, ba, tuple(zip(others, rest)))


def run_homotopy(cfg: RunConfig, case) -> Report:
    a, ba, rest = case
    roster = cfg.roster
    poles = {a: ba, **dict(rest)}
    sub = dict(poles)
    sub[a] = ba - 1
    spec = ComplexSpec.make(roster, cfg.p, cfg.n, poles, sub=sub)
    return verify_homotopy(spec, cfg.degree_window())


def plan_injectivity(cfg: RunConfig):
    logs = _log_names(cfg.roster)
    for bs in itertools.product(range(0, 2 * cfg.p + 1), repeat=len(logs)):
        for k, a in enumerate(logs):
            if bs[k] >= 1:
                yield (tuple(zip(logs, bs)), a)


def run_injectivity(cfg: RunConfig, case) -> Report:
    b, a = case
    b = dict(b)
    roster = cfg.roster
    small = dict(b)
    small[a] -= 1
    hi = Complex(ComplexSpec.make(roster, cfg.p, cfg.n, b))
    lo = Complex(ComplexSpec.make(roster, cfg.p, cfg.n, small))
    W = cfg.degree_window()
    rep = Report({"b": b, "step": a, "p": cfg.p, "n": cfg.n}, window=W.to_list())
    iso_expected = b[a] % cfg.p != 0
    reps = window_representatives(W, [hi, lo])
    for i in range(len(roster) + 1):
        bad_inj = bad_iso = None
        for M in reps:
            if not hi.inclusion_injective(lo, M, i):
                bad_inj = bad_inj or f"H^{i} at {M}"
            if iso_expected and not hi.inclusion_surjective(lo, M, i):
                bad_iso = bad_iso or f"H^{i} at {M}"
        rep.add(f"H^{i} injective", bad_inj is None, bad_inj)
        if iso_expected:
            rep.add(f"H^{i} isomorphism (p does not divide {b[a]})", bad_iso is None, bad_iso)
    return rep


def plan_cartier(cfg: RunConfig):
    d = len(cfg.roster)
    for r in R_GRID:
        for i in range(min(2, d) + 1):
            yield (str(r), i)


def run_cartier(cfg: RunConfig, case) -> Report:
    r, i = case
    roster = cfg.roster
    return verify_fil_correspondence(roster, cfg.p, Fraction(r), i, cfg.degree_window(), _first_log(roster))


def plan_witt(cfg: RunConfig):
    for k in range(cfg.trials):
        yield (k,)


def run_witt(cfg: RunConfig, case) -> Report:
    (k,) = case
    roster = cfg.roster
    t = _first_log(roster)
    p, n = cfg.p, cfg.n
    N = max(cfg.precision, 2 * n)
    ring = LaurentRing(roster, p, N)
    rng = case_rng(cfg, "witt-equiv", str(k))
    W = cfg.degree_window()
    b = closed_functions_sample(ring, n, rng, W.bounds, terms=rng.randint(1, 4))
    rep = Report({"p": p, "n": n, "b": b.to_text()})
    w = beta(b, n)
    hi = LaurentRing(roster, p, N + 1)
    w_hi = beta(LaurentPoly(hi, b.terms), n)
    rep.add("beta stable under extra precision", w == w_hi, f"{w} vs {w_hi}")
    h = random_poly(ring, rng, W.bounds, 2)
    w_alt = beta(b + h.scale(p ** n), n)
    rep.add("beta independent of the lift", w == w_alt, f"b = {b.to_text()}, h = {h.to_text()}: {w} vs {w_alt}")
    chart = _fil_chart(roster, p, n, t)
    cls = LogForm.function(b.change_ring(chart.ring))
    inside = 0
    for r in R_GRID:
        member = chart.fil(cls, r)
        if r > 0:
            lower = _complex(roster, p, n, {t: p * (ceil_rat(r) - 1)})
            direct = chart.laurent.image_contains(lower, cls)
        else:
            direct = member
        via_root, via_components = beta_filtration_membership(b, n, r, t)
        ok = direct == member == via_root == via_components
        inside += direct
        rep.add(f"r={r}", ok, f"b = {b.to_text()}: cohomology {direct}/{member}, Witt tests {via_root}/{via_components}")
    rep.extra["members"] = inside
    rep.extra["non_members"] = len(R_GRID) - inside
    return rep


_CHARTS: Dict[tuple, FilChart] = {}


_COMPLEXES: Dict[tuple, Complex] = {}


def _complex(roster: VarRoster, p: int, n: int, poles: Dict[str, int]) -> Complex:
    full = {v.name: 0 for v in roster if v.log}
    full.update(poles)
    key = (str(roster), p, n, tuple(sorted(full.items())))
    if key not in _COMPLEXES:
        _COMPLEXES[key] = Complex(ComplexSpec.make(roster, p, n, full))
    return _COMPLEXES[key]


def _fil_chart(roster: VarRoster, p: int, n: int, t: str) -> FilChart:
    key = (str(roster), p, n, t)
    if key not in _CHARTS:
        _CHARTS[key] = FilChart(roster, p, n, t)
    return _CHARTS[key]


def plan_trace_fil(cfg: RunConfig):
    for e in _e_values(cfg.p):
        for u in _units(cfg, cfg.roster):
            for r in R_GRID:
                for i in range(min(2, len(cfg.roster)) + 1):
                    yield (e, u, str(r), i)


def run_trace_fil(cfg: RunConfig, case) -> Report:
    e, u, r, i = case
    roster = cfg.roster
    t = _first_log(roster)
    ring = LaurentRing(roster, cfg.p, cfg.n)
    cover = FiniteCover(ring, t, e, u)
    W = cfg.degree_window(cover.source.roster)
    return verify_trace_inclusion(cover, Fraction(r), i, cfg.n, W)


def _random_unit_pair(cfg: RunConfig, roster: VarRoster, rng: random.Random, source_ring: LaurentRing, k_t: int):
    """Two units congruent mod p, free of the ramified variable."""
    p = cfg.p
    bounds = [(0, 0) if j == k_t else ((0, 2) if not roster.vars[j].log else (-2, 2)) for j in range(len(roster))]
    c = rng.choice([x for x in range(1, source_ring.q) if x % p])
    base = source_ring.const(c)
    # plain-variable terms with coefficients divisible by p keep it a unit
    ha = random_poly(source_ring, rng, bounds, 2).scale(p)
    hb = random_poly(source_ring, rng, bounds, 2).scale(p)
    return base + ha, base + ha + hb


def plan_lift_indep(cfg: RunConfig):
    for k in range(cfg.trials):
        yield ("lift", k)
    yield ("projection", cfg.trials)


def run_lift_indep(cfg: RunConfig, case) -> Report:
    kind, k = case
    roster = cfg.roster
    t = _first_log(roster)
    rng = case_rng(cfg, "lift-indep", f"{kind}:{k}")
    N = max(cfg.precision, cfg.n)
    ring = LaurentRing(roster, cfg.p, N)
    k_t = roster.index(t)
    if kind == "lift":
        e = rng.choice(_e_values(cfg.p))
        probe = FiniteCover(ring, t, e)
        ua, ub = _random_unit_pair(cfg, roster, rng, probe.source, k_t)
        a = FiniteCover(ring, t, e, ua)
        b = FiniteCover(ring, t, e, ub)
        i = rng.randint(0, len(roster))
        return check_lift_independence(a, b, i, cfg.n, cfg.degree_window(a.source.roster))
    rep = Report({"p": cfg.p, "n": cfg.n, "pairs": 4 * cfg.trials})
    for e in _e_values(cfg.p):
        probe = FiniteCover(ring.with_precision(cfg.n), t, e)
        ua, _ = _random_unit_pair(cfg, roster, rng, probe.source, k_t)
        cover = FiniteCover(ring.with_precision(cfg.n), t, e, ua)
        lim = [(-4, 4) if v.log else (0, 3) for v in roster]
        sub = projection_formula_report(cover, rng, 4 * cfg.trials, lim)
        rep.extend(sub, prefix=f"e={e}: ")
    return rep


def plan_lemma42(cfg: RunConfig):
    yield (4,)


def run_lemma42(cfg: RunConfig, case) -> Report:
    (bound,) = case
    roster = cfg.roster
    t = _first_log(roster)
    ring = LaurentRing(roster, cfg.p, cfg.n)
    d = len(roster)
    rep = Report({"p": cfg.p, "n": cfg.n, "vars": str(roster), "t": t, "bound": bound})
    ranges = [range(-bound, bound + 1) if v.log else range(0, bound + 1) for v in roster]
    bad = None
    tested = skipped = 0
    for ex in itertools.product(*ranges):
        for i in range(d + 1):
            for S in itertools.combinations(range(d), i):
                w = LogForm.monomial(ring, ex, S)
                if not is_regular_in(w, [t]):
                    skipped += 1
                    continue
                lhs, rhs = lemma42_criterion(w, t)
                tested += 1
                if lhs != rhs and bad is None:
                    bad = f"{w.to_text()}: {lhs} vs {rhs}"
    rep.add(f"criterion agrees on {tested} forms", bad is None, bad)
    rep.extra["skipped_with_pole"] = skipped
    return rep


def plan_lemma43(cfg: RunConfig):
    for e in _e_values(cfg.p):
        for u in _units(cfg, cfg.roster):
            yield (e, u)


def run_lemma43(cfg: RunConfig, case) -> Report:
    e, u = case
    roster = cfg.roster
    t = _first_log(roster)
    ring = LaurentRing(roster, cfg.p, cfg.n)
    cover = FiniteCover(ring, t, e, u)
    W = cfg.degree_window(cover.source.roster)
    return lemma43_report(cover, [r for r in R_GRID if r > 0], W)


def plan_ceiling(cfg: RunConfig):
    yield (cfg.trials,)


def run_ceiling(cfg: RunConfig, case) -> Report:
    (trials,) = case
    rng = case_rng(cfg, "ceiling", "all")
    rep = Report({"trials": trials})
    bad = None
    for _ in range(trials):
        r = Fraction(rng.randint(0, 10 ** 4), rng.randint(1, 100))
        e = rng.randint(1, 50)
        if not ceil_identity(r, e):
            bad = bad or f"r={r}, e={e}"
    rep.add(f"ceiling identity on {trials} pairs", bad is None, bad)
    return rep


def plan_exactseq(cfg: RunConfig):
    logs = _log_names(cfg.roster)
    for a in logs:
        for ba in range(1, 2 * cfg.p + 1):
            yield ("quotient", a, ba)
            yield ("step", a, ba)
    if cfg.n >= 2:
        for ba in range(0, 2 * cfg.p + 1):
            yield ("reduction", logs[0], ba)


def run_exactseq(cfg: RunConfig, case) -> Report:
    kind, a, ba = case
    roster = cfg.roster
    W = cfg.degree_window()
    poles = {a: ba}
    if kind == "quotient":
        sub = {a: ba - 1}
        f, g = exactseq_maps(ComplexSpec.make(roster, cfg.p, cfg.n, poles, sub=sub))
    elif kind == "step":
        f, g = pole_step_sequence(ComplexSpec.make(roster, cfg.p, cfg.n, poles), a)
    else:
        f, g = devissage_sequence(ComplexSpec.make(roster, cfg.p, cfg.n, poles))
    rep = Report({"kind": kind, "var": a, "b": ba, "p": cfg.p, "n": cfg.n}, window=W.to_list())
    for i in range(len(roster) + 1):
        rep.extend(verify_exact_sequence(f, g, i, W), prefix=f"{kind} i={i}: ")
    return rep


def plan_ls(cfg: RunConfig):
    logs = _log_names(cfg.roster)
    for b in ("1/2", "1", "3/2", "2"):
        yield ("single", b)
    if len(logs) >= 2:
        for b in ("1/2", "1", "3/2"):
            yield ("double", b)


def run_ls(cfg: RunConfig, case) -> Report:
    kind, b = case
    roster = cfg.roster
    logs = _log_names(roster)
    W = cfg.degree_window()
    if kind == "single":
        mult = {logs[0]: Fraction(b)}
        # the other log variables carry no divisor: drop them from the chart roster
        keep = [v for v in roster if not v.log or v.name == logs[0]]
        roster = VarRoster(tuple(keep))
        W = cfg.degree_window(roster)
    else:
        mult = {x: Fraction(b) for x in logs}
    chart = ModulusChart(roster, mult, cfg.p, cfg.n)
    rep = Report(chart.describe(), window=W.to_list())
    for i in range(len(roster) + 1):
        rep.extend(verify_local_ls(chart, i, W), prefix=f"i={i}: ")
        if kind == "single":
            rep.extend(verify_ls_certificates(chart, i, W), prefix=f"i={i}: ")
    return rep


@dataclass(frozen=True)
class Suite:
    name: str
    plan: Callable
    run: Callable
    description: str


SUITES: Dict[str, Suite] = {
    s.name: s
    for s in [
        Suite("homotopy", plan_homotopy, run_homotopy, "homotopy identity on unit pole-step quotients"),
        Suite("injectivity", plan_injectivity, run_injectivity, "cohomology of unit pole-step inclusions"),
        Suite("cartier", plan_cartier, run_cartier, "inverse Cartier correspondence at n = 1"),
        Suite("witt-equiv", plan_witt, run_witt, "H^0 filtration versus the Witt-vector test"),
        Suite("trace-fil", plan_trace_fil, run_trace_fil, "traces respect the filtrations"),
        Suite("lift-indep", plan_lift_indep, run_lift_indep, "lift independence and projection formula"),
        Suite("lemma42", plan_lemma42, run_lemma42, "divisibility criterion via wedge with dlog t"),
        Suite("lemma43", plan_lemma43, run_lemma43, "pole bounds for pushforwards"),
        Suite("ceiling", plan_ceiling, run_ceiling, "nested ceiling identity"),
        Suite("exactseq", plan_exactseq, run_exactseq, "short exact sequences of complexes"),
        Suite("ls-form", plan_ls, run_ls, "modulus sections on log smooth charts"),
    ]
}


def _label(case) -> str:
    return ",".join(str(x) for x in case)


def _run_one(args):
    name, cfg, case = args
    suite = SUITES[name]
    try:
        return suite.run(cfg, case)
    except Exception as exc:  # a crash in one case is reported, not propagated
        rep = Report({"case": _label(case)})
        rep.add("case raised", False, f"{type(exc).__name__}: {exc}")
        return rep


def effective_config(name: str, cfg: RunConfig) -> RunConfig:
    if name == "cartier" and cfg.n != 1:
        return replace(cfg, n=1, N=None)
    return cfg


def run_suite(name: str, cfg: RunConfig) -> Report:
    if name not in SUITES:
        raise KeyError(name)
    cfg = effective_config(name, cfg)
    suite = SUITES[name]
    cases = list(suite.plan(cfg))
    jobs = max(1, cfg.jobs)
    work = [(name, cfg, c) for c in cases]
    if jobs > 1 and len(work) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_one, work, chunksize=max(1, len(work) // (4 * jobs))))
    else:
        results = [_run_one(w) for w in work]
    out = Report({"suite": name, "description": suite.description, **cfg.describe()},
                 window=[list(w) for w in cfg.window])
    listing = []
    for case, rep in zip(cases, results):
        out.extend(rep, prefix=f"[{_label(case)}] ")
        entry = {"case": _label(case), "inputs": rep.spec, "passed": rep.passed}
        if rep.extra:
            entry["extra"] = rep.extra
        listing.append(entry)
    out.extra["cases"] = listing
    return out
