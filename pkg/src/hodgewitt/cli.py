"""Command-line front end.

    hodgewitt filtration --p 2 --n 1 --i 1 --r 1 --window -6:6
    hodgewitt verify homotopy --p 3 --n 1 --seed 7
    hodgewitt beta --p 2 --n 2 --input "t^4 + 2*t^-2"
    hodgewitt trace --cover "t = t'^2" --form "dlog(t')"

Every flag can also be set through an environment variable HODGEWITT_<FLAG>
(for example HODGEWITT_P=3); explicit flags win.
Exit codes: 0 success, 1 verification failure, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .errors import HodgeWittError
from .filtration import VARIANTS, FilChart, ModulusChart, modulus_sections
from .grammar import parse_cover, parse_form, parse_poly
from .laurent import LaurentRing, VarRoster
from .pushforward import FiniteCover
from .report import dumps
from .suites import SUITES, RunConfig, run_suite
from .witt import beta, is_closed_function

ENV_PREFIX = "HODGEWITT_"


class UsageError(Exception):
    pass


def _env(name: str, default=None):
    return os.environ.get(ENV_PREFIX + name.upper(), default)


def parse_window(text: str) -> Tuple[Tuple[int, int], ...]:
    out = []
    for part in text.split(","):
        part = part.strip()
        lo, sep, hi = part.partition(":")
        if not sep:
            raise UsageError(f"window must look like LO:HI, got {part!r}")
        try:
            lo_i, hi_i = int(lo), int(hi)
        except ValueError:
            raise UsageError(f"window bounds must be integers, got {part!r}") from None
        if lo_i > hi_i:
            raise UsageError(f"empty window {part!r}")
        out.append((lo_i, hi_i))
    return tuple(out)


def _fix_negative_values(argv: Sequence[str]) -> List[str]:
    # argparse would read "-6:6" as an option; glue it to its flag
    out: List[str] = []
    it = iter(argv)
    for a in it:
        if a in ("--window", "--r", "--seed"):
            nxt = next(it, None)
            if nxt is None:
                out.append(a)
            else:
                out.append(f"{a}={nxt}")
        else:
            out.append(a)
    return out


def _common(sp: argparse.ArgumentParser, require_p: bool = False):
    p_default = _env("p")
    sp.add_argument("--p", type=int, default=None if require_p else int(p_default or 2),
                    required=require_p and p_default is None, help="the prime")
    if require_p and p_default is not None:
        sp.set_defaults(p=int(p_default))
    sp.add_argument("--n", type=int, default=int(_env("n", 2)), help="length n (coefficients Z/p^n)")
    sp.add_argument("--precision", type=int, default=_env("precision"), help="lift precision N (default 2n)")
    sp.add_argument("--vars", default=_env("vars", "t:log, s:plain"), help='variable roster, e.g. "t:log, s:plain"')
    sp.add_argument("--window", default=_env("window", "-8:8"), help="LO:HI, or one LO:HI per variable separated by commas")
    sp.add_argument("--seed", type=int, default=int(_env("seed", 0)))
    sp.add_argument("--trials", type=int, default=int(_env("trials", 100)))
    sp.add_argument("--jobs", type=int, default=int(_env("jobs", os.cpu_count() or 1)))
    sp.add_argument("--out", default=_env("out"), help="write the JSON report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hodgewitt", description="Hodge-Witt filtration computations and checks")
    sub = ap.add_subparsers(dest="command", required=True)

    f = sub.add_parser("filtration", help="generators and memberships for Fil_r / Fil'_r")
    _common(f, require_p=True)
    f.add_argument("--i", type=int, default=1, help="cohomological degree")
    f.add_argument("--r", required=True, help="filtration index, e.g. 3/2")
    f.add_argument("--variant", choices=VARIANTS, default="Fil")
    f.add_argument("--t", default=None, help="the log variable carrying the divisor")
    f.add_argument("--class", dest="classes", action="append", default=[], help="a closed form to test (repeatable)")

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("suite", help="one of: " + ", ".join(SUITES))
    _common(v)

    b = sub.add_parser("beta", help="Witt vector of a closed function")
    _common(b)
    b.add_argument("--input", required=True, help="a Laurent polynomial")
    b.add_argument("--strict", action="store_true", help="reject inputs that are not closed over Z/p^n")

    t = sub.add_parser("trace", help="pushforward of a form along t = u * t'^e")
    _common(t)
    t.add_argument("--cover", required=True)
    t.add_argument("--form", required=True)
    return ap


def make_config(args) -> RunConfig:
    if args.p is None or args.p < 2:
        raise UsageError("--p must be a prime")
    if args.n < 1:
        raise UsageError("--n must be at least 1")
    N = int(args.precision) if args.precision is not None else None
    if N is not None and N < args.n:
        raise UsageError(f"--precision {N} is below n = {args.n}")
    if args.jobs < 1:
        raise UsageError("--jobs must be positive")
    roster = VarRoster.parse(args.vars)
    window = parse_window(args.window)
    if len(window) not in (1, len(roster)):
        raise UsageError(f"window has {len(window)} ranges for {len(roster)} variables")
    return RunConfig(p=args.p, n=args.n, N=N, vars=str(roster), window=window,
                     seed=args.seed, trials=args.trials, jobs=args.jobs)


def _emit(text: str, out: Optional[str]):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def cmd_filtration(cfg: RunConfig, args) -> int:
    try:
        r = Fraction(args.r)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"cannot read r = {args.r!r}") from None
    if r < 0:
        raise UsageError("r must be nonnegative")
    roster = cfg.roster
    window = cfg.degree_window()
    chart = FilChart(roster, cfg.p, cfg.n, args.t)
    if args.variant == "Fil" and r > 0:
        # Fil_r = H(t^(-p ceil(r)+1)) are the modulus sections for the divisor r.D
        gens = modulus_sections(ModulusChart(roster, {chart.t: r}, cfg.p, cfg.n), args.i, window)
    else:
        gens = chart.generators(r, args.variant, args.i, window)
    memberships = []
    for text in args.classes:
        omega = parse_form(text, chart.ring)
        memberships.append({"class": omega.to_text(), "member": chart.membership(omega, r, args.variant)})
    if not args.classes:
        # test the Laurent cohomology generators of the window
        for g in chart.laurent.cohomology_basis(args.i, window):
            memberships.append({"class": g.rep.to_text(), "member": chart.membership(g.rep, r, args.variant)})
    doc = {
        "schema": 1,
        "chart": {"vars": str(roster), "t": chart.t, "p": cfg.p, "n": cfg.n, "window": window.to_list()},
        "r": str(r),
        "variant": args.variant,
        "degree": args.i,
        "generators": [g.rep.to_text() for g in gens],
        "memberships": memberships,
    }
    _emit(dumps(doc), args.out)
    return 0


def cmd_verify(cfg: RunConfig, args) -> int:
    if args.suite not in SUITES:
        raise UsageError(f"unknown suite {args.suite!r}; choose from {', '.join(SUITES)}")
    rep = run_suite(args.suite, cfg)
    _emit(rep.to_json(), args.out)
    return 0 if rep.passed else 1


def cmd_beta(cfg: RunConfig, args) -> int:
    N = cfg.N if cfg.N is not None else 2 * cfg.n
    if N < 2 * cfg.n:
        raise UsageError(f"beta needs --precision at least 2n = {2 * cfg.n}")
    ring = LaurentRing(cfg.roster, cfg.p, N)
    b = parse_poly(args.input, ring)
    if not is_closed_function(b, cfg.n):
        if args.strict:
            raise UsageError(f"d({args.input}) is not zero over Z/{cfg.p}^{cfg.n}")
        print(f"hodgewitt: warning: {args.input} is not closed over Z/{cfg.p}^{cfg.n}", file=sys.stderr)
    print(beta(b, cfg.n, check=False).to_text())
    return 0


def cmd_trace(cfg: RunConfig, args) -> int:
    roster = cfg.roster
    t, unit, tp, e = parse_cover(args.cover, roster)
    ring = LaurentRing(roster, cfg.p, cfg.N if cfg.N is not None else cfg.n)
    cover = FiniteCover(ring, t, e, unit, tp)
    omega = parse_form(args.form, cover.source)
    print(cover.pushforward(omega).to_text())
    return 0


COMMANDS = {"filtration": cmd_filtration, "verify": cmd_verify, "beta": cmd_beta, "trace": cmd_trace}


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = build_parser()
    args = ap.parse_args(_fix_negative_values(argv))  # exits with 2 on usage errors
    try:
        cfg = make_config(args)
        return COMMANDS[args.command](cfg, args)
    except (UsageError, HodgeWittError, ValueError) as exc:
        ap.print_usage(sys.stderr)
        print(f"hodgewitt: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
