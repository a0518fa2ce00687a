"""Sparse Laurent polynomials over Z/p^N.

A ring is fixed by a variable roster and a modulus.  Log variables may
carry negative exponents; plain variables are polynomial only.  Terms are
stored as ``{exponent tuple: int}`` with coefficients reduced into
``[0, p^N)`` and no stored zeros.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, Mapping, Optional, Tuple

from .errors import NotAUnit, ParseError, RosterMismatch
from .zpn import Modulus, Scalar

Exps = Tuple[int, ...]

_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*'*\Z")


@dataclass(frozen=True)
class Var:
    name: str
    log: bool

    def __str__(self):
        return f"{self.name}:{'log' if self.log else 'plain'}"


@dataclass(frozen=True)
class VarRoster:
    vars: Tuple[Var, ...]

    def __post_init__(self):
        # the empty roster is the coordinate ring of a point; only internal
        # constructions (restriction to a divisor of a curve) create it
        names = [v.name for v in self.vars]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names in {names}")
        for n in names:
            if not _NAME.match(n):
                raise ValueError(f"bad variable name {n!r}")

    @classmethod
    def of(cls, *specs) -> "VarRoster":
        """``VarRoster.of(("t", True), ("s", False))`` or ``of("t:log", "s:plain")``."""
        out = []
        for s in specs:
            if isinstance(s, Var):
                out.append(s)
            elif isinstance(s, str):
                out.extend(cls.parse(s).vars)
            else:
                out.append(Var(s[0], bool(s[1])))
        return cls(tuple(out))

    @classmethod
    def parse(cls, text: str) -> "VarRoster":
        """Parse ``"t:log, s:plain"`` (an optional ``vars:`` prefix is accepted)."""
        text = text.strip()
        if text.startswith("vars:"):
            text = text[5:]
        out = []
        for item in text.split(","):
            item = item.strip()
            if not item:
                continue
            name, _, kind = item.partition(":")
            kind = kind.strip() or "plain"
            if kind not in ("log", "plain"):
                raise ParseError(f"variable kind must be log or plain, got {kind!r}")
            out.append(Var(name.strip(), kind == "log"))
        if not out:
            raise ParseError("a roster needs at least one variable")
        try:
            return cls(tuple(out))
        except ValueError as exc:
            raise ParseError(str(exc)) from exc

    def __len__(self):
        return len(self.vars)

    def __iter__(self):
        return iter(self.vars)

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(v.name for v in self.vars)

    def index(self, name: str) -> int:
        for k, v in enumerate(self.vars):
            if v.name == name:
                return k
        raise KeyError(f"no variable {name!r} in roster {self.names}")

    def is_log(self, k: int) -> bool:
        return self.vars[k].log

    @property
    def log_indices(self) -> Tuple[int, ...]:
        return tuple(k for k, v in enumerate(self.vars) if v.log)

    @property
    def plain_indices(self) -> Tuple[int, ...]:
        return tuple(k for k, v in enumerate(self.vars) if not v.log)

    def rename(self, old: str, new: str) -> "VarRoster":
        return VarRoster(tuple(Var(new, v.log) if v.name == old else v for v in self.vars))

    def drop(self, name: str) -> "VarRoster":
        return VarRoster(tuple(v for v in self.vars if v.name != name))

    def header(self) -> str:
        return "vars: " + ", ".join(str(v) for v in self.vars)

    def __str__(self):
        return ", ".join(str(v) for v in self.vars)


@dataclass(frozen=True)
class LaurentRing:
    """Z/p^N[plain vars][log vars^{+-1}] for a fixed roster."""

    roster: VarRoster
    p: int
    N: int

    def __post_init__(self):
        object.__setattr__(self, "_mod", Modulus(self.p, self.N))

    @classmethod
    def make(cls, roster, p: int, N: int) -> "LaurentRing":
        if isinstance(roster, str):
            roster = VarRoster.parse(roster)
        return cls(roster, p, N)

    @property
    def modulus(self) -> Modulus:
        return self._mod

    @property
    def q(self) -> int:
        return self._mod.q

    @property
    def nvars(self) -> int:
        return len(self.roster)

    def with_precision(self, N: int) -> "LaurentRing":
        return LaurentRing(self.roster, self.p, N)

    def with_roster(self, roster: VarRoster) -> "LaurentRing":
        return LaurentRing(roster, self.p, self.N)

    def zero(self) -> "LaurentPoly":
        return LaurentPoly(self, {})

    def one(self) -> "LaurentPoly":
        return self.const(1)

    def const(self, c) -> "LaurentPoly":
        return self.monomial((0,) * self.nvars, c)

    def monomial(self, exps: Exps, c=1) -> "LaurentPoly":
        if isinstance(c, Scalar):
            if c.modulus != self.modulus:
                raise RosterMismatch(f"scalar over {c.modulus} in ring over {self.modulus}")
            c = c.value
        return LaurentPoly(self, {tuple(exps): c})

    def gen(self, name: str) -> "LaurentPoly":
        e = [0] * self.nvars
        e[self.roster.index(name)] = 1
        return self.monomial(tuple(e))

    def poly(self, terms: Mapping[Exps, int]) -> "LaurentPoly":
        return LaurentPoly(self, dict(terms))

    def parse(self, text: str) -> "LaurentPoly":
        from .grammar import parse_poly

        return parse_poly(text, self)

    def __str__(self):
        return f"{self.modulus}[{self.roster}]"


class LaurentPoly:
    """An element of a LaurentRing.  Treat instances as immutable."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: LaurentRing, terms: Dict[Exps, int], _clean: bool = False):
        self.ring = ring
        if not _clean:
            q = ring.q
            n = ring.nvars
            plain = ring.roster.plain_indices
            clean = {}
            for e, c in terms.items():
                e = tuple(e)
                if len(e) != n:
                    raise RosterMismatch(f"exponent {e} does not match roster {ring.roster.names}")
                for k in plain:
                    if e[k] < 0:
                        raise ValueError(f"negative exponent for plain variable {ring.roster.vars[k].name}")
                c = int(c) % q
                if c:
                    clean[e] = c
            terms = clean
        self.terms = terms
        self._hash = None

    # -- structure -----------------------------------------------------

    def _check(self, other: "LaurentPoly"):
        if other.ring != self.ring:
            raise RosterMismatch(f"{self.ring} vs {other.ring}")

    def _lift(self, other) -> "LaurentPoly":
        if isinstance(other, LaurentPoly):
            self._check(other)
            return other
        if isinstance(other, (int, Scalar)):
            return self.ring.const(other)
        return NotImplemented

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def __iter__(self) -> Iterator[Tuple[Exps, int]]:
        return iter(sorted(self.terms.items()))

    def coeff(self, exps: Exps) -> Scalar:
        return Scalar(self.terms.get(tuple(exps), 0), self.ring.modulus)

    def __eq__(self, other):
        if isinstance(other, LaurentPoly):
            return self.ring == other.ring and self.terms == other.terms
        if isinstance(other, int):
            return self == self.ring.const(other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self.terms.items())))
        return self._hash

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        q = self.ring.q
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = (out.get(e, 0) + c) % q
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return LaurentPoly(self.ring, out, _clean=True)

    __radd__ = __add__

    def __neg__(self):
        q = self.ring.q
        return LaurentPoly(self.ring, {e: q - c for e, c in self.terms.items()}, _clean=True)

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def scale(self, c) -> "LaurentPoly":
        if isinstance(c, Scalar):
            if c.modulus != self.ring.modulus:
                raise RosterMismatch(f"{c.modulus} vs {self.ring.modulus}")
            c = c.value
        q = self.ring.q
        c %= q
        out = {}
        for e, x in self.terms.items():
            v = x * c % q
            if v:
                out[e] = v
        return LaurentPoly(self.ring, out, _clean=True)

    def __mul__(self, other):
        if isinstance(other, (int, Scalar)):
            return self.scale(other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        self._check(other)
        q = self.ring.q
        out: Dict[Exps, int] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = (out.get(e, 0) + c1 * c2) % q
        return LaurentPoly(self.ring, {e: c for e, c in out.items() if c}, _clean=True)

    def __rmul__(self, other):
        if isinstance(other, (int, Scalar)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, k: int) -> "LaurentPoly":
        if k < 0:
            return invert_unit(self) ** (-k)
        result = self.ring.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    # -- helpers -------------------------------------------------------

    def shift(self, exps: Exps) -> "LaurentPoly":
        """Multiply by the monomial with exponent vector ``exps``."""
        return LaurentPoly(
            self.ring, {tuple(a + b for a, b in zip(e, exps)): c for e, c in self.terms.items()}
        )

    def reduce(self, n: int) -> "LaurentPoly":
        """Reduce coefficients mod p^n, staying in the same ring."""
        m = self.ring.p ** n
        out = {e: c % m for e, c in self.terms.items() if c % m}
        return LaurentPoly(self.ring, out, _clean=True)

    def change_ring(self, ring: LaurentRing) -> "LaurentPoly":
        """Reinterpret integer coefficients in another ring with the same roster."""
        if ring.roster != self.ring.roster or ring.p != self.ring.p:
            raise RosterMismatch(f"cannot move {self.ring} to {ring}")
        return LaurentPoly(ring, self.terms)

    def divide_by_p_power(self, k: int) -> "LaurentPoly":
        """Exact division of every coefficient by p^k (result mod p^(N-k))."""
        pk = self.ring.p ** k
        out = {}
        for e, c in self.terms.items():
            if c % pk:
                return None
            out[e] = c // pk
        return LaurentPoly(self.ring, out)

    def min_exp(self, k: int) -> Optional[int]:
        return min((e[k] for e in self.terms), default=None)

    def max_exp(self, k: int) -> Optional[int]:
        return max((e[k] for e in self.terms), default=None)

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        names = self.ring.roster.names
        parts = []
        for e, c in sorted(self.terms.items()):
            mono = [f"{names[k]}^{x}" for k, x in enumerate(e) if x]
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append("*".join(mono))
            else:
                parts.append("*".join([str(c)] + mono))
        return " + ".join(parts)

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"LaurentPoly({self.to_text()!r} over {self.ring})"


# --------------------------------------------------------------------------
# units, homomorphisms, Frobenius


def unit_decomposition(u: LaurentPoly):
    """Split ``u = c * t^a * (1 + w)`` with ``c`` a unit and ``w`` divisible by p.

    Returns ``(c, a, w)``; raises NotAUnit otherwise.
    """
    ring = u.ring
    p = ring.p
    lead = [(e, c) for e, c in u.terms.items() if c % p]
    if len(lead) != 1:
        raise NotAUnit(f"{u.to_text()} is not a unit: {len(lead)} terms with unit coefficient")
    a, c = lead[0]
    for k in ring.roster.plain_indices:
        if a[k]:
            raise NotAUnit(f"{u.to_text()} is not a unit: leading monomial involves a plain variable")
    cinv = pow(c, -1, ring.q)
    neg = tuple(-x for x in a)
    w = (u - ring.monomial(a, c)).shift(neg).scale(cinv)
    return c, a, w


def invert_unit(u: LaurentPoly) -> LaurentPoly:
    """Exact inverse of ``c * t^a * (1 + w)`` via the finite series in ``-w``."""
    ring = u.ring
    c, a, w = unit_decomposition(u)
    s = ring.one()
    term = ring.one()
    negw = -w
    for _ in range(1, ring.N):
        term = term * negw
        if not term:
            break
        s = s + term
    inv = s.shift(tuple(-x for x in a)).scale(pow(c, -1, ring.q))
    return inv


def hom(f: LaurentPoly, images: Mapping[str, LaurentPoly], target: LaurentRing) -> LaurentPoly:
    """Ring map sending each variable to ``images[name]`` (same-named variable if absent)."""
    src = f.ring
    imgs = []
    for v in src.roster:
        img = images.get(v.name)
        if img is None:
            img = target.gen(v.name)
        elif img.ring != target:
            raise RosterMismatch(f"image of {v.name} lives in {img.ring}, expected {target}")
        imgs.append(img)
    cache: Dict[Tuple[int, int], LaurentPoly] = {}
    inv_cache: Dict[int, LaurentPoly] = {}

    def power(k: int, x: int) -> LaurentPoly:
        key = (k, x)
        if key not in cache:
            if x >= 0:
                cache[key] = imgs[k] ** x
            else:
                if k not in inv_cache:
                    inv_cache[k] = invert_unit(imgs[k])
                cache[key] = inv_cache[k] ** (-x)
        return cache[key]

    out = target.zero()
    for e, c in f.terms.items():
        term = target.const(c)
        for k, x in enumerate(e):
            if x:
                term = term * power(k, x)
        out = out + term
    return out


def substitute(f: LaurentPoly, var: str, u: LaurentPoly, new_var: str, e: int) -> LaurentPoly:
    """Substitute ``var -> u * new_var^e``; other variables map to same-named ones.

    The result lives in ``u.ring``, which must contain ``new_var`` as a log
    variable and every other variable of ``f``'s roster.
    """
    if e < 1:
        raise ValueError(f"ramification degree must be >= 1, got {e}")
    src = f.ring
    if not src.roster.vars[src.roster.index(var)].log:
        raise ValueError(f"{var} is not a log variable")
    target = u.ring
    if not target.roster.vars[target.roster.index(new_var)].log:
        raise ValueError(f"{new_var} is not a log variable")
    unit_decomposition(u)
    image = u * target.gen(new_var) ** e
    return hom(f, {var: image}, target)


def frobenius_lift(f: LaurentPoly) -> LaurentPoly:
    """The lift x -> x^p on every variable, identity on Z/p^N coefficients."""
    p = f.ring.p
    return LaurentPoly(f.ring, {tuple(p * x for x in e): c for e, c in f.terms.items()}, _clean=True)


def frobenius_root(f: LaurentPoly, k: int = 1) -> Optional[LaurentPoly]:
    """Inverse of ``frobenius_lift`` applied k times, or None if f is not in its image."""
    pk = f.ring.p ** k
    out = {}
    for e, c in f.terms.items():
        if any(x % pk for x in e):
            return None
        out[tuple(x // pk for x in e)] = c
    return LaurentPoly(f.ring, out, _clean=True)


def monomials_in_box(ring: LaurentRing, bounds: Iterable[Tuple[int, int]]) -> Iterator[Exps]:
    """All exponent vectors inside per-variable inclusive bounds."""

    ranges = [range(lo, hi + 1) for lo, hi in bounds]
    return itertools.product(*ranges)
