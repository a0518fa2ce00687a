"""Text grammar for polynomials, forms and covers.

Polynomials: ``3*t^-2*s^1 + 1``; products, ``-``, parentheses and bare
variables are also accepted.  Forms add the atoms ``dlog(t)`` and ``d(s)``
joined by ``w`` or ``∧``: ``t^-1 * dlog(t) w d(s)``.  A basis word that
names the same variable twice is rejected.
"""

from __future__ import annotations

import re
from typing import List, Optional, Tuple

from .errors import NotAUnit, ParseError
from .forms import LogForm
from .laurent import LaurentPoly, LaurentRing, VarRoster

_TOKEN = re.compile(
    r"\s*(?:(?P<int>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*'*)|(?P<op>\^|\*|\+|-|\(|\)|∧|;|=|\[|\]|,))"
)


def tokenize(text: str) -> List[Tuple[str, str]]:
    out = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos:pos + 1]!r} at {pos} in {text!r}")
        kind = m.lastgroup
        out.append((kind, m.group(kind)))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, text: str, ring: LaurentRing):
        self.text = text
        self.ring = ring
        self.toks = tokenize(text)
        self.i = 0
        self.names = set(ring.roster.names)
        self.wedge_w = "w" not in self.names

    def peek(self) -> Optional[Tuple[str, str]]:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self) -> Tuple[str, str]:
        tok = self.peek()
        if tok is None:
            raise ParseError(f"unexpected end of input in {self.text!r}")
        self.i += 1
        return tok

    def expect(self, value: str):
        tok = self.take()
        if tok[1] != value:
            raise ParseError(f"expected {value!r}, got {tok[1]!r} in {self.text!r}")

    def at_op(self, *values) -> bool:
        tok = self.peek()
        return tok is not None and tok[0] in ("op", "name") and tok[1] in values and (
            tok[0] == "op" or (tok[1] == "w" and self.wedge_w)
        )

    # expr := ['-'] term (('+' | '-') term)*
    def expr(self) -> LogForm:
        neg = False
        if self.at_op("-"):
            self.take()
            neg = True
        acc = self.term()
        if neg:
            acc = -acc
        while self.at_op("+", "-"):
            op = self.take()[1]
            t = self.term()
            acc = acc + t if op == "+" else acc - t
        return acc

    # term := factor (('*' | 'w' | '∧') factor)*
    def term(self) -> LogForm:
        used: set = set()
        acc = self.factor(used)
        while self.at_op("*", "∧", "w"):
            self.take()
            acc = acc.wedge(self.factor(used))
        return acc

    # factor := atom ['^' ['-'] int]
    def factor(self, used: set) -> LogForm:
        f = self.atom(used)
        if self.at_op("^"):
            self.take()
            sign = 1
            if self.at_op("-"):
                self.take()
                sign = -1
            tok = self.take()
            if tok[0] != "int":
                raise ParseError(f"exponent must be an integer, got {tok[1]!r} in {self.text!r}")
            k = sign * int(tok[1])
            if f.degree:
                raise ParseError(f"cannot raise a form of positive degree to a power in {self.text!r}")
            poly = f.component(())
            try:
                f = LogForm.function(poly ** k)
            except NotAUnit as exc:
                raise ParseError(f"negative power of a non-unit in {self.text!r}") from exc
            except ValueError as exc:
                raise ParseError(str(exc)) from exc
        return f

    def atom(self, used: set) -> LogForm:
        ring = self.ring
        kind, val = self.take()
        if kind == "int":
            return LogForm.function(ring.const(int(val)))
        if kind == "op" and val == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        if kind == "name":
            if val in ("dlog", "d") and self.at_op("("):
                self.take()
                kind2, name = self.take()
                if kind2 != "name" or name not in self.names:
                    raise ParseError(f"unknown variable {name!r} in {self.text!r}")
                self.expect(")")
                if name in used:
                    raise ParseError(f"variable {name!r} repeated in a basis word in {self.text!r}")
                used.add(name)
                k = ring.roster.index(name)
                is_log = ring.roster.is_log(k)
                if val == "dlog":
                    if not is_log:
                        raise ParseError(f"dlog({name}) needs a log variable")
                    return LogForm.basis(ring, [name])
                if is_log:
                    # dt = t dlog t
                    return LogForm.basis(ring, [name], ring.gen(name))
                return LogForm.basis(ring, [name])
            if val in self.names:
                return LogForm.function(ring.gen(val))
            raise ParseError(f"unknown variable {val!r} in {self.text!r}")
        raise ParseError(f"unexpected token {val!r} in {self.text!r}")


def parse_form(text: str, ring: LaurentRing) -> LogForm:
    text = text.strip()
    if not text:
        raise ParseError("empty input")
    p = _Parser(text, ring)
    try:
        out = p.expr()
    except ParseError:
        raise
    except ValueError as exc:
        raise ParseError(f"{exc} in {text!r}") from exc
    if p.peek() is not None:
        raise ParseError(f"trailing input {p.peek()[1]!r} in {text!r}")
    return out


def parse_poly(text: str, ring: LaurentRing) -> LaurentPoly:
    f = parse_form(text, ring)
    if f.degree and f:
        raise ParseError(f"expected a function, got a {f.degree}-form in {text!r}")
    return f.component(())


def parse_with_header(text: str, p: int, N: int) -> LaurentPoly:
    """Parse ``vars: t:log, s:plain`` on the first line and a polynomial after it."""
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    if not lines or not lines[0].strip().startswith("vars:"):
        raise ParseError("missing 'vars:' header line")
    ring = LaurentRing(VarRoster.parse(lines[0]), p, N)
    return parse_poly(" ".join(lines[1:]), ring)


def parse_witt_literal(text: str, roster: VarRoster):
    """Parse ``W(p=2,n=2)[a0; a1]`` into a WittVector."""
    from .witt import WittVector

    m = re.fullmatch(r"\s*W\(\s*p\s*=\s*(\d+)\s*,\s*n\s*=\s*(\d+)\s*\)\s*\[(.*)\]\s*", text, re.S)
    if not m:
        raise ParseError(f"malformed Witt vector literal {text!r}")
    p, n = int(m.group(1)), int(m.group(2))
    parts = [s.strip() for s in m.group(3).split(";")]
    if len(parts) != n:
        raise ParseError(f"expected {n} components, got {len(parts)}")
    ring = LaurentRing(roster, p, 1)
    return WittVector(p, n, tuple(parse_poly(s, ring) for s in parts))


def parse_cover(text: str, target: VarRoster):
    """Parse ``t = u * t'^e`` (u optional) into ``(t, u-text, t', e)``."""
    lhs, sep, rhs = text.partition("=")
    if not sep:
        raise ParseError(f"cover must look like 't = u * t'^e', got {text!r}")
    t = lhs.strip()
    if t not in target.names or not target.vars[target.index(t)].log:
        raise ParseError(f"{t!r} is not a log variable of the target roster")
    m = re.fullmatch(r"\s*(?:(.*)\*)?\s*([A-Za-z_][A-Za-z0-9_]*'+)\s*(?:\^\s*(\d+))?\s*", rhs)
    if not m:
        raise ParseError(f"cannot read the cover {text!r}")
    unit = (m.group(1) or "1").strip() or "1"
    return t, unit, m.group(2), int(m.group(3) or 1)
