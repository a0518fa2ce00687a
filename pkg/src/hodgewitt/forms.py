"""Differential forms with log poles over a Laurent ring.

A basis word is a strictly increasing tuple of roster indices.  The word
``(a, j)`` stands for ``dlog t_a ^ ds_j`` when ``t_a`` is a log variable and
``s_j`` a plain one; the wedge is always taken in roster order.

With this basis the exterior derivative of ``x^m * e_S`` is
``sum_k m_k x^m dx_k ^ e_S`` where ``dx_k`` is ``dlog t_k`` for log
variables and ``x^m / s_k * ds_k`` for plain ones.  Counting ``ds_j`` as one
unit of ``s_j``-degree, d preserves the multidegree, and within a fixed
multidegree it is the Koszul differential with weights ``m``.
"""

from __future__ import annotations

from typing import Dict, Iterable, Iterator, Mapping, Optional, Sequence, Tuple

from .errors import RosterMismatch
from .laurent import Exps, LaurentPoly, LaurentRing

Word = Tuple[int, ...]


def word_sign_merge(S: Word, T: Word) -> Tuple[int, Optional[Word]]:
    """Sign and sorted union for ``e_S ^ e_T``; ``(0, None)`` when they overlap."""
    if set(S) & set(T):
        return 0, None
    inversions = 0
    for a in S:
        for b in T:
            if a > b:
                inversions += 1
    return (-1 if inversions % 2 else 1), tuple(sorted(S + T))


def insert_sign(k: int, S: Word) -> int:
    """Sign of ``dx_k ^ e_S`` relative to ``e_{S + k}`` (k not in S)."""
    return -1 if sum(1 for j in S if j < k) % 2 else 1


def word_multidegree_shift(ring: LaurentRing, S: Word) -> Exps:
    """Each ``ds_j`` in the word contributes one unit of ``s_j``-degree."""
    out = [0] * ring.nvars
    for k in S:
        if not ring.roster.is_log(k):
            out[k] = 1
    return tuple(out)


class LogForm:
    """A homogeneous form of fixed degree; components map words to coefficients."""

    __slots__ = ("ring", "degree", "comps")

    def __init__(self, ring: LaurentRing, degree: int, comps: Mapping[Word, LaurentPoly]):
        if degree < 0:
            raise ValueError("negative degree")
        self.ring = ring
        self.degree = degree
        clean = {}
        for S, f in comps.items():
            S = tuple(S)
            if len(S) != degree or list(S) != sorted(set(S)):
                raise ValueError(f"word {S} is not a strictly increasing {degree}-subset")
            if S and (S[0] < 0 or S[-1] >= ring.nvars):
                raise ValueError(f"word {S} out of range")
            if f.ring != ring:
                raise RosterMismatch(f"component over {f.ring}, form over {ring}")
            if f:
                clean[S] = f
        self.comps = clean

    # -- constructors ---------------------------------------------------

    @classmethod
    def zero(cls, ring: LaurentRing, degree: int) -> "LogForm":
        return cls(ring, degree, {})

    @classmethod
    def function(cls, f: LaurentPoly) -> "LogForm":
        return cls(f.ring, 0, {(): f})

    @classmethod
    def basis(cls, ring: LaurentRing, names: Sequence[str], coeff: Optional[LaurentPoly] = None) -> "LogForm":
        """The basis word built from the given variables (any order, sign applied)."""
        idx = [ring.roster.index(n) for n in names]
        if len(set(idx)) != len(idx):
            return cls.zero(ring, len(idx))
        sign = _perm_sign(idx)
        f = coeff if coeff is not None else ring.one()
        return cls(ring, len(idx), {tuple(sorted(idx)): f.scale(sign)})

    @classmethod
    def monomial(cls, ring: LaurentRing, exps: Exps, word: Word, c: int = 1) -> "LogForm":
        return cls(ring, len(word), {tuple(word): ring.monomial(exps, c)})

    @classmethod
    def parse(cls, text: str, ring: LaurentRing) -> "LogForm":
        from .grammar import parse_form

        return parse_form(text, ring)

    # -- basic structure ---------------------------------------------------

    def is_zero(self) -> bool:
        return not self.comps

    def __bool__(self):
        return bool(self.comps)

    def __eq__(self, other):
        if not isinstance(other, LogForm):
            return NotImplemented
        if self.ring != other.ring:
            return False
        if not self.comps and not other.comps:
            return True
        return self.degree == other.degree and self.comps == other.comps

    def __hash__(self):
        return hash((self.ring, self.degree, frozenset(self.comps.items())))

    def component(self, S: Word) -> LaurentPoly:
        return self.comps.get(tuple(S), self.ring.zero())

    def _check(self, other: "LogForm"):
        if not isinstance(other, LogForm):
            raise TypeError(f"expected LogForm, got {type(other).__name__}")
        if other.ring != self.ring:
            raise RosterMismatch(f"{self.ring} vs {other.ring}")

    def __add__(self, other: "LogForm") -> "LogForm":
        self._check(other)
        if not other.comps:
            return self
        if not self.comps:
            return other
        if other.degree != self.degree:
            raise ValueError(f"cannot add forms of degree {self.degree} and {other.degree}")
        out = dict(self.comps)
        for S, f in other.comps.items():
            out[S] = out[S] + f if S in out else f
        return LogForm(self.ring, self.degree, out)

    def __neg__(self) -> "LogForm":
        return LogForm(self.ring, self.degree, {S: -f for S, f in self.comps.items()})

    def __sub__(self, other: "LogForm") -> "LogForm":
        return self + (-other)

    def scale(self, c) -> "LogForm":
        """Multiply by an integer, Scalar or function."""
        if isinstance(c, LaurentPoly):
            if c.ring != self.ring:
                raise RosterMismatch(f"{c.ring} vs {self.ring}")
            return LogForm(self.ring, self.degree, {S: c * f for S, f in self.comps.items()})
        return LogForm(self.ring, self.degree, {S: f.scale(c) for S, f in self.comps.items()})

    def __mul__(self, other):
        if isinstance(other, LogForm):
            return self.wedge(other)
        return self.scale(other)

    __rmul__ = scale

    def wedge(self, other: "LogForm") -> "LogForm":
        self._check(other)
        out: Dict[Word, LaurentPoly] = {}
        for S, f in self.comps.items():
            for T, g in other.comps.items():
                sign, U = word_sign_merge(S, T)
                if not sign:
                    continue
                h = (f * g).scale(sign)
                out[U] = out[U] + h if U in out else h
        return LogForm(self.ring, self.degree + other.degree, out)

    def d(self) -> "LogForm":
        ring = self.ring
        q = ring.q
        log = [ring.roster.is_log(k) for k in range(ring.nvars)]
        acc: Dict[Word, Dict[Exps, int]] = {}
        for S, f in self.comps.items():
            for k in range(ring.nvars):
                if k in S:
                    continue
                sign = insert_sign(k, S)
                U = tuple(sorted(S + (k,)))
                bucket = acc.setdefault(U, {})
                for e, c in f.terms.items():
                    m = e[k]
                    if not m:
                        continue
                    if log[k]:
                        e2 = e
                    else:
                        e2 = e[:k] + (m - 1,) + e[k + 1:]
                    bucket[e2] = (bucket.get(e2, 0) + sign * m * c) % q
        return LogForm(ring, self.degree + 1, {U: LaurentPoly(ring, t) for U, t in acc.items()})

    def reduce(self, n: int) -> "LogForm":
        return LogForm(self.ring, self.degree, {S: f.reduce(n) for S, f in self.comps.items()})

    def change_ring(self, ring: LaurentRing) -> "LogForm":
        return LogForm(ring, self.degree, {S: f.change_ring(ring) for S, f in self.comps.items()})

    def shift(self, exps: Exps) -> "LogForm":
        return LogForm(self.ring, self.degree, {S: f.shift(exps) for S, f in self.comps.items()})

    # -- gradings -------------------------------------------------------

    def terms(self) -> Iterator[Tuple[Word, Exps, int]]:
        """All ``(word, coefficient exponent, coefficient)`` triples in canonical order."""
        for S in sorted(self.comps):
            for e, c in sorted(self.comps[S].terms.items()):
                yield S, e, c

    def multidegrees(self) -> set:
        out = set()
        for S, f in self.comps.items():
            sh = word_multidegree_shift(self.ring, S)
            for e in f.terms:
                out.add(tuple(a + b for a, b in zip(e, sh)))
        return out

    def by_multidegree(self) -> Dict[Exps, "LogForm"]:
        """Split into homogeneous pieces keyed by multidegree."""
        pieces: Dict[Exps, Dict[Word, Dict[Exps, int]]] = {}
        for S, f in self.comps.items():
            sh = word_multidegree_shift(self.ring, S)
            for e, c in f.terms.items():
                M = tuple(a + b for a, b in zip(e, sh))
                pieces.setdefault(M, {}).setdefault(S, {})[e] = c
        return {
            M: LogForm(self.ring, self.degree, {S: LaurentPoly(self.ring, t, _clean=True) for S, t in comps.items()})
            for M, comps in pieces.items()
        }

    def min_exponent(self, k: int) -> Optional[int]:
        vals = [f.min_exp(k) for f in self.comps.values()]
        return min(vals, default=None)

    # -- text --------------------------------------------------------------

    def to_text(self) -> str:
        if not self.comps:
            return "0"
        names = self.ring.roster.names
        wedge = " ∧ " if "w" in names else " w "
        parts = []
        for S in sorted(self.comps):
            f = self.comps[S]
            basis = wedge.join(
                (f"dlog({names[k]})" if self.ring.roster.is_log(k) else f"d({names[k]})") for k in S
            )
            if not S:
                parts.append(f.to_text())
            elif f == self.ring.one():
                parts.append(basis)
            elif f.is_monomial():
                parts.append(f"{f.to_text()} * {basis}")
            else:
                parts.append(f"({f.to_text()}) * {basis}")
        return " + ".join(parts)

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"LogForm({self.to_text()!r}, degree={self.degree})"


def _perm_sign(idx: Sequence[int]) -> int:
    inv = sum(1 for a in range(len(idx)) for b in range(a + 1, len(idx)) if idx[a] > idx[b])
    return -1 if inv % 2 else 1


def dlog(ring: LaurentRing, name: str) -> LogForm:
    return LogForm.basis(ring, [name])


def d_of(f: LaurentPoly) -> LogForm:
    return LogForm.function(f).d()


# --------------------------------------------------------------------------
# pole orders and basis conversions


def pole_membership(omega: LogForm, b: Mapping[str, int]) -> bool:
    """True iff ``t^b * omega`` has no negative exponent in any listed log variable.

    ``b`` maps log-variable names to pole orders; negative entries express
    zero-order conditions (``b = -1`` means divisible by t).
    """
    ring = omega.ring
    for name, order in b.items():
        k = ring.roster.index(name)
        if not ring.roster.is_log(k):
            raise ValueError(f"{name} is not a log variable")
        m = omega.min_exponent(k)
        if m is not None and m + order < 0:
            return False
    return True


def regular_exponents(omega: LogForm, names: Iterable[str]) -> Dict[Word, LaurentPoly]:
    """Coefficients in the basis where ``dlog t`` is replaced by ``dt``.

    For each listed log variable ``t`` in a word, ``f dlog t = (f / t) dt``,
    so the coefficient is shifted by ``-1`` in ``t``.
    """
    ring = omega.ring
    idx = [ring.roster.index(n) for n in names]
    out = {}
    for S, f in omega.comps.items():
        sh = [0] * ring.nvars
        for k in idx:
            if k in S:
                sh[k] = -1
        out[S] = f.shift(tuple(sh))
    return out


def is_regular_in(omega: LogForm, names: Iterable[str]) -> bool:
    """True iff omega has no pole, logarithmic or otherwise, along the listed variables."""
    names = list(names)
    ring = omega.ring
    idx = [ring.roster.index(n) for n in names]
    for S, f in regular_exponents(omega, names).items():
        for k in idx:
            m = f.min_exp(k)
            if m is not None and m < 0:
                return False
    return True


def lemma42_criterion(omega: LogForm, t: str) -> Tuple[bool, bool]:
    """Two tests of divisibility by t for a form without pole along t.

    The first asks whether ``omega`` lies in ``t * Omega(log t)``; the second
    whether ``omega ^ dlog t`` has no pole at all along t.  They agree on
    every form that is regular along t.
    """
    if not is_regular_in(omega, [t]):
        raise ValueError(f"form {omega.to_text()} has a pole along {t}")
    lhs = pole_membership(omega, {t: -1})
    rhs = is_regular_in(omega.wedge(dlog(omega.ring, t)), [t])
    return lhs, rhs


def split_top_variable(omega: LogForm, t: str) -> Tuple[LogForm, LogForm]:
    """Write ``omega = alpha + beta ^ dlog t`` with alpha, beta free of ``dlog t``."""
    ring = omega.ring
    k = ring.roster.index(t)
    if not ring.roster.is_log(k):
        raise ValueError(f"{t} is not a log variable")
    alpha, beta = {}, {}
    for S, f in omega.comps.items():
        if k in S:
            after = sum(1 for j in S if j > k)
            rest = tuple(j for j in S if j != k)
            beta[rest] = f.scale(-1 if after % 2 else 1)
        else:
            alpha[S] = f
    deg = omega.degree
    return LogForm(ring, deg, alpha), LogForm(ring, max(deg - 1, 0), beta)


def join_top_variable(alpha: LogForm, beta: LogForm, t: str) -> LogForm:
    return alpha + beta.wedge(dlog(alpha.ring, t))
