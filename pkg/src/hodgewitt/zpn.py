"""Scalars in Z/p^N, rational exponents, and Howell normal form.

All cohomology in this package reduces to linear algebra over the local
ring Z/p^N.  Row spans are compared and queried through the Howell form,
which is canonical for a row span over such a ring.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

from .errors import DimensionMismatch, ModulusMismatch, NotAUnit


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    for d in range(2, math.isqrt(p) + 1):
        if p % d == 0:
            return False
    return True


@dataclass(frozen=True)
class Modulus:
    """The coefficient ring Z/p^N."""

    p: int
    N: int
    q: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"p={self.p} is not prime")
        if self.N < 1:
            raise ValueError(f"precision N={self.N} must be >= 1")
        object.__setattr__(self, "q", self.p ** self.N)

    def valuation(self, x: int) -> int:
        """p-adic valuation of x mod p^N; the zero class has valuation N."""
        x %= self.q
        if x == 0:
            return self.N
        v = 0
        while x % self.p == 0:
            x //= self.p
            v += 1
        return v

    def inverse(self, x: int) -> int:
        x %= self.q
        if x % self.p == 0:
            raise NotAUnit(f"{x} is not a unit mod {self.p}^{self.N}")
        return pow(x, -1, self.q)

    def __str__(self):
        return f"Z/{self.p}^{self.N}"


class Scalar:
    """A residue class in Z/p^N that remembers its ring."""

    __slots__ = ("value", "modulus")

    def __init__(self, value: int, modulus: Modulus):
        self.value = int(value) % modulus.q
        self.modulus = modulus

    @classmethod
    def of(cls, value: int, p: int, N: int) -> "Scalar":
        return cls(value, Modulus(p, N))

    def _coerce(self, other) -> int:
        if isinstance(other, Scalar):
            if other.modulus != self.modulus:
                raise ModulusMismatch(f"{self.modulus} vs {other.modulus}")
            return other.value
        if isinstance(other, int):
            return other
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else Scalar(self.value + o, self.modulus)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else Scalar(self.value - o, self.modulus)

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else Scalar(o - self.value, self.modulus)

    def __mul__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else Scalar(self.value * o, self.modulus)

    __rmul__ = __mul__

    def __neg__(self):
        return Scalar(-self.value, self.modulus)

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        return Scalar(pow(self.value, k, self.modulus.q), self.modulus)

    def __eq__(self, other):
        if isinstance(other, Scalar):
            return self.modulus == other.modulus and self.value == other.value
        if isinstance(other, int):
            return self.value == other % self.modulus.q
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.modulus))

    def __repr__(self):
        return f"Scalar({self.value}, {self.modulus})"

    def is_unit(self) -> bool:
        return self.value % self.modulus.p != 0

    def is_nilpotent(self) -> bool:
        return not self.is_unit()

    def valuation(self) -> int:
        return self.modulus.valuation(self.value)

    def inverse(self) -> "Scalar":
        return Scalar(self.modulus.inverse(self.value), self.modulus)


# --------------------------------------------------------------------------
# rational exponents

RatExponent = Fraction


def as_rat(r: Union[int, str, Fraction]) -> Fraction:
    """Parse an exponent such as ``3``, ``"5/2"`` or ``Fraction(7, 3)``."""
    return Fraction(r)


def ceil_rat(r) -> int:
    r = Fraction(r)
    return -((-r.numerator) // r.denominator)


def ceil_identity(r, e: int) -> bool:
    """Check ceil(ceil(r)/e) == ceil(r/e) for one pair (r, e)."""
    r = Fraction(r)
    return ceil_rat(Fraction(ceil_rat(r), e)) == ceil_rat(r / e)


# --------------------------------------------------------------------------
# Howell form


@dataclass(frozen=True)
class HowellMatrix:
    """Howell normal form of a matrix over Z/p^N.

    ``rows`` is the canonical form: echelon, pivots equal to powers of p,
    entries above a pivot ``p^v`` reduced into ``[0, p^v)``, and each row
    times the annihilator of its pivot lies in the span of the rows below.
    ``transform[k]`` expresses ``rows[k]`` in terms of the input rows.
    """

    modulus: Modulus
    ncols: int
    nsource: int
    rows: tuple
    pivots: tuple
    transform: tuple

    def __len__(self):
        return len(self.rows)

    def span_membership(self, v: Sequence[int]) -> Optional[list]:
        return span_membership(v, self)

    def contains(self, v: Sequence[int]) -> bool:
        return _reduce_against(list(v), self, track=False) is not None


def _entries(matrix, modulus: Optional[Modulus]):
    mods = {x.modulus for row in matrix for x in row if isinstance(x, Scalar)}
    if len(mods) > 1:
        raise ModulusMismatch(f"mixed moduli in matrix: {sorted(map(str, mods))}")
    if mods:
        (m,) = mods
        if modulus is not None and modulus != m:
            raise ModulusMismatch(f"{m} vs {modulus}")
        modulus = m
    if modulus is None:
        raise ValueError("integer matrices need an explicit modulus")
    rows = [[x.value if isinstance(x, Scalar) else int(x) % modulus.q for x in row] for row in matrix]
    return rows, modulus


def howell_form(matrix, modulus: Optional[Modulus] = None, ncols: Optional[int] = None) -> HowellMatrix:
    """Howell form of the row span of ``matrix``.

    Entries may be Scalars (sharing one modulus) or plain ints together
    with ``modulus``.  ``ncols`` is needed only when the matrix has no rows.
    """
    rows, modulus = _entries(matrix, modulus)
    if rows:
        widths = {len(r) for r in rows}
        if len(widths) != 1:
            raise DimensionMismatch("ragged matrix")
        (width,) = widths
        if ncols is not None and ncols != width:
            raise DimensionMismatch(f"expected {ncols} columns, got {width}")
        ncols = width
    elif ncols is None:
        ncols = 0
    p, q, N = modulus.p, modulus.q, modulus.N
    m = len(rows)
    pool = []
    for j, r in enumerate(rows):
        tr = [0] * m
        tr[j] = 1
        pool.append((r, tr))
    out = []
    for c in range(ncols):
        best = None
        for idx, (r, _) in enumerate(pool):
            if r[c]:
                v = modulus.valuation(r[c])
                if best is None or v < best[0]:
                    best = (v, idx)
                    if v == 0:
                        break
        if best is None:
            continue
        v, idx = best
        r, tr = pool.pop(idx)
        pv = p ** v
        inv = pow(r[c] // pv, -1, q)
        r = [x * inv % q for x in r]
        tr = [x * inv % q for x in tr]
        for s, ts in pool:
            x = s[c]
            if x:
                f = x // pv
                s[:] = [(a - f * b) % q for a, b in zip(s, r)]
                ts[:] = [(a - f * b) % q for a, b in zip(ts, tr)]
        if v > 0:
            ann = p ** (N - v)
            s = [x * ann % q for x in r]
            if any(s):
                pool.append((s, [x * ann % q for x in tr]))
        out.append([c, v, r, tr])
    for k, (c, v, r, tr) in enumerate(out):
        pv = p ** v
        for j in range(k):
            rj, trj = out[j][2], out[j][3]
            f = rj[c] // pv
            if f:
                rj[:] = [(a - f * b) % q for a, b in zip(rj, r)]
                trj[:] = [(a - f * b) % q for a, b in zip(trj, tr)]
    return HowellMatrix(
        modulus=modulus,
        ncols=ncols,
        nsource=m,
        rows=tuple(tuple(o[2]) for o in out),
        pivots=tuple((o[0], o[1]) for o in out),
        transform=tuple(tuple(o[3]) for o in out),
    )


def _reduce_against(v: list, h: HowellMatrix, track: bool):
    mod = h.modulus
    q, p = mod.q, mod.p
    if len(v) != h.ncols:
        raise DimensionMismatch(f"vector of length {len(v)} against {h.ncols} columns")
    w = [x.value if isinstance(x, Scalar) else int(x) % q for x in v]
    coeffs = [0] * h.nsource if track else None
    for (c, val), row, tr in zip(h.pivots, h.rows, h.transform):
        x = w[c]
        if not x:
            continue
        pv = p ** val
        if x % pv:
            return None
        f = x // pv
        w = [(a - f * b) % q for a, b in zip(w, row)]
        if track:
            coeffs = [(a + f * b) % q for a, b in zip(coeffs, tr)]
    if any(w):
        return None
    return coeffs if track else True


def span_membership(v: Sequence[int], h: HowellMatrix) -> Optional[list]:
    """Coefficients ``c`` over the *input* rows of ``h`` with ``c . rows = v``.

    Returns None when ``v`` is outside the row span.
    """
    return _reduce_against(list(v), h, track=True)


def left_kernel(matrix: Sequence[Sequence[int]], modulus: Modulus, ncols: int) -> list:
    """Generators of ``{x : x . matrix = 0}`` as canonical Howell rows."""
    m = len(matrix)
    if m == 0:
        return []
    aug = []
    for j, row in enumerate(matrix):
        e = [0] * m
        e[j] = 1
        aug.append(list(row) + e)
    h = howell_form(aug, modulus, ncols + m)
    gens = [row[ncols:] for row in h.rows if not any(row[:ncols])]
    if not gens:
        return []
    return [list(r) for r in howell_form(gens, modulus, m).rows]


def matmul_rows(rows: Iterable[Sequence[int]], matrix: Sequence[Sequence[int]], q: int, ncols: int) -> list:
    out = []
    for r in rows:
        acc = [0] * ncols
        for x, mrow in zip(r, matrix):
            if x:
                for k, y in enumerate(mrow):
                    if y:
                        acc[k] = (acc[k] + x * y) % q
        out.append(acc)
    return out
