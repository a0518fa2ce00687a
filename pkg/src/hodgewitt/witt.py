"""Witt vectors over characteristic-p Laurent rings.

Components are Laurent polynomials over F_p.  Sums and products go through
ghost components of arbitrary integral lifts: to recover the j-th
component mod p one needs the ghost identities mod p^(j+1), and
``x^(p^k) mod p^(k+1)`` depends only on ``x mod p``, so lifting to
precision n is enough.  Every p-adic division is checked to be exact.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

from .errors import NotClosedError, PrecisionError, RosterMismatch
from .forms import LogForm
from .laurent import LaurentPoly, LaurentRing, frobenius_lift, frobenius_root
from .zpn import ceil_rat


class WittVector:
    __slots__ = ("p", "n", "comps")

    def __init__(self, p: int, n: int, comps: Sequence[LaurentPoly]):
        comps = tuple(comps)
        if len(comps) != n:
            raise ValueError(f"expected {n} components, got {len(comps)}")
        if n < 1:
            raise ValueError("length must be >= 1")
        ring = comps[0].ring
        for c in comps:
            if c.ring != ring:
                raise RosterMismatch("Witt components over different rings")
        if ring.N != 1 or ring.p != p:
            raise ValueError(f"components must live over F_{p}, got {ring}")
        self.p, self.n, self.comps = p, n, comps

    @property
    def ring(self) -> LaurentRing:
        return self.comps[0].ring

    @classmethod
    def zero(cls, ring: LaurentRing, n: int) -> "WittVector":
        return cls(ring.p, n, [ring.zero()] * n)

    def _check(self, other: "WittVector"):
        if (self.p, self.n, self.ring) != (other.p, other.n, other.ring):
            raise RosterMismatch("Witt vectors with different p, n or roster")

    def __eq__(self, other):
        if not isinstance(other, WittVector):
            return NotImplemented
        return (self.p, self.n, self.comps) == (other.p, other.n, other.comps)

    def __hash__(self):
        return hash((self.p, self.n, self.comps))

    def __add__(self, other: "WittVector") -> "WittVector":
        self._check(other)
        return _combine(self, other, lambda x, y: x + y)

    def __mul__(self, other):
        if isinstance(other, int):
            return scalar_multiple(self, other)
        self._check(other)
        return _combine(self, other, lambda x, y: x * y)

    __rmul__ = __mul__

    def __neg__(self) -> "WittVector":
        return scalar_multiple(self, -1)

    def __sub__(self, other: "WittVector") -> "WittVector":
        return self + (-other)

    def is_zero(self) -> bool:
        return all(not c for c in self.comps)

    def to_text(self) -> str:
        return f"W(p={self.p},n={self.n})[" + "; ".join(c.to_text() for c in self.comps) + "]"

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"WittVector({self.to_text()!r})"


# --------------------------------------------------------------------------
# ghost arithmetic


def lift(f: LaurentPoly, ring: LaurentRing) -> LaurentPoly:
    """Lift coefficients in [0, p) to a higher precision ring."""
    return LaurentPoly(ring, f.terms)


def ghost_components(x: Sequence[LaurentPoly]) -> List[LaurentPoly]:
    """``w_j = sum_{i <= j} p^i x_i^(p^(j-i))`` over the ring of the lifts."""
    ring = x[0].ring
    p = ring.p
    out = []
    for j in range(len(x)):
        w = ring.zero()
        for i in range(j + 1):
            w = w + (x[i] ** (p ** (j - i))).scale(p ** i)
        out.append(w)
    return out


def from_ghost(w: Sequence[LaurentPoly]) -> List[LaurentPoly]:
    """Invert the ghost map by successive exact division; returns integral components."""
    ring = w[0].ring
    p = ring.p
    x: List[LaurentPoly] = []
    for j in range(len(w)):
        rest = w[j]
        for i in range(j):
            rest = rest - (x[i] ** (p ** (j - i))).scale(p ** i)
        q = rest.divide_by_p_power(j)
        if q is None:
            raise PrecisionError(f"ghost component {j} is not divisible by p^{j}")
        x.append(q)
    return x


def _combine(a: WittVector, b: WittVector, op: Callable) -> WittVector:
    ring = a.ring
    hi = ring.with_precision(a.n)
    ga = ghost_components([lift(c, hi) for c in a.comps])
    gb = ghost_components([lift(c, hi) for c in b.comps])
    x = from_ghost([op(u, v) for u, v in zip(ga, gb)])
    return WittVector(a.p, a.n, [c.change_ring(ring) for c in x])


def scalar_multiple(a: WittVector, k: int) -> WittVector:
    ring = a.ring
    hi = ring.with_precision(a.n)
    ga = ghost_components([lift(c, hi) for c in a.comps])
    x = from_ghost([g.scale(k) for g in ga])
    return WittVector(a.p, a.n, [c.change_ring(ring) for c in x])


def teichmuller(f: LaurentPoly, n: int) -> WittVector:
    ring = f.ring
    return WittVector(ring.p, n, [f] + [ring.zero()] * (n - 1))


def frobenius_W(a: WittVector) -> WittVector:
    """Componentwise p-th power (the Witt Frobenius in characteristic p)."""
    return WittVector(a.p, a.n, [frobenius_lift(c) for c in a.comps])


def frobenius_W_root(a: WittVector, k: int = 1) -> Optional[WittVector]:
    """The unique b with F^k(b) = a, or None when some component is not a p^k-th power."""
    roots = [frobenius_root(c, k) for c in a.comps]
    if any(r is None for r in roots):
        return None
    return WittVector(a.p, a.n, roots)


def verschiebung(a: WittVector) -> WittVector:
    return WittVector(a.p, a.n, [a.ring.zero()] + list(a.comps[:-1]))


def restriction(a: WittVector, m: int) -> WittVector:
    return WittVector(a.p, m, a.comps[:m])


# --------------------------------------------------------------------------
# the map from closed functions over Z/p^n


def is_closed_function(b: LaurentPoly, n: int) -> bool:
    """d(b mod p^n) = 0 in Omega^1 over Z/p^n."""
    ring_n = b.ring.with_precision(n)
    return LogForm.function(b.change_ring(ring_n)).d().is_zero()


def beta(b: LaurentPoly, n: int, check: bool = True) -> WittVector:
    """Witt vector attached to a closed function b given at precision 2n (or more).

    Solves ``sum_{i<=j} p^i a_i^(p^(j-i)) = F^j(b)`` for ``j < n`` with F the
    lift ``x -> x^p`` on every variable, and returns ``a_j mod p``.  The
    recursion itself works for any b (F is a Frobenius lift, so the
    divisions are exact); ``check=False`` skips the closedness test.
    """
    ring = b.ring
    p = ring.p
    if ring.N < 2 * n:
        raise PrecisionError(f"need precision at least 2n = {2 * n}, got {ring.N}")
    if check and not is_closed_function(b, n):
        raise NotClosedError(f"d({b.change_ring(ring.with_precision(n)).to_text()}) is not zero over Z/{p}^{n}")
    a: List[LaurentPoly] = []
    Fb = b
    for j in range(n):
        rest = Fb
        for i in range(j):
            rest = rest - (a[i] ** (p ** (j - i))).scale(p ** i)
        q = rest.divide_by_p_power(j)
        if q is None:
            raise PrecisionError(f"step {j}: right-hand side not divisible by p^{j}")
        a.append(q)
        Fb = frobenius_lift(Fb)
    fp = ring.with_precision(1)
    return WittVector(p, n, [x.change_ring(fp) for x in a])


# --------------------------------------------------------------------------
# the Witt-vector filtration test


def _min_t_exponent(f: LaurentPoly, k: int) -> Optional[int]:
    return f.min_exp(k)


def koizumi_membership(a: WittVector, r, t: str) -> bool:
    """Does ``t^(ceil(r)-1) F^(n-1)(a)`` lie in W_n of the ring without t-poles?

    Componentwise: for every j, ``p^j (ceil(r)-1) + p^(n-1) k >= 0`` for each
    t-exponent k of ``a_j``.  For r = 0 this is integrality of every component.
    """
    r = Fraction(r)
    if r < 0:
        raise ValueError("r must be nonnegative")
    k = a.ring.roster.index(t)
    p, n = a.p, a.n
    if r == 0:
        return all((c.min_exp(k) is None or c.min_exp(k) >= 0) for c in a.comps)
    N = ceil_rat(r) - 1
    for j, c in enumerate(a.comps):
        m = c.min_exp(k)
        if m is not None and p ** j * N + p ** (n - 1) * m < 0:
            return False
    return True


def frobenius_twisted_condition(a: WittVector, r, t: str) -> bool:
    """``t^(p^(j+1) (ceil(r)-1)) a_j`` has no t-pole for every j (r > 0).

    This is the condition on the components of F^n(c) equivalent to
    ``koizumi_membership(c, r)``; for r = 0 it is plain integrality.
    """
    r = Fraction(r)
    k = a.ring.roster.index(t)
    if r == 0:
        return all((c.min_exp(k) is None or c.min_exp(k) >= 0) for c in a.comps)
    N = ceil_rat(r) - 1
    p = a.p
    for j, c in enumerate(a.comps):
        m = c.min_exp(k)
        if m is not None and p ** (j + 1) * N + m < 0:
            return False
    return True


def beta_filtration_membership(b: LaurentPoly, n: int, r, t: str) -> Tuple[bool, bool]:
    """Both routes from a closed function to the Witt filtration test.

    Returns ``(koizumi_membership(F^-n(beta(b)), r), frobenius_twisted_condition(beta(b), r))``.
    """
    w = beta(b, n)
    root = frobenius_W_root(w, n)
    if root is None:
        raise PrecisionError(f"beta({b.to_text()}) has a component that is not a p^{n}-th power")
    return koizumi_membership(root, r, t), frobenius_twisted_condition(w, r, t)


def closed_functions_sample(ring: LaurentRing, n: int, rng, window: Sequence[Tuple[int, int]], terms: int = 4) -> LaurentPoly:
    """A random closed function over Z/p^n, returned in ``ring`` (precision >= n).

    Uses ``sum c_m x^m`` with ``m_k c_m = 0 mod p^n`` for every k, then adds
    ``p^n`` times random noise so the precision-2n lift is arbitrary.
    """

    p = ring.p
    qn = p ** n
    out = ring.zero()
    for _ in range(terms):
        m = tuple(rng.randint(lo, hi) for lo, hi in window)
        v = min((_val(x, p, n) for x in m), default=n)
        # coefficient must be divisible by p^(n - v)
        c = rng.randrange(qn) * p ** (n - v) % qn
        out = out + ring.monomial(m, c)
    noise = ring.zero()
    for _ in range(rng.randint(0, 2)):
        m = tuple(rng.randint(lo, hi) for lo, hi in window)
        noise = noise + ring.monomial(m, rng.randrange(ring.q))
    return out + noise.scale(qn)


def _val(x: int, p: int, cap: int) -> int:
    if x == 0:
        return cap
    v = 0
    while x % p == 0 and v < cap:
        x //= p
        v += 1
    return v
