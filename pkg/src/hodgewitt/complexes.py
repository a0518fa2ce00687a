"""Pole-twisted log de Rham complexes, their quotients, and cohomology.

A ComplexSpec describes ``t^-b Omega(log)`` over Z/p^n (optionally modulo
``t^-b' Omega(log)``, optionally reduced to Z/p^n').  Since d preserves the
multidegree, each complex is the direct sum of finite Koszul complexes, one
per multidegree ``M``; in multidegree ``M`` the differential sends the word
``S`` to ``sum_{k not in S} sign * M_k * (S + k)``.  Everything below is
computed one multidegree at a time and cached on the data that actually
determines the local complex (allowed words and weights mod p^n).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

from .errors import InvalidChainMap, ResourceError, UnsupportedSpec, WindowError
from .forms import LogForm, Word, insert_sign, split_top_variable, word_multidegree_shift
from .laurent import Exps, LaurentPoly, LaurentRing, VarRoster
from .report import Report
from .zpn import HowellMatrix, Modulus, howell_form, left_kernel

DEFAULT_CAP = 250_000

Bound = Optional[int]


# --------------------------------------------------------------------------
# specs and windows


@dataclass(frozen=True)
class ComplexSpec:
    """``t^-poles Omega(log)`` over Z/p^n, optionally a quotient or a reduction.

    ``poles`` has one entry per roster variable: an integer pole order for a
    log variable, ``None`` for no bound (the Laurent direction), and 0 for
    plain variables.  Log variables listed in ``regular`` carry no log pole
    (only pole order 0 is allowed there), giving ``Omega_A`` in that direction.
    """

    roster: VarRoster
    p: int
    n: int
    poles: Tuple[Bound, ...]
    regular: frozenset = frozenset()
    sub_poles: Optional[Tuple[Bound, ...]] = None
    sub_regular: frozenset = frozenset()
    n_red: Optional[int] = None

    def __post_init__(self):
        d = len(self.roster)
        if len(self.poles) != d or (self.sub_poles is not None and len(self.sub_poles) != d):
            raise ValueError("pole vector length does not match roster")
        for k, v in enumerate(self.roster):
            for pv in (self.poles, self.sub_poles):
                if pv is None:
                    continue
                if not v.log and pv[k] not in (0, None):
                    raise ValueError(f"plain variable {v.name} cannot carry a pole")
        for reg, pv in ((self.regular, self.poles), (self.sub_regular, self.sub_poles)):
            for k in reg:
                if not self.roster.is_log(k):
                    raise ValueError("only log variables can be marked regular")
                if pv is not None and pv[k] != 0:
                    raise UnsupportedSpec("a regular direction needs pole order 0 to be a complex")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.n_red is not None and not 1 <= self.n_red <= self.n:
            raise ValueError(f"reduction n'={self.n_red} must satisfy 1 <= n' <= n={self.n}")
        if self.sub_poles is not None:
            for k in range(d):
                for inside in (False, True):
                    a = _lower(self.poles, self.regular, self.roster, k, inside)
                    b = _lower(self.sub_poles, self.sub_regular, self.roster, k, inside)
                    if a is not None and (b is None or b < a):
                        raise ValueError("the quotient denominator must be contained in the numerator")

    @classmethod
    def make(
        cls,
        roster,
        p: int,
        n: int,
        poles: Optional[Mapping[str, Bound]] = None,
        regular: Iterable[str] = (),
        sub: Optional[Mapping[str, Bound]] = None,
        sub_regular: Iterable[str] = (),
        n_red: Optional[int] = None,
    ) -> "ComplexSpec":
        """Build a spec from name-keyed pole orders (missing log variables get 0)."""
        if isinstance(roster, str):
            roster = VarRoster.parse(roster)

        def vec(m):
            m = dict(m or {})
            for name in m:
                roster.index(name)
            return tuple(m.get(v.name, 0) if v.log else 0 for v in roster)

        return cls(
            roster,
            p,
            n,
            vec(poles),
            frozenset(roster.index(x) for x in regular),
            None if sub is None else vec(sub),
            frozenset(roster.index(x) for x in sub_regular),
            n_red,
        )

    @property
    def n_eff(self) -> int:
        return self.n_red if self.n_red is not None else self.n

    @property
    def is_quotient(self) -> bool:
        return self.sub_poles is not None

    def with_(self, **kw) -> "ComplexSpec":
        from dataclasses import replace

        return replace(self, **kw)

    def describe(self) -> dict:
        names = self.roster.names

        def pv(v):
            return {names[k]: v[k] for k in self.roster.log_indices}

        d = {"vars": str(self.roster), "p": self.p, "n": self.n, "poles": pv(self.poles)}
        if self.regular:
            d["regular"] = sorted(names[k] for k in self.regular)
        if self.sub_poles is not None:
            d["quotient_by"] = pv(self.sub_poles)
            if self.sub_regular:
                d["quotient_regular"] = sorted(names[k] for k in self.sub_regular)
        if self.n_red is not None:
            d["reduced_to"] = self.n_red
        return d


def _lower(poles, regular, roster, k: int, inside: bool) -> Bound:
    """Least allowed multidegree in variable k for a word that does/doesn't contain k."""
    if roster.is_log(k):
        b = poles[k]
        if b is None:
            return None
        return -b + (1 if (inside and k in regular) else 0)
    return 1 if inside else 0


@dataclass(frozen=True)
class DegreeWindow:
    """Inclusive multidegree bounds, one pair per roster variable."""

    bounds: Tuple[Tuple[int, int], ...]

    @classmethod
    def make(cls, roster: VarRoster, bounds: Sequence[Tuple[int, int]]) -> "DegreeWindow":
        if len(bounds) != len(roster):
            raise WindowError(f"{len(bounds)} bounds for {len(roster)} variables")
        out = []
        for v, (lo, hi) in zip(roster, bounds):
            if lo > hi:
                raise WindowError(f"empty window [{lo}, {hi}] for {v.name}")
            if not v.log and lo < 0:
                raise WindowError(f"plain variable {v.name} needs a nonnegative lower bound")
            out.append((int(lo), int(hi)))
        return cls(tuple(out))

    @classmethod
    def uniform(cls, roster: VarRoster, lo: int, hi: int) -> "DegreeWindow":
        """Same bounds for every variable; plain variables start at max(lo, 0)."""
        return cls.make(roster, [(lo if v.log else max(lo, 0), hi) for v in roster])

    def size(self) -> int:
        out = 1
        for lo, hi in self.bounds:
            out *= hi - lo + 1
        return out

    def __iter__(self) -> Iterator[Exps]:
        return itertools.product(*[range(lo, hi + 1) for lo, hi in self.bounds])

    def __contains__(self, M) -> bool:
        return all(lo <= m <= hi for m, (lo, hi) in zip(M, self.bounds))

    def to_list(self):
        return [list(b) for b in self.bounds]


# --------------------------------------------------------------------------
# local (single multidegree) linear algebra, cached


def koszul_matrix(rows: Sequence[Word], cols: Sequence[Word], weights: Sequence[int], q: int) -> List[List[int]]:
    index = {S: j for j, S in enumerate(cols)}
    out = []
    for S in rows:
        r = [0] * len(cols)
        for k, w in enumerate(weights):
            if k in S or not w:
                continue
            U = tuple(sorted(S + (k,)))
            j = index.get(U)
            if j is not None:
                r[j] = (r[j] + insert_sign(k, S) * w) % q
        out.append(r)
    return out


def span_length(h: HowellMatrix) -> int:
    """log_p of the number of elements in the row span."""
    N = h.modulus.N
    return sum(N - v for _, v in h.pivots)


@dataclass(frozen=True)
class LocalCohomology:
    words: Tuple[Word, ...]
    D_prev: tuple
    D_cur: tuple
    Z: HowellMatrix
    B: HowellMatrix
    gens: Tuple[Tuple[int, ...], ...]

    @property
    def length(self) -> int:
        return span_length(self.Z) - span_length(self.B)


@lru_cache(maxsize=200_000)
def local_cohomology(p: int, N: int, prev: tuple, cur: tuple, nxt: tuple, weights: tuple) -> LocalCohomology:
    mod = Modulus(p, N)
    q = mod.q
    D_prev = koszul_matrix(prev, cur, weights, q)
    D_cur = koszul_matrix(cur, nxt, weights, q)
    B = howell_form(D_prev, mod, len(cur))
    if nxt:
        K = left_kernel(D_cur, mod, len(nxt))
    else:
        K = [[1 if a == b else 0 for b in range(len(cur))] for a in range(len(cur))]
    Z = howell_form(K, mod, len(cur))
    gens = tuple(tuple(z) for z in Z.rows if not B.contains(z))
    return LocalCohomology(cur, tuple(map(tuple, D_prev)), tuple(map(tuple, D_cur)), Z, B, gens)


# --------------------------------------------------------------------------
# complexes


@dataclass(frozen=True)
class CohClass:
    spec: ComplexSpec
    degree: int
    rep: LogForm
    multidegree: Optional[Exps] = None

    def __str__(self):
        return self.rep.to_text()


class Complex:
    """Concrete access to a ComplexSpec: words, differentials, cohomology."""

    def __init__(self, spec: ComplexSpec, cap: int = DEFAULT_CAP):
        self.spec = spec
        self.roster = spec.roster
        self.p = spec.p
        self.N = spec.n_eff
        self.ring = LaurentRing(spec.roster, spec.p, self.N)
        self.modulus = self.ring.modulus
        self.q = self.ring.q
        self.d = len(spec.roster)
        self.cap = cap
        self._num = [(_lower(spec.poles, spec.regular, spec.roster, k, False),
                      _lower(spec.poles, spec.regular, spec.roster, k, True)) for k in range(self.d)]
        if spec.sub_poles is None:
            self._sub = None
        else:
            self._sub = [(_lower(spec.sub_poles, spec.sub_regular, spec.roster, k, False),
                          _lower(spec.sub_poles, spec.sub_regular, spec.roster, k, True)) for k in range(self.d)]
        self._words_cache: Dict[Tuple[Exps, int], Tuple[Word, ...]] = {}

    def __repr__(self):
        return f"Complex({self.spec.describe()})"

    # -- words -------------------------------------------------------------

    @staticmethod
    def _allowed(bounds, M: Exps, S: Word) -> bool:
        for k, (out_lb, in_lb) in enumerate(bounds):
            lb = in_lb if k in S else out_lb
            if lb is not None and M[k] < lb:
                return False
        return True

    def in_numerator(self, M: Exps, S: Word) -> bool:
        return self._allowed(self._num, M, S)

    def in_denominator(self, M: Exps, S: Word) -> bool:
        return self._sub is not None and self._allowed(self._sub, M, S)

    def words(self, M: Exps, i: int) -> Tuple[Word, ...]:
        key = (M, i)
        w = self._words_cache.get(key)
        if w is None:
            if i < 0 or i > self.d:
                w = ()
            else:
                w = tuple(
                    S
                    for S in itertools.combinations(range(self.d), i)
                    if self.in_numerator(M, S) and not self.in_denominator(M, S)
                )
            if len(self._words_cache) > 100_000:
                self._words_cache.clear()
            self._words_cache[key] = w
        return w

    def weights(self, M: Exps) -> Tuple[int, ...]:
        return tuple(m % self.q for m in M)

    def local(self, M: Exps, i: int) -> LocalCohomology:
        M = tuple(M)
        return local_cohomology(
            self.p, self.N, self.words(M, i - 1), self.words(M, i), self.words(M, i + 1), self.weights(M)
        )

    def coefficient_exponent(self, M: Exps, S: Word) -> Exps:
        sh = word_multidegree_shift(self.ring, S)
        return tuple(m - s for m, s in zip(M, sh))

    def basis_form(self, M: Exps, S: Word, c: int = 1) -> LogForm:
        return LogForm.monomial(self.ring, self.coefficient_exponent(M, S), S, c)

    # -- forms <-> vectors -----------------------------------------------

    def to_ring(self, omega: LogForm) -> LogForm:
        if omega.ring == self.ring:
            return omega
        if omega.ring.roster != self.roster or omega.ring.p != self.p:
            raise InvalidChainMap(f"form over {omega.ring} does not belong to {self}")
        if omega.ring.N < self.N:
            raise InvalidChainMap(f"form over {omega.ring} has too little precision for {self}")
        return omega.change_ring(self.ring)

    def reduce(self, omega: LogForm) -> LogForm:
        """Image in this complex: coefficients mod p^n', denominator terms dropped.

        Raises ValueError if some term lies outside the numerator.
        """
        omega = self.to_ring(omega)
        out: Dict[Word, Dict[Exps, int]] = {}
        for S, f in omega.comps.items():
            sh = word_multidegree_shift(self.ring, S)
            for e, c in f.terms.items():
                M = tuple(a + b for a, b in zip(e, sh))
                if not self.in_numerator(M, S):
                    raise ValueError(f"term of {omega.to_text()} in word {S} lies outside {self.spec.describe()}")
                if self.in_denominator(M, S):
                    continue
                out.setdefault(S, {})[e] = c
        return LogForm(self.ring, omega.degree, {S: LaurentPoly(self.ring, t) for S, t in out.items()})

    def contains(self, omega: LogForm) -> bool:
        try:
            self.reduce(omega)
        except ValueError:
            return False
        return True

    def vector(self, omega: LogForm, M: Exps, i: Optional[int] = None) -> List[int]:
        """Coordinates of the multidegree-M part of omega in ``words(M, i)``."""
        i = omega.degree if i is None else i
        omega = self.to_ring(omega)
        ws = self.words(M, i)
        out = []
        for S in ws:
            out.append(omega.component(S).terms.get(self.coefficient_exponent(M, S), 0) % self.q)
        return out

    def form_from_vector(self, M: Exps, i: int, vec: Sequence[int]) -> LogForm:
        comps = {}
        for S, c in zip(self.words(M, i), vec):
            if c % self.q:
                comps[S] = self.ring.monomial(self.coefficient_exponent(M, S), c)
        return LogForm(self.ring, i, comps)

    def pieces(self, omega: LogForm) -> Dict[Exps, LogForm]:
        return self.reduce(omega).by_multidegree()

    # -- differential and cohomology ---------------------------------------

    def differential(self, omega: LogForm) -> LogForm:
        return self.reduce(self.reduce(omega).d())

    def is_closed(self, omega: LogForm) -> bool:
        return self.differential(omega).is_zero()

    def primitive(self, omega: LogForm) -> Optional[LogForm]:
        """Some eta in this complex with d(eta) = omega, or None."""
        omega = self.reduce(omega)
        i = omega.degree
        eta = LogForm.zero(self.ring, max(i - 1, 0))
        for M, piece in sorted(omega.by_multidegree().items()):
            loc = self.local(M, i)
            v = self.vector(piece, M, i)
            c = loc.B.span_membership(v)
            if c is None:
                return None
            eta = eta + self.form_from_vector(M, i - 1, c)
        return eta

    def is_exact(self, omega: LogForm) -> bool:
        return self.primitive(omega) is not None

    def same_class(self, a: LogForm, b: LogForm) -> bool:
        return self.is_exact(self.reduce(a) - self.reduce(b))

    def _window_iter(self, window: DegreeWindow) -> Iterator[Exps]:
        if window.size() > self.cap:
            raise ResourceError(f"window with {window.size()} multidegrees exceeds the cap of {self.cap}")
        return iter(window)

    def cohomology_length(self, i: int, M: Exps) -> int:
        return self.local(M, i).length

    def cohomology_basis(self, i: int, window: DegreeWindow) -> List[CohClass]:
        """Generators of H^i restricted to the window, ordered by multidegree."""
        if i < 0 or i > self.d:
            return []
        out = []
        for M in self._window_iter(window):
            loc = self.local(M, i)
            for g in loc.gens:
                out.append(CohClass(self.spec, i, self.form_from_vector(M, i, g), M))
        return out

    def cycles(self, i: int, M: Exps) -> List[LogForm]:
        return [self.form_from_vector(M, i, z) for z in self.local(M, i).Z.rows]

    def is_acyclic(self, window: DegreeWindow) -> bool:
        return all(self.local(M, i).length == 0 for M in self._window_iter(window) for i in range(self.d + 1))

    # -- images of other complexes --------------------------------------

    def _embed_rows(self, sub: "Complex", M: Exps, i: int, rows) -> List[List[int]]:
        """Move coordinate rows of ``sub`` at (M, i) into this complex's coordinates."""
        src_words = sub.words(M, i)
        index = {S: j for j, S in enumerate(self.words(M, i))}
        out = []
        for r in rows:
            v = [0] * len(index)
            for S, c in zip(src_words, r):
                if not c:
                    continue
                j = index.get(S)
                if j is None:
                    if not self.in_numerator(M, S):
                        raise InvalidChainMap(f"word {S} at {M} of {sub} is not in {self}")
                    continue
                v[j] = (v[j] + c) % self.q
            out.append(v)
        return out

    def image_span(self, sub: "Complex", M: Exps, i: int) -> HowellMatrix:
        """Row span of image(Z^i(sub)) + B^i(self) at multidegree M."""
        return _image_span(self.p, self.N, sub.spec, self.spec, tuple(M), i, sub, self)

    def image_contains(self, sub: "Complex", omega: LogForm) -> bool:
        """Does the class of omega lie in the image of H^i(sub) -> H^i(self)?"""
        omega = self.reduce(omega)
        i = omega.degree
        for M, piece in omega.by_multidegree().items():
            if not self.image_span(sub, M, i).contains(self.vector(piece, M, i)):
                return False
        return True

    def image_preimage(self, sub: "Complex", omega: LogForm) -> Optional[LogForm]:
        """A cycle z of ``sub`` with omega - z exact in this complex, or None."""
        omega = self.reduce(omega)
        i = omega.degree
        z_total = LogForm.zero(sub.ring, i)
        for M, piece in sorted(omega.by_multidegree().items()):
            zrows = list(sub.local(M, i).Z.rows)
            rows = self._embed_rows(sub, M, i, zrows) + [list(b) for b in self.local(M, i).B.rows]
            h = howell_form(rows, self.modulus, len(self.words(M, i)))
            c = h.span_membership(self.vector(piece, M, i))
            if c is None:
                return None
            vec = [0] * len(sub.words(M, i))
            for coef, z in zip(c, zrows):
                for j, x in enumerate(z):
                    vec[j] = (vec[j] + coef * x) % sub.q
            z_total = z_total + sub.form_from_vector(M, i, vec)
        return z_total

    def inclusion_injective(self, sub: "Complex", M: Exps, i: int) -> bool:
        return _inclusion_lengths(sub, self, tuple(M), i)[0]

    def inclusion_surjective(self, sub: "Complex", M: Exps, i: int) -> bool:
        return _inclusion_lengths(sub, self, tuple(M), i)[1]


def window_representatives(window: DegreeWindow, complexes: Sequence[Complex]) -> List[Exps]:
    """One multidegree per class of the window on which all local data agree.

    Words depend on M_k only through which lower bounds it clears, and the
    differential only through M mod q, so per coordinate we keep the least
    value of each (thresholds cleared, residue) class.  A failing M has a
    failing representative that is coordinatewise no larger, so scanning the
    representatives in order finds the same first counterexample as a full scan.
    """
    q = {c.q for c in complexes}
    if len(q) != 1:
        raise InvalidChainMap("complexes of different precision")
    q = q.pop()
    axes = []
    for k, (lo, hi) in enumerate(window.bounds):
        ths = set()
        for c in complexes:
            for bounds in (c._num, c._sub):
                if bounds is not None:
                    ths.update(b for b in bounds[k] if b is not None)
        ths = sorted(ths)
        seen = set()
        vals = []
        for m in range(lo, hi + 1):
            key = (tuple(m >= th for th in ths), m % q)
            if key not in seen:
                seen.add(key)
                vals.append(m)
        axes.append(vals)
    return list(itertools.product(*axes))


def _structure_key(c: Complex, M: Exps, i: int):
    return (c.words(M, i - 1), c.words(M, i), c.words(M, i + 1))


def _image_span(p, N, sub_spec, spec, M, i, sub: Complex, dst: Complex) -> HowellMatrix:
    key = (p, N, _structure_key(sub, M, i), _structure_key(dst, M, i), dst.weights(M))
    return _image_span_cached(key, sub, dst, M, i)


_IMAGE_CACHE: Dict = {}


def _image_span_cached(key, sub: Complex, dst: Complex, M, i) -> HowellMatrix:
    h = _IMAGE_CACHE.get(key)
    if h is None:
        if sub.q != dst.q:
            raise InvalidChainMap("inclusion between complexes of different precision")
        rows = dst._embed_rows(sub, M, i, sub.local(M, i).Z.rows) + [list(b) for b in dst.local(M, i).B.rows]
        h = howell_form(rows, dst.modulus, len(dst.words(M, i)))
        if len(_IMAGE_CACHE) > 200_000:
            _IMAGE_CACHE.clear()
        _IMAGE_CACHE[key] = h
    return h


def _inclusion_lengths(sub: Complex, dst: Complex, M: Exps, i: int) -> Tuple[bool, bool]:
    img = dst.image_span(sub, M, i)
    ld = dst.local(M, i)
    ls = sub.local(M, i)
    image_len = span_length(img) - span_length(ld.B)
    return image_len == ls.length, span_length(img) == span_length(ld.Z)


# --------------------------------------------------------------------------
# chain maps and induced maps


@dataclass
class ChainMap:
    """A map of complexes described on forms.

    ``apply`` sends a form of ``src`` of degree i to a form of ``dst`` of
    degree ``i + shift``; ``md`` gives the multidegree of the image of a
    homogeneous piece and ``preimage`` inverts it (None when nothing maps
    there).  ``sign`` is +1 for maps commuting with d and -1 for maps into
    or out of a shifted complex that anticommute.
    """

    src: Complex
    dst: Complex
    apply: Callable[[LogForm], LogForm]
    md: Callable[[Exps], Exps]
    preimage: Callable[[Exps], Optional[Exps]]
    shift: int = 0
    sign: int = 1
    name: str = "map"

    def __call__(self, omega: LogForm) -> LogForm:
        return self.dst.reduce(self.apply(self.src.reduce(omega)))

    def matrix(self, M: Exps, i: int) -> List[List[int]]:
        """Rows: images of the src basis at (M, i) in dst coordinates at (md(M), i + shift)."""
        Md = self.md(M)
        rows = []
        for S in self.src.words(M, i):
            img = self(self.src.basis_form(M, S))
            if not img.is_zero() and img.multidegrees() - {Md}:
                raise InvalidChainMap(f"{self.name} does not send multidegree {M} to {Md}")
            rows.append(self.dst.vector(img, Md, i + self.shift))
        return rows

    def commutes_at(self, M: Exps, i: int) -> Optional[str]:
        """None if d(f(x)) = sign * f(d(x)) on the basis at (M, i); else a counterexample."""
        for S in self.src.words(M, i):
            x = self.src.basis_form(M, S)
            lhs = self.dst.differential(self(x))
            rhs = self(self.src.differential(x)).scale(self.sign)
            if lhs != rhs:
                return f"{self.name}: d f({x.to_text()}) = {lhs.to_text()} but f(d x) = {rhs.to_text()}"
        return None


def inclusion_map(src: Complex, dst: Complex) -> ChainMap:
    ident = lambda M: M  # noqa: E731
    return ChainMap(src, dst, lambda w: w.change_ring(dst.ring), ident, ident, name="inclusion")


def reduction_map(src: Complex, dst: Complex) -> ChainMap:
    """Coefficient reduction Z/p^n -> Z/p^n' (same pole data)."""
    ident = lambda M: M  # noqa: E731
    return ChainMap(src, dst, lambda w: w.change_ring(dst.ring), ident, ident, name="reduction")


def multiply_p_map(src: Complex, dst: Complex, k: int) -> ChainMap:
    """Multiplication by p^k from a lower precision complex to a higher one."""
    ident = lambda M: M  # noqa: E731
    pk = src.p ** k

    def apply(w: LogForm) -> LogForm:
        return LogForm(dst.ring, w.degree, {S: LaurentPoly(dst.ring, f.terms).scale(pk) for S, f in w.comps.items()})

    return ChainMap(src, dst, apply, ident, ident, name=f"times p^{k}")


def identity_map(c: Complex) -> ChainMap:
    ident = lambda M: M  # noqa: E731
    return ChainMap(c, c, lambda w: w, ident, ident, name="identity")


@dataclass
class InducedMap:
    """An induced map on H^i over a window, block by multidegree."""

    chain: ChainMap
    degree: int
    blocks: Dict[Exps, dict] = field(default_factory=dict)

    def is_injective(self) -> bool:
        return all(b["injective"] for b in self.blocks.values())

    def is_surjective(self) -> bool:
        return all(b["surjective"] for b in self.blocks.values())

    def is_isomorphism(self) -> bool:
        return self.is_injective() and self.is_surjective()

    def failures(self, what: str = "injective") -> List[Exps]:
        return [M for M, b in sorted(self.blocks.items()) if not b[what]]


def _lift_rows(rows, q_src: int, q_dst: int):
    return [[x % q_dst for x in r] for r in rows]


def induced_map(chain: ChainMap, i: int, window: DegreeWindow, check: bool = True, matrices: bool = True) -> InducedMap:
    """The map on H^i induced by ``chain`` for source multidegrees in ``window``.

    Injectivity and surjectivity are decided per multidegree by comparing
    lengths of finite Z/p^n-modules.  With ``matrices`` each block also
    records the images of source generators written in target generators
    (modulo boundaries).
    """
    src, dst = chain.src, chain.dst
    out = InducedMap(chain, i)
    j = i + chain.shift
    for M in src._window_iter(window):
        if check:
            for deg in (i - 1, i):
                bad = chain.commutes_at(M, deg)
                if bad:
                    raise InvalidChainMap(bad)
        Md = chain.md(M)
        ls = src.local(M, i)
        ld = dst.local(Md, j)
        F = chain.matrix(M, i)
        zimg = [_apply_rows(z, F, dst.q, len(ld.words)) for z in ls.Z.rows]
        img = howell_form(zimg + [list(b) for b in ld.B.rows], dst.modulus, len(ld.words))
        image_len = span_length(img) - span_length(ld.B)
        block = {
            "injective": image_len == ls.length,
            "surjective": span_length(img) == span_length(ld.Z),
            "source_length": ls.length,
            "target_length": ld.length,
            "image_length": image_len,
        }
        if matrices:
            tgt = howell_form([list(g) for g in ld.gens] + [list(b) for b in ld.B.rows], dst.modulus, len(ld.words))
            mat = []
            for g in ls.gens:
                v = _apply_rows(g, F, dst.q, len(ld.words))
                if tuple(v) in ld.gens:
                    k = ld.gens.index(tuple(v))
                    mat.append([1 if a == k else 0 for a in range(len(ld.gens))])
                    continue
                c = tgt.span_membership(v)
                if c is None:
                    raise InvalidChainMap(f"image of a cycle at {M} is not a cycle")
                mat.append(list(c[: len(ld.gens)]))
            block["matrix"] = mat
        out.blocks[M] = block
    return out


def _apply_rows(vec: Sequence[int], F: Sequence[Sequence[int]], q: int, ncols: int) -> List[int]:
    acc = [0] * ncols
    for x, row in zip(vec, F):
        if x:
            for k, y in enumerate(row):
                if y:
                    acc[k] = (acc[k] + x * y) % q
    return acc


# --------------------------------------------------------------------------
# the homotopy on a unit pole-step quotient


def step_variable(spec: ComplexSpec) -> Tuple[int, int]:
    """For ``t^-b Omega / t^(-b+e_a) Omega`` return (a, b_a); raise otherwise."""
    if spec.sub_poles is None or spec.regular or spec.sub_regular:
        raise UnsupportedSpec("homotopy needs a unit pole-step quotient of log complexes")
    diff = [k for k in range(len(spec.roster)) if spec.poles[k] != spec.sub_poles[k]]
    if len(diff) != 1:
        raise UnsupportedSpec("quotient must differ in exactly one variable")
    (a,) = diff
    b = spec.poles[a]
    if b is None or spec.sub_poles[a] != b - 1 or b < 1:
        raise UnsupportedSpec("quotient must be a single step b -> b - 1 with b >= 1")
    return a, b


class HomotopyPi:
    """``alpha + beta ^ dlog t_a  |->  (-1)^j beta`` on the degree-j part."""

    def __init__(self, complex_: Complex):
        self.complex = complex_
        self.a, self.b = step_variable(complex_.spec)
        self.var = complex_.roster.names[self.a]

    def __call__(self, omega: LogForm) -> LogForm:
        c = self.complex
        omega = c.reduce(omega)
        j = omega.degree
        _, beta = split_top_variable(omega, self.var)
        if j == 0:
            return LogForm.zero(c.ring, 0)
        return c.reduce(beta.scale(-1 if j % 2 else 1))


def homotopy_pi(spec: ComplexSpec) -> HomotopyPi:
    return HomotopyPi(Complex(spec))


def verify_homotopy(spec: ComplexSpec, window: DegreeWindow) -> Report:
    """Check d pi + pi d = b * id on every basis element, and acyclicity when p does not divide b."""
    c = Complex(spec)
    pi = HomotopyPi(c)
    rep = Report(spec.describe(), window=window.to_list())
    bad = None
    count = 0
    for M in c._window_iter(window):
        for j in range(c.d + 1):
            for S in c.words(M, j):
                x = c.basis_form(M, S)
                lhs = c.differential(pi(x)) + pi(c.differential(x)) if j else pi(c.differential(x))
                rhs = c.reduce(x.scale(pi.b))
                count += 1
                if lhs != rhs and bad is None:
                    bad = f"{x.to_text()}: d pi + pi d gives {lhs.to_text()}, expected {rhs.to_text()}"
    rep.add(f"homotopy identity on {count} basis elements", bad is None, bad)
    if pi.b % spec.p:
        bad = None
        for M in c._window_iter(window):
            for i in range(c.d + 1):
                if c.local(M, i).length:
                    bad = f"H^{i} nonzero at multidegree {M}"
                    break
            if bad:
                break
        rep.add("quotient acyclic", bad is None, bad)
    return rep


# --------------------------------------------------------------------------
# exact sequences


def _kernel_length(F, q_src: int, N_src: int, q_dst: int, mod_dst: Modulus, mod_src: Modulus, ncols: int) -> int:
    """Length of the kernel of x -> x F from (Z/q_src)^r to (Z/q_dst)^c."""
    r = len(F)
    if r == 0:
        return 0
    if ncols == 0:
        return N_src * r
    K = left_kernel([list(row) for row in F], mod_dst, ncols)
    gens = [[x % q_src for x in k] for k in K]
    if q_dst < q_src:
        for j in range(r):
            gens.append([q_dst % q_src if a == j else 0 for a in range(r)])
    gens = [g for g in gens if any(g)]
    if not gens:
        return 0
    return span_length(howell_form(gens, mod_src, r))


def verify_exact_sequence(f: ChainMap, g: ChainMap, i: int, window: DegreeWindow) -> Report:
    """Check ``0 -> A -> B -> C -> 0`` at chain level and at H^i(B), per multidegree of B."""
    A, B, C = f.src, f.dst, g.dst
    rep = Report({"A": A.spec.describe(), "B": B.spec.describe(), "C": C.spec.describe()},
                 degree=i, window=window.to_list())
    fails: Dict[str, Optional[str]] = {
        "chain maps": None, "f injective": None, "g f = 0": None, "ker g = im f": None,
        "g surjective": None, "H^i exact in the middle": None,
    }

    def note(key, msg):
        if fails[key] is None:
            fails[key] = msg

    for M in B._window_iter(window):
        MA = f.preimage(M)
        MC = g.md(M)
        # C only sees B at multidegree M if g's correspondence points back here
        c_here = g.preimage(MC) == M
        for j in (i - 1, i, i + 1):
            ja = j - f.shift
            if MA is not None:
                bad = f.commutes_at(MA, ja)
                if bad:
                    note("chain maps", bad)
            bad = g.commutes_at(M, j)
            if bad:
                note("chain maps", bad)
            nA = len(A.words(MA, ja)) if MA is not None else 0
            nB = len(B.words(M, j))
            nC = len(C.words(MC, j + g.shift)) if c_here else 0
            Fm = f.matrix(MA, ja) if MA is not None and nA else []
            Gm = g.matrix(M, j) if nB and c_here else [[] for _ in range(nB)]
            im_f = span_length(howell_form(Fm, B.modulus, nB)) if Fm else 0
            if im_f != A.N * nA:
                note("f injective", f"at {M}, degree {j}")
            for row in Fm:
                if any(_apply_rows(row, Gm, C.q, nC)):
                    note("g f = 0", f"at {M}, degree {j}")
                    break
            ker_g = _kernel_length(Gm, B.q, B.N, C.q, C.modulus, B.modulus, nC) if nB else 0
            if ker_g != im_f:
                note("ker g = im f", f"at {M}, degree {j}: |ker g| = p^{ker_g}, |im f| = p^{im_f}")
            im_g = span_length(howell_form(Gm, C.modulus, nC)) if Gm else 0
            if im_g != C.N * nC:
                note("g surjective", f"at {M}, degree {j}")
        # cohomology at the middle
        lb = B.local(M, i)
        if c_here:
            lc = C.local(MC, i + g.shift)
            Gm = g.matrix(M, i) if lb.words else []
            nC = len(lc.words)
            gz = [_apply_rows(z, Gm, C.q, nC) for z in lb.Z.rows]
            img_g = howell_form(gz + [list(b) for b in lc.B.rows], C.modulus, nC)
            im_Hg = span_length(img_g) - span_length(lc.B)
        else:
            im_Hg = 0
        ker_Hg = lb.length - im_Hg
        if MA is not None:
            la = A.local(MA, i - f.shift)
            Fm = f.matrix(MA, i - f.shift) if la.words else []
            fz = [_apply_rows(z, Fm, B.q, len(lb.words)) for z in la.Z.rows]
        else:
            fz = []
        img_f = howell_form(fz + [list(b) for b in lb.B.rows], B.modulus, len(lb.words))
        im_Hf = span_length(img_f) - span_length(lb.B)
        if im_Hf != ker_Hg:
            note("H^i exact in the middle", f"at {M}: |im| = p^{im_Hf}, |ker| = p^{ker_Hg}")
    for name, msg in fails.items():
        rep.add(name, msg is None, msg)
    return rep


def restriction_roster(roster: VarRoster, name: str) -> VarRoster:
    return roster.drop(name)


def exactseq_maps(spec: ComplexSpec) -> Tuple[ChainMap, ChainMap]:
    """The sequence ``A[-1] -> t^-b Omega / t^(-b+e_a) Omega -> A`` along the step variable.

    A is the complex on the divisor ``t_a = 0``: the roster without ``t_a``
    and the remaining pole orders.  The first map is
    ``beta |-> t_a^-b beta ^ dlog t_a``; the second keeps the part free of
    ``dlog t_a``.
    """
    mid = Complex(spec)
    a, b = step_variable(spec)
    name = spec.roster.names[a]
    sub_roster = spec.roster.drop(name)
    keep = [k for k in range(len(spec.roster)) if k != a]
    A_spec = ComplexSpec(
        sub_roster,
        spec.p,
        spec.n,
        tuple(spec.poles[k] for k in keep),
        n_red=spec.n_red,
    )
    A = Complex(A_spec)

    def up(M: Exps) -> Exps:
        return M[:a] + (-b,) + M[a:]

    def down(M: Exps) -> Exps:
        return M[:a] + M[a + 1:]

    def pre(M: Exps) -> Optional[Exps]:
        return down(M) if M[a] == -b else None

    def lift(w: LogForm) -> LogForm:
        comps = {}
        for S, f in w.comps.items():
            S2 = tuple(k if k < a else k + 1 for k in S)
            comps[S2] = LaurentPoly(mid.ring, {e[:a] + (-b,) + e[a:]: c for e, c in f.terms.items()})
        return LogForm(mid.ring, w.degree, comps)

    def phi(w: LogForm) -> LogForm:
        return lift(w).wedge(LogForm.basis(mid.ring, [name]))

    def psi(w: LogForm) -> LogForm:
        alpha, _ = split_top_variable(w, name)
        comps = {}
        for S, f in alpha.comps.items():
            S2 = tuple(k if k < a else k - 1 for k in S)
            comps[S2] = LaurentPoly(A.ring, {e[:a] + e[a + 1:]: c for e, c in f.terms.items() if e[a] == -b})
        return LogForm(A.ring, w.degree, comps)

    f = ChainMap(A, mid, phi, up, pre, shift=1, sign=1, name="phi")
    g = ChainMap(mid, A, psi, down, lambda M: up(M), shift=0, sign=1, name="psi")
    return f, g


def pole_step_sequence(spec: ComplexSpec, var: str) -> Tuple[ChainMap, ChainMap]:
    """``0 -> t^(-b+e_a) Omega -> t^-b Omega -> quotient -> 0`` for a log complex spec."""
    a = spec.roster.index(var)
    b = spec.poles[a]
    smaller = list(spec.poles)
    smaller[a] = b - 1
    lo = Complex(spec.with_(poles=tuple(smaller)))
    hi = Complex(spec)
    quo = Complex(spec.with_(sub_poles=tuple(smaller)))
    return inclusion_map(lo, hi), ChainMap(hi, quo, lambda w: w, lambda M: M, lambda M: M, name="projection")


def devissage_sequence(spec: ComplexSpec) -> Tuple[ChainMap, ChainMap]:
    """``0 -> C mod p -> C mod p^m -> C mod p^(m-1) -> 0`` for m = n_eff >= 2."""
    m = spec.n_eff
    if m < 2:
        raise UnsupportedSpec("the reduction sequence needs precision at least 2")
    one = Complex(spec.with_(n_red=1))
    mid = Complex(spec)
    low = Complex(spec.with_(n_red=m - 1))
    return multiply_p_map(one, mid, m - 1), reduction_map(mid, low)
