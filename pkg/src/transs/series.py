"""Truncated transseries: sorted term maps plus an explicit accuracy bound.

A ``Series`` stores finitely many terms, strictly descending, and a bound
describing what was discarded:

* ``None``      - exact: the value is the finite sum;
* ``OTerm(r)``  - every discarded term is ≼ r;
* ``GridCap``   - (see :mod:`transs.grid`) every discarded term is μ^k with
                  k in an upward-closed set of multi-indices.

All arithmetic propagates the bound, so callers can read off how much of a
result is trustworthy.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, NamedTuple

from .errors import LargeTailUnresolved, UnresolvedOrder, ZeroSeries
from .foundations import as_rational
from .monomial import (
    ONE,
    Monomial,
    add_terms,
    chain_core,
    core_derivative,
    scale_terms,
    sort_terms,
)

_ZERO = Fraction(0)
_ONE = Fraction(1)


class OTerm:
    """Bound "all discarded terms are ≼ monomial"."""

    __slots__ = ("monomial",)

    def __init__(self, monomial: Monomial):
        if not isinstance(monomial, Monomial):
            raise TypeError("OTerm needs a Monomial")
        self.monomial = monomial

    @property
    def depth(self) -> int:
        return self.monomial.depth

    def lifted(self, depth: int) -> "OTerm":
        return self if depth == self.depth else OTerm(self.monomial.lift(depth))

    def absorbs(self, m: Monomial) -> bool:
        return m.cmp(self.monomial) <= 0

    def upper_monomials(self) -> tuple:
        return (self.monomial,)

    def times(self, m: Monomial) -> "OTerm":
        return OTerm(self.monomial * m)

    def derivative(self) -> "OTerm":
        """Bound for δ′ given δ ≼ r: the magnitude of r′ (valuation property)."""
        r = self.monomial
        d = r.depth
        if r.is_one:
            # δ is a constant plus something ≺ 1/log t; use that smaller scale
            return OTerm(_derivative_mag(Monomial.power(-1, d + 1)))
        return OTerm(_derivative_mag(r))

    def coarser(self, other):
        if other is None:
            return self
        if not isinstance(other, OTerm):
            raise TypeError("cannot mix an O-term bound with a grid cap")
        return self if self.monomial >= other.monomial else other

    def within(self, other) -> bool:
        """Whether this bound's discarded region lies inside ``other``'s."""
        if other is None:
            return False
        if not isinstance(other, OTerm):
            raise TypeError("cannot mix an O-term bound with a grid cap")
        return self.monomial <= other.monomial

    @staticmethod
    def product(A: "Series", B: "Series") -> "OTerm | None":
        parts = []
        if isinstance(A.bound, OTerm):
            u = _upper(B)
            if u is not None:
                parts.append(A.bound.monomial * u)
        if isinstance(B.bound, OTerm):
            u = _upper(A)
            if u is not None:
                parts.append(B.bound.monomial * u)
        return OTerm(max(parts, key=_MonoKey)) if parts else None

    def __eq__(self, other):
        return isinstance(other, OTerm) and self.monomial == other.monomial

    def __hash__(self):
        return hash(("oterm", self.monomial))

    def __repr__(self):
        from .render import format_monomial

        return f"OTerm({format_monomial(self.monomial)})"


def _derivative_mag(r: Monomial) -> Monomial:
    d = r.depth
    m = core_derivative(r.core)[0][0]
    if d:
        m = m * chain_core(d)
    return m.at_depth(d)


class _MonoKey:
    __slots__ = ("m",)

    def __init__(self, m):
        self.m = m

    def __lt__(self, other):
        return self.m.cmp(other.m) < 0


def _upper(S: "Series") -> Monomial | None:
    """Largest monomial that S can contain (stored or hidden); None for exact 0."""
    cands = []
    if S.terms:
        cands.append(S.terms[0][0])
    if isinstance(S.bound, OTerm):
        cands.append(S.bound.monomial)
    return max(cands, key=_MonoKey) if cands else None


def as_bound(b):
    """Accept a Bound, a Monomial (meaning an O-term) or None."""
    if b is None or hasattr(b, "absorbs"):
        return b
    if isinstance(b, Monomial):
        return OTerm(b)
    raise TypeError(f"not a bound: {b!r}")


def coarser(*bounds):
    out = None
    for b in bounds:
        b = as_bound(b)
        if b is None:
            continue
        out = b if out is None else out.coarser(b)
    return out


def _cut(terms: tuple, bound) -> tuple:
    if bound is None or not terms:
        return terms
    if isinstance(bound, OTerm):
        for i, (m, _) in enumerate(terms):
            if bound.absorbs(m):
                return terms[:i]
        return terms
    return tuple(t for t in terms if not bound.absorbs(t[0]))


class Flags(NamedTuple):
    small: bool
    large: bool
    purely_large: bool
    power_free: bool


class FarOrder(NamedTuple):
    relation: str  # "≺", "≍" or "≻"
    similar: bool  # dominant terms equal (∼)


class Series:
    __slots__ = ("terms", "bound", "depth", "_index")

    def __init__(self, terms: tuple = (), bound=None, depth: int = 0):
        # trusted constructor: terms sorted, lifted to ``depth``, none absorbed
        self.terms = terms
        self.bound = bound
        self.depth = depth
        self._index = None

    # -- constructors -------------------------------------------------
    @classmethod
    def from_terms(cls, items: Iterable = (), bound=None, depth: int | None = None) -> "Series":
        items = [(m, as_rational(c)) for m, c in (items.items() if isinstance(items, dict) else items)]
        bound = as_bound(bound)
        d = max([m.depth for m, _ in items] + [bound.depth if bound is not None else 0, depth or 0])
        if bound is not None:
            bound = bound.lifted(d)
        acc: dict = {}
        for m, c in items:
            m = m.lift(d) if m.depth != d else m
            acc[m] = acc.get(m, _ZERO) + c
        return cls(_cut(sort_terms(acc), bound), bound, d)

    @classmethod
    def zero(cls, depth: int = 0) -> "Series":
        return cls((), None, depth)

    @classmethod
    def const(cls, c, depth: int = 0) -> "Series":
        c = as_rational(c)
        return cls(((Monomial.one(depth), c),) if c else (), None, depth)

    @classmethod
    def monomial(cls, m: Monomial, c=1) -> "Series":
        c = as_rational(c)
        return cls(((m, c),) if c else (), None, m.depth)

    @classmethod
    def x(cls) -> "Series":
        return cls(((Monomial.power(1), _ONE),), None, 0)

    @classmethod
    def oterm(cls, r: Monomial) -> "Series":
        """The pure error term O(r)."""
        return cls((), OTerm(r), r.depth)

    # -- basic queries ------------------------------------------------
    @property
    def is_exact(self) -> bool:
        return self.bound is None

    @property
    def is_zero(self) -> bool:
        """Exactly zero (no terms, exact bound)."""
        return not self.terms and self.bound is None

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def support(self) -> list:
        return [m for m, _ in self.terms]

    def coeff(self, m: Monomial) -> Fraction:
        if self._index is None:
            self._index = dict(self.terms)
        if m.depth != self.depth:
            if m.depth > self.depth:
                return self.lift(m.depth).coeff(m)
            m = m.lift(self.depth)
        return self._index.get(m, _ZERO)

    def mag(self) -> Monomial:
        if not self.terms:
            raise ZeroSeries("series has no stored terms")
        return self.terms[0][0]

    def dom(self):
        if not self.terms:
            raise ZeroSeries("series has no stored terms")
        m, c = self.terms[0]
        return c, m

    def leading_coeff(self) -> Fraction:
        return self.dom()[0]

    def lift(self, depth: int) -> "Series":
        if depth == self.depth:
            return self
        if depth < self.depth:
            raise ValueError("cannot lift to a smaller depth")
        b = self.bound.lifted(depth) if self.bound is not None else None
        return Series(tuple((m.lift(depth), c) for m, c in self.terms), b, depth)

    def normalized(self) -> "Series":
        """Same value at the smallest depth where every monomial is expressible."""
        if not self.depth or (self.bound is not None and not isinstance(self.bound, OTerm)):
            return self
        mons = [m for m, _ in self.terms]
        if self.bound is not None:
            mons.append(self.bound.monomial)
        low = max((m.lowered().depth for m in mons), default=0)
        if low >= self.depth:
            return self
        b = OTerm(self.bound.monomial.lowered().lift(low)) if self.bound is not None else None
        terms = tuple((m.lowered().lift(low), c) for m, c in self.terms)
        return Series(terms, b, low)

    def with_bound(self, bound) -> "Series":
        """Coarsen the bound (never refines) and drop newly absorbed terms."""
        bound = as_bound(bound)
        if bound is None:
            return self
        if bound.depth > self.depth:
            return self.lift(bound.depth).with_bound(bound)
        b = coarser(self.bound, bound.lifted(self.depth))
        return Series(_cut(self.terms, b), b, self.depth)

    truncate = with_bound

    def determined_leading(self):
        """Dominant term, provided no hidden term can exceed it."""
        if not self.terms:
            raise ZeroSeries("series has no stored terms")
        m, c = self.terms[0]
        if self.bound is not None and not isinstance(self.bound, OTerm):
            for u in self.bound.upper_monomials():
                if m.cmp(u) <= 0:
                    raise UnresolvedOrder("dominant term is not separated from the truncation")
        return c, m

    def resolves_non_small(self) -> bool:
        """True when the truncation cannot hide a term ≽ 1."""
        if self.bound is None:
            return True
        return all(u.cmp(ONE) < 0 for u in self.bound.upper_monomials())

    # -- arithmetic ---------------------------------------------------
    def __neg__(self):
        return Series(scale_terms(self.terms, -1), self.bound, self.depth)

    def __pos__(self):
        return self

    def __add__(self, other):
        other = _coerce(other, self.depth)
        if other is None:
            return NotImplemented
        return add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other, self.depth)
        if other is None:
            return NotImplemented
        return add(self, -other)

    def __rsub__(self, other):
        other = _coerce(other, self.depth)
        if other is None:
            return NotImplemented
        return add(other, -self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.scale(other)
        if isinstance(other, Monomial):
            other = Series.monomial(other)
        if not isinstance(other, Series):
            return NotImplemented
        return mul(self, other)

    __rmul__ = __mul__

    def scale(self, q) -> "Series":
        q = as_rational(q)
        if not q:
            return Series.zero(self.depth)
        return Series(scale_terms(self.terms, q), self.bound, self.depth)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.scale(1 / as_rational(other))
        other = _coerce(other, self.depth)
        if other is None:
            return NotImplemented
        from .calculus import divide

        return divide(self, other)

    def __rtruediv__(self, other):
        other = _coerce(other, self.depth)
        if other is None:
            return NotImplemented
        from .calculus import divide

        return divide(other, self)

    def __pow__(self, p):
        from .calculus import power

        return power(self, as_rational(p))

    # -- comparisons --------------------------------------------------
    def same_as(self, other: "Series") -> bool:
        """Identical stored terms and identical bound."""
        d = max(self.depth, other.depth)
        a, b = self.lift(d), other.lift(d)
        return a.terms == b.terms and a.bound == b.bound

    def __eq__(self, other):
        other = _coerce(other, self.depth)
        if other is None:
            return NotImplemented
        return self.same_as(other)

    __hash__ = None

    def __repr__(self):
        from .render import format_series

        return f"Series({format_series(self)})"

    def __str__(self):
        from .render import format_series

        return format_series(self)


def _coerce(v, depth: int = 0):
    if isinstance(v, Series):
        return v
    if isinstance(v, bool):
        return None
    if isinstance(v, (int, Fraction)):
        return Series.const(v, depth)
    if isinstance(v, Monomial):
        return Series.monomial(v)
    return None


def _align(A: Series, B: Series):
    if A.depth == B.depth:
        return A, B
    d = max(A.depth, B.depth)
    return A.lift(d), B.lift(d)


def add(A: Series, B: Series, target=None) -> Series:
    A, B = _align(A, B)
    b = coarser(A.bound, B.bound, target)
    if b is not None and b.depth != A.depth:
        if b.depth > A.depth:
            return add(A.lift(b.depth), B.lift(b.depth), target)
        b = b.lifted(A.depth)
    return Series(_cut(add_terms(A.terms, B.terms), b), b, A.depth)


def sub(A: Series, B: Series, target=None) -> Series:
    return add(A, -B, target)


def _product_bound(A: Series, B: Series):
    kinds = {type(b) for b in (A.bound, B.bound) if b is not None}
    if not kinds:
        return None
    if len(kinds) > 1:
        raise TypeError("cannot mix an O-term bound with a grid cap")
    return kinds.pop().product(A, B)


def mul(A: Series, B: Series, target=None) -> Series:
    A, B = _align(A, B)
    d = A.depth
    if A.is_zero or B.is_zero:
        return Series.zero(d)
    target = as_bound(target)
    if target is not None and target.depth != d:
        if target.depth > d:
            return mul(A.lift(target.depth), B.lift(target.depth), target)
        target = target.lifted(d)
    b = coarser(_product_bound(A, B), target)
    if len(B.terms) > len(A.terms):
        A, B = B, A
    if len(B.terms) == 1:
        m, c = B.terms[0]
        terms = tuple((n * m, a * c) for n, a in A.terms)
        return Series(_cut(terms, b), b, d)
    acc: dict = {}
    ordered = isinstance(b, OTerm)
    for m, a in A.terms:
        for n, c in B.terms:
            p = m * n
            if b is not None and b.absorbs(p):
                if ordered:
                    break
                continue
            acc[p] = acc.get(p, _ZERO) + a * c
    return Series(sort_terms(acc), b, d)


# -- functional API -------------------------------------------------------

def mag(T: Series) -> Monomial:
    return T.mag()


def dom(T: Series):
    return T.dom()


def leading_coeff(T: Series) -> Fraction:
    return T.leading_coeff()


def decompose_additive(T: Series):
    """T = L + c + S with L purely large (exact), c constant, S small."""
    if not T.resolves_non_small():
        raise LargeTailUnresolved("bound does not resolve the non-small part")
    large, small = [], []
    c = _ZERO
    for m, a in T.terms:
        s = m.cmp(ONE)
        if s > 0:
            large.append((m, a))
        elif s == 0:
            c = a
        else:
            small.append((m, a))
    d = T.depth
    return Series(tuple(large), None, d), c, Series(tuple(small), T.bound, d)


def decompose_multiplicative(T: Series):
    """T = a·g·(1+S) with a the leading coefficient, g = mag T, S small."""
    a, g = T.determined_leading()
    ginv = g.inv()
    rest = tuple((m * ginv, c / a) for m, c in T.terms[1:])
    b = T.bound.times(ginv) if T.bound is not None else None
    return a, g, Series(rest, b, T.depth)


def cmp(A: Series, B: Series) -> int:
    """Sign of A − B: -1, 0 or 1."""
    D = sub(A, B)
    if not D.terms:
        if D.bound is None or A.same_as(B):
            return 0
        raise UnresolvedOrder("difference lies entirely below the accuracy bound")
    c, _ = D.determined_leading()
    return 1 if c > 0 else -1


def far_cmp(A: Series, B: Series) -> FarOrder:
    ca, ma = A.determined_leading()
    cb, mb = B.determined_leading()
    s = ma.cmp(mb)
    if s > 0:
        return FarOrder("≻", False)
    if s < 0:
        return FarOrder("≺", False)
    return FarOrder("≍", ca == cb)


def classify(T: Series) -> Flags:
    resolved = T.resolves_non_small()
    has_nonsmall = any(m.cmp(ONE) >= 0 for m, _ in T.terms)
    has_large = bool(T.terms) and T.terms[0][0].cmp(ONE) > 0
    if not resolved and not has_nonsmall:
        raise LargeTailUnresolved("bound does not resolve the non-small part")
    small = not has_nonsmall
    large = has_large and (T.bound is None or _leading_separated(T))
    if not large and has_large:
        raise LargeTailUnresolved("dominant term hidden by the truncation")
    all_large = all(m.cmp(ONE) > 0 for m, _ in T.terms)
    if all_large and not resolved:
        raise LargeTailUnresolved("bound hides whether the series is purely large")
    purely_large = all_large
    power_free = all(m.is_power_free for m, _ in T.terms)
    return Flags(small, large, purely_large, power_free)


def _leading_separated(T: Series) -> bool:
    try:
        T.determined_leading()
        return True
    except UnresolvedOrder:
        return False
