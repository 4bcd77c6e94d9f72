"""Transmonomials.

A monomial is a log-free *core* ``x^b e^L`` read at a logarithmic depth
``M``: its value is ``core(log_M x)``.  ``L`` is stored as a tuple of
``(core, coefficient)`` pairs, sorted descending, every core ≻ 1.  The cores
inside an exponent always live at depth 0 (they are functions of the same
core variable as the enclosing monomial).

Python's ``<`` / ``>`` on monomials mean "far smaller" / "far larger".
"""

from __future__ import annotations

from fractions import Fraction
from functools import cmp_to_key, lru_cache
from typing import Iterable

from .foundations import as_rational

_ZERO = Fraction(0)
_ONE = Fraction(1)


def _sign(q) -> int:
    return (q > 0) - (q < 0)


class Monomial:
    __slots__ = ("xexp", "exp_terms", "depth", "_hash", "_height", "_low")

    def __init__(self, xexp=0, exp_terms: Iterable = (), depth: int = 0):
        self.xexp = as_rational(xexp)
        self.exp_terms = tuple(exp_terms)
        self.depth = int(depth)
        self._hash = None
        self._height = None
        self._low = None

    # -- constructors -------------------------------------------------
    @classmethod
    def one(cls, depth: int = 0) -> "Monomial":
        return cls(0, (), depth)

    @classmethod
    def power(cls, b, depth: int = 0) -> "Monomial":
        """``t^b`` where t is the core variable at ``depth`` (x when depth=0)."""
        return cls(b, (), depth)

    @classmethod
    def make(cls, xexp=0, exp_terms: Iterable = (), depth: int = 0) -> "Monomial":
        """Validating constructor; ``exp_terms`` may be in any order."""
        acc: dict = {}
        for m, c in exp_terms:
            if not isinstance(m, Monomial):
                raise TypeError("exponent terms must be monomials")
            core = m.core
            if m.depth:
                raise ValueError("exponent monomials must be cores (depth 0)")
            acc[core] = acc.get(core, _ZERO) + as_rational(c)
        terms = sort_terms(acc)
        for m, _ in terms:
            if not m > ONE:
                raise ValueError(f"exponent is not purely large: {m!r} is not ≻ 1")
        return cls(xexp, terms, depth)

    # -- structure ----------------------------------------------------
    @property
    def core(self) -> "Monomial":
        return self if self.depth == 0 else Monomial(self.xexp, self.exp_terms, 0)

    def at_depth(self, depth: int) -> "Monomial":
        """Same core reinterpreted at another depth (not a value-preserving lift)."""
        if depth == self.depth:
            return self
        return Monomial(self.xexp, self.exp_terms, depth)

    @property
    def is_one(self) -> bool:
        return not self.xexp and not self.exp_terms

    @property
    def is_power_free(self) -> bool:
        return not self.xexp

    @property
    def exp_part(self):
        """The exponent ``L`` as an exact Series at this monomial's depth."""
        from .series import Series

        return Series.from_terms(
            [(m.at_depth(self.depth), c) for m, c in self.exp_terms], depth=self.depth
        )

    @property
    def height(self) -> int:
        h = self._height
        if h is None:
            h = 0 if not self.exp_terms else 1 + max(m.height for m, _ in self.exp_terms)
            self._height = h
        return h

    def lift(self, depth: int) -> "Monomial":
        """Value-preserving move to a larger depth."""
        if depth < self.depth:
            raise ValueError("cannot lift to a smaller depth")
        core = self.core
        for _ in range(depth - self.depth):
            core = _lift1(core)
        return core.at_depth(depth)

    def lowered(self) -> "Monomial":
        """Smallest depth at which this value is syntactically expressible."""
        low = self._low
        if low is None:
            core, d = self.core, self.depth
            while d > 0:
                nxt = _lower1(core)
                if nxt is None:
                    break
                core, d = nxt, d - 1
            low = self if d == self.depth else core.at_depth(d)
            self._low = low
        return low

    # -- group law ----------------------------------------------------
    def __mul__(self, other: "Monomial") -> "Monomial":
        if not isinstance(other, Monomial):
            return NotImplemented
        a, b = _common(self, other)
        return Monomial(a.xexp + b.xexp, add_terms(a.exp_terms, b.exp_terms), a.depth)

    def __truediv__(self, other: "Monomial") -> "Monomial":
        if not isinstance(other, Monomial):
            return NotImplemented
        a, b = _common(self, other)
        return Monomial(a.xexp - b.xexp, add_terms(a.exp_terms, b.exp_terms, -1), a.depth)

    def inv(self) -> "Monomial":
        return Monomial(-self.xexp, scale_terms(self.exp_terms, -1), self.depth)

    def __pow__(self, q) -> "Monomial":
        q = as_rational(q)
        if not q:
            return Monomial.one(self.depth)
        return Monomial(q * self.xexp, scale_terms(self.exp_terms, q), self.depth)

    # -- order --------------------------------------------------------
    def cmp(self, other: "Monomial") -> int:
        if self is other:
            return 0
        a, b = _common(self, other)
        return _cmp_core(a, b)

    def __lt__(self, other):
        return self.cmp(other) < 0

    def __gt__(self, other):
        return self.cmp(other) > 0

    def __le__(self, other):
        return self.cmp(other) <= 0

    def __ge__(self, other):
        return self.cmp(other) >= 0

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Monomial):
            return NotImplemented
        if self.depth != other.depth:
            a, b = _common(self, other)
            return a.xexp == b.xexp and a.exp_terms == b.exp_terms
        return self.xexp == other.xexp and self.exp_terms == other.exp_terms

    def __hash__(self):
        h = self._hash
        if h is None:
            low = self.lowered() if self.depth else self
            h = hash((low.depth, low.xexp, low.exp_terms))
            self._hash = h
        return h

    def __repr__(self):
        from .render import format_monomial

        return f"Monomial({format_monomial(self)})"


ONE = Monomial()
X = Monomial(1)
X_INV = Monomial(-1)


def _common(a: Monomial, b: Monomial):
    if a.depth == b.depth:
        return a, b
    d = max(a.depth, b.depth)
    return a.lift(d), b.lift(d)


# -- term-list algebra (exact, sorted descending) ------------------------

def cmp_terms(a: tuple, b: tuple) -> int:
    """Sign of A − B for two exact descending term tuples at one depth."""
    i = j = 0
    na, nb = len(a), len(b)
    while True:
        if i == na:
            return 0 if j == nb else -_sign(b[j][1])
        if j == nb:
            return _sign(a[i][1])
        ma, ca = a[i]
        mb, cb = b[j]
        c = 0 if ma is mb else _cmp_core(ma, mb)
        if c > 0:
            return _sign(ca)
        if c < 0:
            return -_sign(cb)
        if ca != cb:
            return _sign(ca - cb)
        i += 1
        j += 1


def _cmp_core(a: Monomial, b: Monomial) -> int:
    if a is b:
        return 0
    c = cmp_terms(a.exp_terms, b.exp_terms)
    if c:
        return c
    return _sign(a.xexp - b.xexp)


def add_terms(a: tuple, b: tuple, sb: int | Fraction = 1) -> tuple:
    """Merge ``A + sb·B`` for sorted exact term tuples."""
    if not b:
        return a
    if not a and sb == 1:
        return b
    out = []
    i = j = 0
    na, nb = len(a), len(b)
    while i < na and j < nb:
        ma, ca = a[i]
        mb, cb = b[j]
        c = 0 if ma is mb else _cmp_core(ma, mb)
        if c > 0:
            out.append(a[i])
            i += 1
        elif c < 0:
            out.append((mb, sb * cb))
            j += 1
        else:
            s = ca + sb * cb
            if s:
                out.append((ma, s))
            i += 1
            j += 1
    out.extend(a[i:])
    out.extend((m, sb * c) for m, c in b[j:])
    return tuple(out)


def scale_terms(a: tuple, q) -> tuple:
    if not q:
        return ()
    return tuple((m, q * c) for m, c in a)


_term_key = cmp_to_key(lambda s, t: _cmp_core(s[0], t[0]))


def sort_terms(acc: dict) -> tuple:
    """Dictionary of same-depth monomials → sorted descending tuple."""
    return tuple(sorted(((m, c) for m, c in acc.items() if c), key=_term_key, reverse=True))


@lru_cache(maxsize=None)
def _lift1(m: Monomial) -> Monomial:
    """(x^b e^L) ∘ exp  =  e^{b·x + L∘exp}, as a depth-0 core."""
    terms = [(_lift1(n), c) for n, c in m.exp_terms]
    if m.xexp:
        # a lifted exponent core is e^{positive large}, which beats every power of x
        terms.append((X, m.xexp))
    return Monomial(0, tuple(terms), 0)


@lru_cache(maxsize=None)
def _lower1(m: Monomial) -> Monomial | None:
    """Inverse of ``_lift1`` when the core has the lifted shape, else None."""
    if m.xexp:
        return None
    beta = _ZERO
    out = []
    for n, c in m.exp_terms:
        if not n.exp_terms:
            if n.xexp != 1:
                return None
            beta = c
        elif n.xexp:
            return None
        else:
            low = _lower1(n)
            if low is None:
                return None
            out.append((low, c))
    return Monomial(beta, tuple(out), 0)


@lru_cache(maxsize=None)
def core_derivative(m: Monomial) -> tuple:
    """Derivative of a log-free core with respect to its own variable."""
    acc: dict = {}
    if m.xexp:
        acc[m * X_INV] = m.xexp
    for n, c in m.exp_terms:
        for p, d in core_derivative(n):
            key = m * p
            acc[key] = acc.get(key, _ZERO) + c * d
    return sort_terms(acc)


def chain_core(depth: int) -> Monomial:
    """Core of (log_M x)' read at depth M: e^{-(t + e^t + … + exp_{M-1} t)}."""
    terms = []
    inner = X
    for _ in range(depth):
        terms.append((inner, Fraction(-1)))
        inner = Monomial(0, ((inner, _ONE),), 0)
    terms.reverse()
    return Monomial(0, tuple(terms), 0)


# -- functional API -------------------------------------------------------

def mono_mul(m1: Monomial, m2: Monomial) -> Monomial:
    return m1 * m2


def mono_inv(m: Monomial) -> Monomial:
    return m.inv()


def mono_cmp(m1: Monomial, m2: Monomial) -> int:
    return m1.cmp(m2)


def height(m: Monomial) -> int:
    return m.height


def depth(m: Monomial) -> int:
    return m.depth


def lift_depth(m: Monomial, new_depth: int) -> Monomial:
    return m.lift(new_depth)


def lsupp(m: Monomial) -> frozenset:
    """{x^-1} ∪ supp L′ for a log-free monomial x^b e^L."""
    if m.depth:
        raise ValueError("lsupp expects a log-free monomial; conjugate first")
    out = {X_INV}
    for n, c in m.exp_terms:
        out.update(p for p, _ in core_derivative(n))
    return frozenset(out)
