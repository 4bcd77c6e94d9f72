"""Differentiation, inverses, powers, exp/log, composition and numerics.

Every operation that can produce infinitely many terms takes a ``target``
bound: terms it absorbs are never computed, and the loop stops as soon as
the running power of the small part falls entirely below it.  Errors coming
from inexact inputs are propagated by the bounded arithmetic of
:mod:`transs.series`, so the result bound is the coarser of the two.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import mpmath

from .errors import (
    BudgetExceeded,
    DomainError,
    NonRationalConstant,
    NotLargePositive,
    NotPositive,
    UnresolvedOrder,
    ZeroSeries,
)
from .foundations import as_rational
from .monomial import ONE, Monomial, _lift1, chain_core, core_derivative, sort_terms
from .series import (
    OTerm,
    Series,
    add,
    as_bound,
    cmp,
    coarser,
    decompose_additive,
    decompose_multiplicative,
    mul,
    sub,
)

_ZERO = Fraction(0)
_ONE = Fraction(1)


@dataclass(frozen=True)
class TaylorBudget:
    max_terms: int = 256

    def __post_init__(self):
        if self.max_terms <= 0:
            raise ValueError("max_terms must be positive")

    @classmethod
    def from_env(cls) -> "TaylorBudget":
        raw = os.environ.get("TRANSS_MAX_TERMS")
        return cls(int(raw)) if raw else cls()


def _budget(b) -> TaylorBudget:
    if b is None:
        return TaylorBudget()
    if isinstance(b, int):
        return TaylorBudget(b)
    return b


# -- derivative -----------------------------------------------------------

def derivative(T: Series) -> Series:
    d = T.depth
    chain = chain_core(d) if d else None
    acc: dict = {}
    for m, c in T.terms:
        for p, e in core_derivative(m.core):
            q = p * chain if chain is not None else p
            q = q.at_depth(d)
            acc[q] = acc.get(q, _ZERO) + c * e
    b = T.bound.derivative() if T.bound is not None else None
    if b is not None and b.depth != d:
        return Series.from_terms(acc.items(), b).normalized()
    from .series import _cut

    return Series(_cut(sort_terms(acc), b), b, d).normalized()


# -- power series in a small argument ------------------------------------

def _series_sum(
    S: Series,
    coeff: Callable[[int], Fraction],
    target,
    budget: TaylorBudget,
    c0: Fraction = _ONE,
) -> Series:
    """Σ_j coeff(j)·S^j for small S, truncated at ``target``."""
    total = Series.const(c0, S.depth)
    if not S.terms and S.bound is None:
        return total
    target = coarser(target, S.bound)
    if target is None:
        raise BudgetExceeded("an infinite expansion needs a target bound")
    P = Series.const(1, S.depth)
    for j in range(1, budget.max_terms + 1):
        P = mul(P, S, target)
        c = coeff(j)
        if c:
            total = add(total, P.scale(c), target)
        if not P.terms:
            return total.with_bound(P.bound) if P.bound is not None else total
    raise BudgetExceeded(
        f"expansion did not reach the bound within {budget.max_terms} terms"
    )


def _mono_series(m: Monomial, c=1) -> Series:
    return Series.monomial(m, c)


# -- inverse --------------------------------------------------------------

def mul_inverse(A: Series, target=None, budget=None) -> Series:
    budget = _budget(budget)
    if not A.terms:
        raise ZeroSeries("cannot invert a series without terms")
    a, g, S = decompose_multiplicative(A)
    ginv = g.inv()
    if not S.terms and S.bound is None:
        return _mono_series(ginv, 1 / a)
    rel = _over(target, ginv)
    geo = _series_sum(-S, lambda j: _ONE, rel, budget)
    out = mul(geo, _mono_series(ginv, 1 / a))
    return out.with_bound(target) if target is not None else out


def _over(target, g: Monomial):
    """Truncation for X when X·g must meet ``target`` (i.e. target / g)."""
    target = as_bound(target)
    if target is None:
        return None
    d = max(target.depth, g.depth)
    return target.lifted(d).times(g.lift(d).inv())


def _finer(a: OTerm, b: OTerm) -> OTerm:
    return a if a.monomial.cmp(b.monomial) <= 0 else b


def divide(A: Series, B: Series, target=None, budget=None) -> Series:
    if not B.terms:
        raise ZeroSeries("division by a series without terms")
    if len(B.terms) == 1 and B.bound is None:
        m, c = B.terms[0]
        out = mul(A, _mono_series(m.inv(), 1 / c))
        return out.with_bound(target) if target is not None else out
    target = as_bound(target)
    if target is None:
        target = _natural_quotient_bound(A, B)
    if A.is_zero:
        return Series.zero(max(A.depth, B.depth))
    ua = A.terms[0][0] if A.terms else A.bound.upper_monomials()[0]
    inv = mul_inverse(B, _over(target, ua), budget)
    return mul(A, inv, target)


def _natural_quotient_bound(A: Series, B: Series):
    mb = B.terms[0][0]
    parts = []
    if A.bound is not None:
        parts.append(A.bound.times(mb.inv()))
    if B.bound is not None:
        ma = A.terms[0][0] if A.terms else ONE
        parts.append(B.bound.times(ma / (mb * mb)))
    if not parts:
        raise BudgetExceeded("an infinite quotient needs a target bound")
    return coarser(*parts)


# -- powers ---------------------------------------------------------------

def _int_root(n: int, k: int) -> int | None:
    if n < 0:
        if k % 2 == 0:
            return None
        r = _int_root(-n, k)
        return None if r is None else -r
    if n < 2:
        return n
    lo, hi = 0, 1 << (n.bit_length() // k + 1)
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if mid**k <= n:
            lo = mid
        else:
            hi = mid - 1
    return lo if lo**k == n else None


def rational_power(a: Fraction, p: Fraction) -> Fraction:
    """a^p when it is rational, else NonRationalConstant."""
    if p.denominator == 1:
        return a ** p.numerator
    if a <= 0:
        raise NotPositive("fractional power of a non-positive constant")
    num = _int_root(a.numerator, p.denominator)
    den = _int_root(a.denominator, p.denominator)
    if num is None or den is None:
        raise NonRationalConstant(f"{a}^{p} is not rational")
    return Fraction(num, den) ** p.numerator


def power(S: Series, p, target=None, budget=None) -> Series:
    p = as_rational(p)
    budget = _budget(budget)
    if p == 0:
        return Series.const(1, S.depth)
    if p.denominator == 1 and p > 0:
        return _int_power(S, p.numerator, target)
    if not S.terms:
        raise ZeroSeries("power of a series without terms")
    a, g, U = decompose_multiplicative(S)
    if p.denominator != 1 and a < 0:
        raise NotPositive("fractional power of a negative series")
    ap = rational_power(a, p)
    gp = g ** p
    if not U.terms and U.bound is None:
        return _mono_series(gp, ap)
    rel = _over(target, gp)
    state = {"c": _ONE}

    def binom(j):
        state["c"] = state["c"] * (p - j + 1) / j
        return state["c"]

    body = _series_sum(U, binom, rel, budget)
    out = mul(body, _mono_series(gp, ap))
    return out.with_bound(target) if target is not None else out


def _int_power(S: Series, n: int, target) -> Series:
    result = Series.const(1, S.depth)
    base = S
    while n:
        if n & 1:
            result = mul(result, base, target)
        n >>= 1
        if n:
            base = mul(base, base, target)
    return result


# -- exp / log ------------------------------------------------------------

def exp(S: Series, target=None, budget=None) -> Series:
    budget = _budget(budget)
    L, c, U = decompose_additive(S)
    if c:
        raise NonRationalConstant(f"exp({c}) is not rational")
    d = S.depth
    E = Monomial(0, tuple((m.core, k) for m, k in L.terms), d)
    if not U.terms and U.bound is None:
        return _mono_series(E)
    rel = _over(target, E)
    state = {"c": _ONE}

    def inv_fact(j):
        state["c"] = state["c"] / j
        return state["c"]

    body = _series_sum(U, inv_fact, rel, budget)
    out = mul(body, _mono_series(E))
    return out.with_bound(target) if target is not None else out


def log_monomial(g: Monomial) -> Series:
    """log of a monomial: b·log t + L, possibly one level deeper."""
    d = g.depth
    L = Series(tuple((m.at_depth(d), c) for m, c in g.exp_terms), None, d)
    if not g.xexp:
        return L
    t = Series(((Monomial.power(1, d + 1), g.xexp),), None, d + 1)
    return add(L.lift(d + 1), t)


def log(T: Series, target=None, budget=None) -> Series:
    budget = _budget(budget)
    if not T.terms:
        raise ZeroSeries("log of a series without terms")
    a, g, S = decompose_multiplicative(T)
    if a < 0:
        raise NotPositive("log of a negative series")
    if a != 1:
        raise NonRationalConstant(f"log({a}) is not rational")
    head = log_monomial(g)
    if not S.terms and S.bound is None:
        return head
    state = {"s": -_ONE}

    def coeff(j):
        state["s"] = -state["s"]
        return state["s"] / j

    tail = _series_sum(S, coeff, target, budget, c0=_ZERO)
    out = add(head, tail)
    return out.with_bound(target) if target is not None else out


# -- depth shifts and composition ----------------------------------------

def _reinterpret(T: Series, depth: int) -> Series:
    b = T.bound
    if b is not None:
        if not isinstance(b, OTerm):
            raise TypeError("depth shifts are only defined for O-term bounds")
        b = OTerm(b.monomial.at_depth(depth))
    return Series(tuple((m.at_depth(depth), c) for m, c in T.terms), b, depth)


def compose_log(T: Series) -> Series:
    """T ∘ log."""
    return _reinterpret(T, T.depth + 1)


def compose_exp(T: Series) -> Series:
    """T ∘ exp."""
    if T.depth:
        return _reinterpret(T, T.depth - 1)
    b = T.bound
    if b is not None:
        if not isinstance(b, OTerm):
            raise TypeError("depth shifts are only defined for O-term bounds")
        b = OTerm(_lift1(b.monomial))
    return Series(tuple((_lift1(m), c) for m, c in T.terms), b, 0)


def _large_positive(S: Series) -> None:
    try:
        c, m = S.determined_leading()
    except ZeroSeries:
        raise NotLargePositive("inner series has no terms") from None
    if c <= 0 or m.cmp(ONE) <= 0:
        raise NotLargePositive("inner series must be large and positive")


def _compose_core(m: Monomial, S: Series, target, budget) -> Series:
    """core ∘ S for a log-free core and a log-free-ready large S."""
    b = m.xexp
    if not m.exp_terms:
        return power(S, b, target, budget)
    mag_s = S.terms[0][0]
    mag_p = mag_s ** b
    probe = _over(target, mag_p) if target is not None else None
    unit = OTerm(mag_s.inv())
    t_lam = unit if probe is None else _finer(probe, unit)
    lam = _compose_terms(m.exp_terms, S, t_lam, budget)
    large, _, _ = decompose_additive(lam)
    G = Monomial(0, tuple((n.core, c) for n, c in large.terms), S.depth)
    if probe is not None:
        finer = probe.times(G.inv())
        if isinstance(finer, OTerm) and finer.monomial.cmp(t_lam.monomial) < 0:
            lam = _compose_terms(m.exp_terms, S, finer, budget)
    E = exp(lam, probe, budget)
    if not b:
        return E
    P = power(S, b, _over(target, G) if target is not None else None, budget)
    return mul(P, E, target)


def _compose_terms(terms, S: Series, target, budget) -> Series:
    total = Series.zero(S.depth)
    for m, c in terms:
        total = add(total, _compose_core(m.core, S, target, budget).scale(c), target)
    return total


def compose(T: Series, S: Series, target=None, budget=None) -> Series:
    """T ∘ S for S large and positive."""
    budget = _budget(budget)
    _large_positive(S)
    target = as_bound(target)
    M1 = T.depth

    def run(inner):
        St = S
        for _ in range(M1):
            St = log(St, inner, budget)
        out = _compose_terms(T.terms, St, target, budget)
        if T.bound is not None:
            if not isinstance(T.bound, OTerm):
                raise TypeError("composition needs an O-term bound")
            r = _compose_core(T.bound.monomial.core, St, target, budget)
            out = out.with_bound(OTerm(r.terms[0][0]) if r.terms else r.bound)
        return out

    if target is None or M1 == 0:
        if target is None and (M1 or S.bound is None and not _finite_composition(T, S)):
            raise BudgetExceeded("composition needs a target bound")
        return run(target)
    return _refine(run, target)


def compose_order_check(T: Series, A: Series, B: Series, target, budget=None):
    """Experimental: for T′ > 0 and A < B, is T∘A < T∘B?

    Returns True or False when both compositions resolve at ``target`` and
    None when the comparison is undecided.  Not a proven invariant.
    """
    if cmp(derivative(T), Series.zero(T.depth)) <= 0 or cmp(A, B) >= 0:
        raise ValueError("need T' > 0 and A < B")
    try:
        D = sub(compose(T, B, target, budget), compose(T, A, target, budget))
    except UnresolvedOrder:
        return None
    if not D.terms:
        return None
    return D.terms[0][1] > 0


def _finite_composition(T: Series, S: Series) -> bool:
    return all(not m.exp_terms and m.xexp.denominator == 1 and m.xexp >= 0 for m, _ in T.terms) and T.bound is None


def _refine(run, target, rounds: int = 6) -> Series:
    """Re-run with a finer inner precision until the result meets ``target``."""
    inner = target
    out = run(inner)
    for _ in range(rounds):
        b = out.bound
        if b is None or b.within(target) or not isinstance(b, OTerm):
            break
        ratio = target.monomial.lift(max(target.depth, b.depth)) / b.monomial.lift(
            max(target.depth, b.depth)
        )
        inner = OTerm(inner.monomial * ratio)
        out = run(inner)
    return out.with_bound(target)


# -- numerics -------------------------------------------------------------

def numeric_eval(T: Series, x0, digits: int = 30):
    """Value of the stored terms at x = x0 with ``digits`` significant digits."""
    x0 = as_rational(x0)
    with mpmath.workdps(digits + 15):
        t = mpmath.mpf(x0.numerator) / x0.denominator
        for _ in range(T.depth):
            if t <= 0:
                raise DomainError("log of a non-positive number")
            t = mpmath.log(t)
        if T.depth and t <= 0:
            raise DomainError("iterated log is not positive at this point")
        cache: dict = {}
        total = mpmath.mpf(0)
        for m, c in T.terms:
            total += _eval_core(m.core, t, cache) * mpmath.mpf(c.numerator) / c.denominator
        return +total


def _eval_core(m: Monomial, t, cache):
    hit = cache.get(m)
    if hit is not None:
        return hit
    if m.xexp and t <= 0:
        raise DomainError("power of a non-positive number")
    val = t ** (mpmath.mpf(m.xexp.numerator) / m.xexp.denominator) if m.xexp else mpmath.mpf(1)
    if m.exp_terms:
        L = mpmath.mpf(0)
        for n, c in m.exp_terms:
            L += _eval_core(n, t, cache) * mpmath.mpf(c.numerator) / c.denominator
        val *= mpmath.exp(L)
    cache[m] = val
    return val
