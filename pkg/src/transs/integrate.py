"""Antiderivatives.

The general route conjugates by exp until the integrand is power-free, then
integrates each ``e^L`` as ``e^L/L′·(1+U)`` where ``U`` is the fixed point of
a contractive linear map.  The closed form for ``x^a e^{bx^c}`` is kept as an
independent path, and it is also what integrates over a grid cap.
"""

from __future__ import annotations

from fractions import Fraction

from .calculus import (
    _budget,
    _finer,
    _over,
    compose_exp,
    compose_log,
    derivative,
    divide,
    exp,
    mul_inverse,
)
from .errors import (
    BudgetExceeded,
    InvalidParameters,
    NotInGrid,
    NotLarge,
    NotPowerFree,
)
from .foundations import as_rational, mi_sub
from .grid import GridCap
from .monomial import X, Monomial, _lift1
from .series import OTerm, Series, add, as_bound, mul
from .solve import IterationPolicy, solve_linear


def gamma_ratio(j: int, u) -> Fraction:
    """Γ(j−u)/Γ(1−u) = ∏_{i=1}^{j−1} (i−u)."""
    u = as_rational(u)
    out = Fraction(1)
    for i in range(1, j):
        out *= i - u
    return out


def _policy(policy) -> IterationPolicy | None:
    if policy is None or isinstance(policy, IterationPolicy):
        return policy
    return IterationPolicy(as_bound(policy))


def _target(policy):
    p = _policy(policy)
    return None if p is None else as_bound(p.target_bound)


# -- closed form ----------------------------------------------------------

def anti_xaebxc(a, b, c, bound=None, max_terms: int | None = None) -> Series:
    """∫ x^a e^{b x^c} dx as Σ_j Γ(j−u)/(Γ(1−u)·c·b^j) x^{a+1−jc} e^{bx^c}, u=(a+1)/c."""
    a, b, c = as_rational(a), as_rational(b), as_rational(c)
    if c <= 0 or b == 0:
        raise InvalidParameters("need c > 0 and b != 0")
    bound = as_bound(bound)
    limit = _budget(max_terms).max_terms
    u = (a + 1) / c
    E = ((Monomial(c), b),)
    acc = []
    g = Fraction(1)  # running Γ-ratio
    bj = Fraction(1)
    for j in range(1, limit + 1):
        if j > 1:
            g *= (j - 1) - u
            if g == 0:
                return Series.from_terms(acc)
        bj *= b
        m = Monomial(a + 1 - j * c, E)
        if bound is not None and bound.absorbs(m):
            return Series.from_terms(acc, bound)
        acc.append((m, g / (c * bj)))
    if u.denominator == 1 and 0 < u <= limit:
        return Series.from_terms(acc)
    if bound is None:
        raise BudgetExceeded("the expansion is infinite; give a bound")
    raise BudgetExceeded(f"bound not reached within {limit} terms")


# -- e^T for large T ------------------------------------------------------

def anti_exp_large(T: Series, policy=None) -> Series:
    """S with S′ = e^T, for T ≻ 1, via S = e^T/T′·(1+U)."""
    pol = _policy(policy)
    target = _target(pol)
    if not T.terms or T.terms[0][0].cmp(Monomial.one(T.depth)) <= 0:
        raise NotLarge("exponent must be large")
    T.determined_leading()
    Tp = derivative(T)
    Tpp = derivative(Tp)
    if target is None:
        if Tpp.terms or Tpp.bound is not None:
            raise BudgetExceeded("a target bound is needed for this antiderivative")
        return divide(exp(T), Tp)

    E = exp(T, _over(target, Tp.terms[0][0].inv()))
    magE = E.terms[0][0]
    g = magE / Tp.terms[0][0]
    u_t = _over(target, g)
    d = max(T.depth, u_t.depth)
    if u_t.absorbs(Monomial.one(d)):
        return Series.zero(d).with_bound(target)

    inv_tp = mul_inverse(Tp, _finer(u_t, _over(target, magE)))
    A = divide(Tpp, mul(Tp, Tp), u_t)

    def phi(U: Series) -> Series:
        return add(mul(A, U, u_t), -mul(derivative(U), inv_tp, u_t), u_t)

    inner = IterationPolicy(u_t, pol.max_iterations, budget=pol.budget)
    U = solve_linear(phi, A, inner)
    S = mul(mul(E, inv_tp, target), add(Series.const(1, U.depth), U), target)
    return S.with_bound(target)


def _integral_mag(r: Monomial) -> Monomial:
    """Magnitude of ∫r (an upper estimate when r is truly iterated-log)."""
    if r.depth:
        low = r.lowered()
        if not low.depth:
            return _integral_mag(low).lift(r.depth)
        # slowly varying: ∫r ≍ x·r
        return r * Monomial(1).lift(r.depth)
    if r.exp_terms:
        Lp = derivative(r.exp_part)
        return r / Lp.terms[0][0]
    if r.xexp == -1:
        return Monomial(1, (), 1)
    return Monomial(r.xexp + 1)


def anti_powerfree(T: Series, policy=None) -> Series:
    """Termwise integration of a power-free series (constant c ↦ c·x)."""
    for m, _ in T.terms:
        if not m.is_power_free:
            raise NotPowerFree("every monomial must have zero power of x")
    target = _target(policy)
    d = T.depth
    total = Series.zero(d)
    for m, c in T.terms:
        if m.is_one:
            piece = Series.monomial(Monomial(1).lift(d), c)
        else:
            piece = anti_exp_large(m.exp_part, policy).scale(c)
        total = add(total, piece, target)
    if T.bound is not None:
        if not isinstance(T.bound, OTerm):
            raise TypeError("power-free integration needs an O-term bound")
        total = total.with_bound(OTerm(_integral_mag(T.bound.monomial)))
    return total


# -- general antiderivative ----------------------------------------------

def _exp_chain(M: int) -> Monomial:
    """exp_{M+1}·exp_M⋯exp_1 as the single monomial e^{y + e^y + ⋯}."""
    cores = [X]
    for _ in range(M):
        cores.append(Monomial(0, ((cores[-1], Fraction(1)),)))
    return Monomial.make(0, [(m, 1) for m in cores])


def antiderivative(A: Series, policy=None) -> Series:
    """B with B′ = A and no constant term."""
    target = _target(policy)
    if isinstance(target, GridCap):
        return _grid_antiderivative(A, target)
    if A.bound is not None and not isinstance(A.bound, OTerm):
        raise TypeError("use a grid-cap target to integrate a grid-capped series")
    M = A.depth
    T1 = A
    for _ in range(M + 1):
        T1 = compose_exp(T1)
    T = mul(T1, Series.monomial(_exp_chain(M)))
    inner = None
    if target is not None:
        m = target.monomial
        inner = OTerm(_lift1(m.core)) if m.depth <= M else None
        if inner is None:
            raise ValueError("target bound is deeper than the result")
        pol = _policy(policy)
        inner = IterationPolicy(inner, pol.max_iterations, budget=pol.budget)
    S = anti_powerfree(T, inner)
    for _ in range(M + 1):
        S = compose_log(S)
    return S.normalized()


# -- grid mode ------------------------------------------------------------

def _check_grid_ratios(cap: GridCap) -> None:
    for r in cap.ratios:
        if r.depth:
            raise NotInGrid("grid integration needs depth-0 ratios")
        if r.exp_terms:
            ok = not r.xexp and len(r.exp_terms) == 1 and r.exp_terms[0][0] == X
            ok = ok and r.exp_terms[0][1] < 0
        else:
            ok = r.xexp == -1
        if not ok:
            raise NotInGrid("grid integration supports ratios x^-1 and e^(-q*x)")


def _grid_antiderivative(A: Series, cap: GridCap) -> Series:
    """Termwise closed forms over ratios {x^-1, e^(-q x), ...}."""
    _check_grid_ratios(cap)
    ratios = cap.ratios
    total = Series.zero(0)
    if A.depth:
        raise NotInGrid("grid integration needs a depth-0 integrand")
    for m, c in A.terms:
        if not m.exp_terms:
            if m.xexp == -1:
                raise NotInGrid("a logarithm does not lie in the grid")
            piece = Series.monomial(Monomial(m.xexp + 1), c / (m.xexp + 1))
        else:
            if len(m.exp_terms) != 1 or m.exp_terms[0][0] != X:
                raise NotInGrid("grid integration needs exponentials e^(b*x)")
            piece = anti_xaebxc(m.xexp, m.exp_terms[0][1], 1, cap).scale(c)
        total = add(total, piece, cap)
    if A.bound is not None:
        if not isinstance(A.bound, GridCap) or A.bound.ratios != ratios:
            raise TypeError("grid integration needs a cap over the same ratios")
        gens = []
        shift = ratios.index(Monomial(-1))
        for e in A.bound.gens:
            # pure powers lose one power of x^-1; exponential terms keep their index
            gens.append(mi_sub(e, shift) if not ratios.power(e).exp_terms else e)
        total = total.with_bound(GridCap(ratios, gens))
    return total
