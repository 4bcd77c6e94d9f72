from fractions import Fraction
from math import factorial

import mpmath
import pytest
import sympy
from hypothesis import assume, given
from hypothesis import strategies as st

from strategies import E_X, exact_series, monomials, nonzero_rationals
from transs.calculus import (
    TaylorBudget,
    compose,
    compose_exp,
    compose_log,
    compose_order_check,
    derivative,
    exp,
    log,
    mul_inverse,
    numeric_eval,
    power,
)
from transs.errors import BudgetExceeded, NonRationalConstant, NotPositive
from transs.frontend.elaborate import elaborate
from transs.monomial import X, Monomial
from transs.series import OTerm, Series, add, cmp, mul, sub

ONE = Monomial.one()
x = Series.x()
LOG_X = Series.monomial(Monomial(1, (), 1))


def xp(k):
    return Monomial(k)


def ex(q, a=0):
    return Monomial(a, ((X, Fraction(q)),) if q else ())


def poly(coeffs, bound=None):
    return Series.from_terms([(xp(-j), c) for j, c in enumerate(coeffs) if c], bound)


def sympy_coeffs(expr, n):
    """Coefficients of t^0..t^{n-1} of expr(t) at t = 0."""
    t = sympy.Symbol("t")
    ser = sympy.series(expr(t), t, 0, n).removeO()
    return [Fraction(str(ser.coeff(t, j))) for j in range(n)]


def agree(A, B):
    """No stored term of A - B survives the coarser of the two bounds."""
    return not sub(A, B).terms


# -- derivative ----------------------------------------------------------------

def test_derivative_examples():
    assert derivative(LOG_X) == Series.monomial(xp(-1))
    K = 8
    S = Series.from_terms([(ex(1, -k - 1), factorial(k)) for k in range(K + 1)])
    expect = Series.from_terms([(ex(1, -1), 1), (ex(1, -K - 2), -factorial(K + 1))])
    assert derivative(S) == expect
    mu3 = Monomial(0, ((E_X, -1),))
    assert derivative(Series.monomial(mu3)) == Series.monomial(mu3 * E_X, -1)


@given(exact_series(), exact_series())
def test_leibniz(A, B):
    lhs = derivative(mul(A, B))
    rhs = add(mul(derivative(A), B), mul(A, derivative(B)))
    assert lhs == rhs


@given(exact_series())
def test_zero_derivative_only_for_constants(T):
    D = derivative(T)
    is_const = all(m.is_one for m, _ in T.terms)
    assert D.is_zero == is_const


@given(exact_series())
def test_derivative_never_produces_x_inverse(T):
    assert derivative(T).coeff(xp(-1)) == 0


@given(exact_series(), exact_series())
def test_order_lemmas(T, S):
    Tp = derivative(T)
    if T.mag() < ONE:
        assert Tp.is_zero or Tp.mag() < ONE
    if T.mag() > ONE:
        assert (T.mag() * T.mag()) > Tp.mag()
        if T.leading_coeff() > 0:
            assert Tp.leading_coeff() > 0
    if not T.mag().is_one and T.mag() > S.mag() and not derivative(S).is_zero:
        assert Tp.mag() > derivative(S).mag()


# -- inverse, power ------------------------------------------------------------

def test_inverse_examples():
    A = Series.from_terms([(E_X, 1), (xp(1), 1)])
    inv = mul_inverse(A, ex(-9))
    assert inv.terms == tuple((ex(-j - 1, j), (-1) ** j) for j in range(9))
    E = poly([0] + [factorial(j) for j in range(12)], OTerm(xp(-12)))
    inv = mul_inverse(E, xp(-4))
    assert [c for _, c in inv.terms] == [1, -1, -1, -3, -13]
    assert mul_inverse(Series.const(1)) == Series.const(1)


def test_inverse_needs_a_bound_for_infinite_expansions():
    with pytest.raises(BudgetExceeded):
        mul_inverse(poly([1, 1]), None, TaylorBudget(20))


def test_power_examples():
    T = poly([2, 1])
    assert power(T, 0) == Series.const(1)
    assert power(Series.monomial(xp(2)), Fraction(1, 2)) == x
    out = power(poly([1, 1]), -2, xp(-8))
    assert [c for _, c in out.terms] == [(-1) ** j * (j + 1) for j in range(8)]
    oracle = sympy_coeffs(lambda t: (1 + t) ** sympy.Rational(1, 3), 7)
    cube = power(poly([1, 1]), Fraction(1, 3), xp(-7))
    assert [cube.coeff(xp(-j)) for j in range(7)] == oracle


def test_power_of_non_rational_constant():
    with pytest.raises(NonRationalConstant):
        power(Series.const(2), Fraction(1, 2))


# -- exp, log ------------------------------------------------------------------

def test_exp_log_examples():
    assert exp(Series.zero()) == Series.const(1)
    assert exp(x) == Series.monomial(E_X)
    assert log(x) == LOG_X
    T = Series.from_terms([(E_X, 1), (ex(1, -1), 1)])
    got = log(T, xp(-7))
    oracle = sympy_coeffs(lambda t: sympy.log(1 + t), 7)
    assert got.coeff(xp(1)) == 1
    assert [got.coeff(xp(-j)) for j in range(1, 7)] == oracle[1:]
    e1x = exp(Series.monomial(xp(-1)), xp(-8))
    assert [e1x.coeff(xp(-j)) for j in range(8)] == sympy_coeffs(sympy.exp, 8)


def test_log_domain_errors():
    with pytest.raises(NotPositive):
        log(Series.const(-1))
    with pytest.raises(NonRationalConstant):
        log(Series.const(2))
    with pytest.raises(NonRationalConstant):
        exp(Series.const(1))


large_parts = st.lists(
    st.tuples(st.sampled_from([xp(1), Monomial(Fraction(1, 2)), xp(2)]), nonzero_rationals),
    max_size=2,
    unique_by=lambda p: p[0],
)
small_parts = st.lists(st.tuples(st.integers(1, 4), nonzero_rationals), max_size=3, unique_by=lambda p: p[0])


def _zero_const(large, small):
    return Series.from_terms(list(large) + [(xp(-j), c) for j, c in small])


@given(large_parts, small_parts)
def test_log_exp_round_trip(large, small):
    T = _zero_const(large, small)
    k = 8
    E = exp(T, _exp_mag(T) * xp(-k))
    back = log(E, xp(-k))
    assert agree(back, T)
    assert back.bound is None or back.bound.within(OTerm(xp(-k + 0)))


def _exp_mag(T):
    large = [(m, c) for m, c in T.terms if m > ONE]
    return Monomial.make(0, large)


@given(large_parts, small_parts)
def test_exp_chain_rule(large, small):
    T = _zero_const(large, small)
    g = _exp_mag(T)
    E = exp(T, g * xp(-8))
    lhs = derivative(E)
    rhs = mul(E, derivative(T), lhs.bound)
    assert agree(lhs, rhs)


@given(large_parts, small_parts, large_parts, small_parts)
def test_exp_is_order_preserving(l1, s1, l2, s2):
    A, B = _zero_const(l1, s1), _zero_const(l2, s2)
    assume(not sub(A, B).is_zero)
    k = 8
    EA, EB = exp(A, _exp_mag(A) * xp(-k)), exp(B, _exp_mag(B) * xp(-k))
    assert cmp(A, B) == cmp(EA, EB)


@given(
    st.sampled_from([Fraction(1), Fraction(4), Fraction(9)]),
    st.fractions(min_value=-3, max_value=3, max_denominator=2),
    small_parts,
    st.sampled_from([Fraction(-2), Fraction(-1, 2), Fraction(1, 2), Fraction(3, 2), Fraction(3)]),
)
def test_power_chain_rule_and_height(c, a, small, b):
    S = mul(Series.monomial(Monomial(a), c), Series.const(1) + _zero_const([], small))
    k = 8
    g = S.mag() ** b
    P = power(S, b, g * xp(-k))
    lhs = derivative(P)
    rhs = mul(power(S, b - 1, g / S.mag() * xp(-k)), derivative(S), lhs.bound).scale(b)
    assert agree(lhs, rhs)
    assert all(m.height == 0 for m, _ in P.terms)


@given(large_parts, small_parts)
def test_exp_raises_height_by_at_most_one(large, small):
    T = _zero_const(large, small)
    E = exp(T, _exp_mag(T) * xp(-6))
    h = max(m.height for m, _ in T.terms) if T.terms else 0
    assert all(m.height <= h + 1 for m, _ in E.terms)


# -- composition -----------------------------------------------------------------

def test_compose_examples():
    S = Series.from_terms([(xp(1), 1), (ONE, 1)])
    assert compose(x, S) == S
    sq = compose(Series.monomial(xp(2)), S)
    assert sq == Series.from_terms([(xp(2), 1), (xp(1), 2), (ONE, 1)])
    assert compose_log(x) == LOG_X
    assert compose_exp(LOG_X) == x
    assert compose_exp(Series.monomial(Monomial(Fraction(3, 2)))) == Series.monomial(ex(Fraction(3, 2)))


@given(
    st.lists(st.tuples(st.integers(-3, 3), nonzero_rationals), min_size=1, max_size=3, unique_by=lambda p: p[0]),
    st.lists(st.tuples(st.integers(0, 3), nonzero_rationals), max_size=3, unique_by=lambda p: p[0]),
)
def test_compose_chain_rule_and_support(tt, bb):
    T = Series.from_terms([(xp(k), c) for k, c in tt])
    S = add(x, Series.from_terms([(xp(-j), c) for j, c in bb]))
    k = 8
    C = compose(T, S, xp(-k))
    # support stays in integer powers of x, none above the largest one of T
    top = max(k for k, _ in tt)
    assert all(not m.exp_terms and m.xexp.denominator == 1 and m.xexp <= top for m, _ in C.terms)
    lhs = derivative(C)
    rhs = mul(compose(derivative(T), S, xp(-k - 1)), derivative(S), lhs.bound)
    assert agree(lhs, rhs)


# -- numerics --------------------------------------------------------------------

def test_numeric_eval():
    assert numeric_eval(x, 10, 30) == 10
    geo = Series.from_terms([(xp(-j), 2**j) for j in range(21)])
    with mpmath.workdps(40):
        v = numeric_eval(geo, 10, 30)
        assert abs(v - mpmath.mpf(5) / 4) < mpmath.mpf("1e-6")
        assert abs(numeric_eval(LOG_X, 10, 30) - mpmath.log(10)) < mpmath.mpf("1e-28")


def test_compose_order_check():
    T, A, B = elaborate("x^3 + 1/x"), elaborate("x"), elaborate("x + 1/x")
    assert compose_order_check(T, A, B, xp(-4)) is True
    # log(e^x + x) - log(e^x) ≍ x e^-x lies below x^-3
    T, A, B = elaborate("log(x)"), elaborate("exp(x)"), elaborate("exp(x) + x")
    assert compose_order_check(T, A, B, xp(-3)) is None
    assert compose_order_check(T, A, B, ex(-1, -1)) is True
    with pytest.raises(ValueError):
        compose_order_check(T, B, A, xp(-3))
