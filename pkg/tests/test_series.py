from fractions import Fraction
from math import factorial

import pytest
from hypothesis import assume, given

from strategies import E_X, exact_series, grid_monomials, monomials
from transs.calculus import mul_inverse
from transs.errors import LargeTailUnresolved, UnresolvedOrder
from transs.monomial import X, Monomial
from transs.series import (
    OTerm,
    Series,
    add,
    classify,
    cmp,
    decompose_additive,
    decompose_multiplicative,
    far_cmp,
    mag,
    mul,
    sub,
)

ONE = Monomial.one()
x = Series.x()


def xp(k):
    return Monomial(k)


def ex(q, a=0):
    return Monomial(a, ((X, Fraction(q)),) if q else ())


def poly(coeffs, bound=None):
    """Σ c_j x^{-j}."""
    return Series.from_terms([(xp(-j), c) for j, c in enumerate(coeffs) if c], bound)


def abs_series(T):
    return -T if T.terms and T.terms[0][1] < 0 else T


# -- examples ---------------------------------------------------------------

def test_add_examples():
    assert add(x - 1, Series.const(1)) == x
    A = poly([1, 2, 3])
    assert add(A, Series.zero()) == A
    geo = poly([1] * 8, OTerm(xp(-8)))
    out = add(geo, Series.monomial(ex(-1)))
    assert out.terms == geo.terms and out.bound == OTerm(xp(-8))


def test_mul_examples():
    K = 10
    geo = poly([1] * (K + 1), OTerm(xp(-K)))
    out = mul(x - 1, geo)
    assert out.terms == ((xp(1), 1),) and out.bound == OTerm(xp(-K + 1))
    A = poly([3, 0, -1])
    assert mul(Series.const(1), A) == A


def test_euler_product_coefficients():
    # S = Σ j! x^-j, T = Σ (-1)^j j! x^-j, ST = Σ (2j+1)!/(j+1) x^-2j
    n = 12
    S = poly([factorial(j) for j in range(n + 1)], OTerm(xp(-n - 1)))
    T = poly([(-1) ** j * factorial(j) for j in range(n + 1)], OTerm(xp(-n - 1)))
    P = mul(S, T)
    for j in range(6):
        assert P.coeff(xp(-2 * j)) == Fraction(factorial(2 * j + 1), j + 1)
        assert P.coeff(xp(-2 * j - 1)) == 0


def test_mag_and_dom():
    A = Series.from_terms([(E_X, -3), (xp(2), 4)])
    assert mag(A) == E_X and A.dom() == (-3, E_X)
    assert mag(Series.const(7)) == ONE
    assert mag(poly([0, 1, 1])) == xp(-1)


def test_decompositions():
    T = Series.from_terms([(E_X, 1), (ONE, 2), (xp(-1), 1)])
    L, c, S = decompose_additive(T)
    assert L == Series.monomial(E_X) and c == 2 and S == Series.monomial(xp(-1))
    A = Series.from_terms([(E_X, -3), (xp(2), 4)])
    L, c, S = decompose_additive(A)
    assert L == A and c == 0 and S.is_zero
    L, c, S = decompose_additive(Series.zero())
    assert L.is_zero and c == 0 and S.is_zero
    a, g, S = decompose_multiplicative(A)
    assert (a, g) == (-3, E_X) and S == Series.monomial(ex(-1, 2), Fraction(-4, 3))
    assert decompose_multiplicative(Series.const(5))[:2] == (5, ONE)
    a, g, S = decompose_multiplicative(poly([0, 1, 1]))
    assert (a, g) == (1, xp(-1)) and S == Series.monomial(xp(-1))


def test_cmp_examples():
    A = Series.from_terms([(E_X, -3), (xp(2), 4)])
    X9 = Series.monomial(xp(9))
    assert cmp(A, X9) == -1
    assert far_cmp(A, X9).relation == "≻"
    assert cmp(A, A) == 0
    B = poly([1] * 5, OTerm(xp(-4)))
    assert cmp(B, poly([1] * 5, OTerm(xp(-4)))) == 0


def test_cmp_below_bound_is_unresolved():
    A = Series.from_terms([(xp(0), 1)], OTerm(xp(-4)))
    B = Series.from_terms([(xp(0), 1), (ex(-1), 1)])
    with pytest.raises(UnresolvedOrder):
        cmp(A, B)


def test_classify_examples():
    f = classify(Series.from_terms([(xp(-1), 1), (ex(-1, 1), 1)]))
    assert f.small and not f.large
    T = Series.from_terms([(xp(3), 1), (Monomial(0, ((Monomial(Fraction(3, 4)), -1),)), 1)])
    f = classify(T)
    assert f.large and not f.purely_large
    f = classify(Series.zero())
    assert f.small and f.purely_large
    with pytest.raises(LargeTailUnresolved):
        classify(Series.oterm(xp(1)))


# -- properties ----------------------------------------------------------------

series = exact_series()


@given(series, series, series)
def test_ring_axioms(A, B, C):
    assert add(A, B) == add(B, A)
    assert add(add(A, B), C) == add(A, add(B, C))
    assert mul(A, B) == mul(B, A)
    assert mul(mul(A, B), C) == mul(A, mul(B, C))
    assert mul(A, add(B, C)) == add(mul(A, B), mul(A, C))
    assert mul(Series.const(1), A) == A
    assert sub(A, A).is_zero


@given(exact_series(grid_monomials(small=False)))
def test_inverse_times_series_is_one_up_to_bound(A):
    k = 6
    g = mag(A)
    inv = mul_inverse(A, g.inv() * xp(-k))
    P = mul(A, inv, xp(-k))
    assert P.terms == ((ONE, 1),)
    assert P.bound is not None and P.bound.within(OTerm(xp(-k)))


@given(series, series)
def test_ordered_field(A, B):
    A, B = abs_series(A), abs_series(B)
    assume(A.terms and B.terms)
    zero = Series.zero()
    assert cmp(A, zero) == 1 and cmp(B, zero) == 1
    assert cmp(add(A, B), zero) == 1
    assert cmp(mul(A, B), zero) == 1


@given(series, series)
def test_valuation_axioms(S, T):
    assume(S.terms and T.terms)
    assert mag(mul(S, T)) == mag(S) * mag(T)
    U = add(S, T)
    hi = max(mag(S), mag(T))
    if U.terms:
        assert mag(U) <= hi
    if mag(S) != mag(T):
        assert mag(U) == hi


@given(series)
def test_large_magnitude_means_absolute_value_above_one(T):
    assume(T.terms and mag(T) > ONE)
    assert cmp(abs_series(T), Series.const(1)) == 1


@given(exact_series(monomials(), max_terms=3), exact_series(monomials(), max_terms=3))
def test_far_cmp_agrees_with_magnitudes(A, B):
    rel = far_cmp(A, B).relation
    expect = {1: "≻", 0: "≍", -1: "≺"}[mag(A).cmp(mag(B))]
    assert rel == expect


def test_finer_bound_keeps_coarser_coefficients():
    # geometric series 1/(1 - 2/x) at several bounds
    A = Series.from_terms([(ONE, 1), (xp(-1), -2)])
    prev = None
    for k in range(2, 14):
        cur = mul_inverse(A, xp(-k))
        assert [c for _, c in cur.terms] == [2**j for j in range(k)]
        if prev is not None:
            assert cur.with_bound(prev.bound).same_as(prev)
        prev = cur
