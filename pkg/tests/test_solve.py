from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from transs.calculus import derivative, log
from transs.errors import NoStabilization
from transs.foundations import check_domination_chain
from transs.grid import RatioSet
from transs.monomial import X, Monomial
from transs.series import OTerm, Series, mul
from transs.solve import IterationPolicy, fixed_point, fixed_point_with_trace, solve_linear
from transs.worked import ex

INV_X = Series.monomial(Monomial(-1))


def factoring_phi(bnd):
    def phi(b):
        return mul(Series.const(-1) - derivative(b) - mul(b, b, bnd), INV_X, bnd)

    return phi


def test_policy_validation():
    with pytest.raises(ValueError):
        IterationPolicy(Monomial.one())
    with pytest.raises(ValueError):
        IterationPolicy(Monomial(-1), max_iterations=0)
    with pytest.raises(ValueError):
        IterationPolicy(None)


def test_first_iterates():
    bnd = Monomial(-15)
    phi = factoring_phi(bnd)
    b1 = phi(Series.zero().with_bound(bnd))
    b2 = phi(b1)
    assert b2.terms == ((Monomial(-1), -1), (Monomial(-3), -2))
    # fifth-degree map: S1 = (1/3) x e^{-4x/3} - 3 e^{-5x/3}
    c = Series.monomial(ex(Fraction(-4, 3), 1), Fraction(1, 3))
    k = Series.monomial(ex(Fraction(-5, 3)), 3)
    assert (c - k).terms == ((ex(Fraction(-4, 3), 1), Fraction(1, 3)), (ex(Fraction(-5, 3)), -3))


def test_lambert_first_iterate():
    D = 2
    t = Series.monomial(Monomial.power(1, D))
    inv_l1 = Series.monomial(Monomial(0, ((X, -1),), D))
    bnd = Monomial(0, ((X, -6),), D)
    Q1 = (-t - log(Series.const(1, D) + mul(Series.zero(D), inv_l1, bnd), bnd)).with_bound(bnd)
    # -mu2^{-1} mu3 = -log log x
    assert Q1.terms == ((Monomial.power(1, D), -1),)


def test_fixed_point_and_diagnostics():
    bnd = Monomial(-15)
    beta, trace = fixed_point_with_trace(factoring_phi(bnd), Series.zero(), IterationPolicy(bnd, diagnostics=True))
    assert [c for _, c in beta.terms] == [-1, -2, -10, -74, -706, -8162, -110410]
    assert trace.contractive is True
    idx = [[trace.ratios.index(m) for m in s] for s in trace.supports if s]
    assert check_domination_chain(idx)


def test_expression_phi():
    bnd = Monomial(-10)
    out = fixed_point("x^-1 + x^-1*Y^2", Series.zero(), IterationPolicy(bnd))
    assert [c for _, c in out.terms] == [1, 1, 2, 5, 14]


def test_solve_linear_examples():
    bnd = Monomial(-6)
    T0 = Series.from_terms([(Monomial(-1), 3), (Monomial(-2), 1)])
    assert solve_linear(lambda U: Series.zero(), T0, IterationPolicy(bnd)).terms == T0.terms
    assert not solve_linear(lambda U: -derivative(U), Series.zero(), IterationPolicy(bnd)).terms


def test_no_stabilization_reports_supports():
    with pytest.raises(NoStabilization) as info:
        fixed_point(lambda T: T + Series.x(), Series.zero(), IterationPolicy(Monomial(-3), max_iterations=4))
    assert info.value.last_differences == [[Monomial(1)]] * 3


@given(st.integers(min_value=5, max_value=13))
def test_finer_target_extends_the_answer(k):
    coarse = fixed_point(factoring_phi(Monomial(-k)), Series.zero(), IterationPolicy(Monomial(-k)))
    fine = fixed_point(factoring_phi(Monomial(-k - 2)), Series.zero(), IterationPolicy(Monomial(-k - 2)))
    assert fine.with_bound(Monomial(-k)).terms == coarse.terms
    # the returned value is a fixed point up to the bound
    again = factoring_phi(Monomial(-k))(coarse)
    assert again.with_bound(Monomial(-k)).terms == coarse.terms


@given(st.lists(st.integers(min_value=1, max_value=5), min_size=1, max_size=3, unique=True), st.integers(6, 12))
def test_linear_geometric_maps(ps, k):
    # U = x^-p U + x^-1: contractive for every p >= 1
    bnd = Monomial(-k)
    G = Series.from_terms([(Monomial(-p), 1) for p in ps])
    U, trace = fixed_point_with_trace(
        lambda U: mul(G, U, bnd), Series.zero(), IterationPolicy(bnd, diagnostics=True), INV_X
    )
    check = (mul(G, U, bnd) + INV_X).with_bound(bnd)
    assert check.terms == U.terms
    assert trace.contractive in (True, None)
