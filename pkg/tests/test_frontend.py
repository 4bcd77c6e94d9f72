from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from strategies import exact_series, monomials
from transs.errors import ExprSyntaxError, UnboundVariable
from transs.frontend.elaborate import Context, collect_ratios, elaborate
from transs.frontend.parser import (
    Add,
    Div,
    Exp,
    Mul,
    Neg,
    Number,
    Pow,
    Sub,
    VarX,
    VarY,
    parse,
)
from transs.monomial import X, Monomial
from transs.render import format_series, series_from_json, series_json
from transs.series import OTerm, Series


def ex(q, a=0):
    return Monomial(a, ((X, Fraction(q)),) if q else ())


# -- parser -------------------------------------------------------------------

def test_parse_shapes():
    assert parse("1/(exp(x)+x)") == Div(Number(Fraction(1)), Add(Exp(VarX()), VarX()))
    assert parse("x^(3/2)") == Pow(VarX(), Fraction(3, 2))
    assert parse("x^-2") == Pow(VarX(), Fraction(-2))
    assert parse("e^(-x)") == Exp(Neg(VarX()))
    assert parse("-x*Y") == Mul(Neg(VarX()), VarY())


def test_parse_quintic():
    e = parse("Y^5 + exp(x)*Y^2 - x*Y - 9")
    assert isinstance(e, Sub) and e.right == Number(Fraction(9))
    assert e.left.left.left == Pow(VarY(), Fraction(5))


def test_rational_literals():
    assert parse("3/4") == Number(Fraction(3, 4))
    # a/b/c reads left to right
    assert parse("1/2/3") == Div(Number(Fraction(1, 2)), Number(Fraction(3)))
    assert parse("x/2/3") == Div(Div(VarX(), Number(Fraction(2))), Number(Fraction(3)))


@pytest.mark.parametrize(
    "text, offset",
    [("2**x", 2), ("1.5*x", 1), ("x + ", 4), ("sin(x)", 0), ("(x", 2), ("1/0", 2)],
)
def test_syntax_errors(text, offset):
    with pytest.raises(ExprSyntaxError) as info:
        parse(text)
    assert info.value.offset == offset
    assert isinstance(info.value, SyntaxError)


def test_offsets_are_bytes():
    # "é" takes two bytes in UTF-8
    with pytest.raises(ExprSyntaxError) as info:
        parse("x + é")
    assert info.value.offset == 4
    with pytest.raises(ExprSyntaxError) as info:
        parse("é")
    assert info.value.offset == 0


# -- elaboration ---------------------------------------------------------------

def test_elaborate_examples():
    assert elaborate("x-1") == Series.x() - 1
    assert elaborate("diff(log(x))") == Series.monomial(Monomial(-1))
    S = elaborate("1/(exp(x)+x)", Context(bound=ex(-9)))
    # 1/(e^x + x) = Σ (-x)^j e^{-(j+1)x}
    expect = [(ex(-(j + 1), j), (-1) ** j) for j in range(9)]
    assert list(S.terms) == expect
    assert S.bound == OTerm(ex(-9))


def test_elaborate_with_binding():
    Y = Series.from_terms([(Monomial(1), 2), (Monomial(0), 1)])
    S = elaborate("Y^2 - 4*x^2", binding=Y)
    assert S == Series.from_terms([(Monomial(1), 4), (Monomial(0), 1)])
    with pytest.raises(UnboundVariable):
        elaborate("Y + 1")


def test_elaborate_is_deterministic():
    text = "exp(1/x)/(1 - 1/x) + log(x + exp(x))"
    runs = [elaborate(text, Context(bound=Monomial(-7))) for _ in range(3)]
    assert all(r.same_as(runs[0]) for r in runs)
    assert format_series(runs[0]) == format_series(runs[1])


def test_bound_one_rejected():
    with pytest.raises(ValueError):
        Context(bound=Monomial.one())


def test_collect_ratios():
    mu = collect_ratios(parse("exp(x) + 1/x"))
    assert Monomial(-1) in mu.ratios and ex(-1) in mu.ratios


# -- render / parse round trips ------------------------------------------------------

@given(exact_series(monomials(), max_terms=4))
def test_render_parse_round_trip(S):
    assert elaborate(format_series(S)) == S


@given(exact_series(monomials(), max_terms=4), st.integers(min_value=1, max_value=6))
def test_json_round_trip(S, k):
    T = S.with_bound(OTerm(Monomial(-k)))
    assert series_from_json(series_json(T)).same_as(T)
