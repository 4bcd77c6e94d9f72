"""Worked problems built from the kernel operations.

Each builder returns the computed series together with the data needed to
check it (bounds, residuals).  The fixed-point maps are written out by hand
so that the ansatz for each branch is visible.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .calculus import derivative, exp, log, mul_inverse
from .grid import GridCap, RatioSet
from .integrate import anti_exp_large, antiderivative
from .monomial import X, Monomial
from .series import OTerm, Series, add, mul
from .solve import IterationPolicy, SolverTrace, fixed_point_with_trace


def ex(q, a=0) -> Monomial:
    """x^a e^{q x}."""
    q = Fraction(q)
    return Monomial(a, ((X, q),) if q else ())


def _powers(S: Series, n: int, bound) -> list:
    out = [Series.const(1), S]
    for _ in range(n - 1):
        out.append(mul(out[-1], S, bound))
    return out


@dataclass
class Solved:
    value: Series
    trace: SolverTrace
    residual: Series | None = None
    residual_bound: object = None


# -- Y^5 + e^x Y^2 - x Y - 9 = 0 ----------------------------------------------

FIFTH_BRANCHES = ("x/3", "+3", "-3")


def fifth_degree(branch: str = "x/3", y_bound: Monomial | None = None) -> Solved:
    """One real root of Y^5 + e^x Y^2 - x Y - 9 with Y known up to ``y_bound``.

    Branch "x/3" uses Y = -e^{x/3}(1+S); branches "+3", "-3" use
    Y = ±3 e^{-x/2}(1+S).
    """
    if branch not in FIFTH_BRANCHES:
        raise ValueError(f"branch must be one of {FIFTH_BRANCHES}")
    y_bound = y_bound or ex(-7)
    if branch == "x/3":
        lead = Series.monomial(ex(Fraction(1, 3)), -1)
        bnd = y_bound / ex(Fraction(1, 3))
        c = Series.monomial(ex(Fraction(-4, 3), 1), Fraction(1, 3))
        k = Series.monomial(ex(Fraction(-5, 3)), 3)

        def phi(S):
            _, S1, S2, S3, S4, S5 = _powers(S, 5, bnd)
            out = S2.scale(-3) + S3.scale(Fraction(-10, 3)) + S4.scale(Fraction(-5, 3))
            out = out + S5.scale(Fraction(-1, 3)) + mul(c, S1, bnd) + c - k
            return out.with_bound(bnd)

        # P'(Y) is of size e^{4x/3}
        growth = ex(Fraction(4, 3))
    else:
        a = 3 if branch == "+3" else -3
        lead = Series.monomial(ex(Fraction(-1, 2)), a)
        bnd = y_bound / ex(Fraction(-1, 2))
        c = Series.monomial(ex(Fraction(-1, 2), 1), Fraction(a, 18))
        k = Series.monomial(ex(Fraction(-5, 2)), Fraction(-(a**5), 18))

        # 18 S + 9 S^2 + a^5 e^{-5x/2} (1+S)^5 - a x e^{-x/2} (1+S) = 0
        def phi(S):
            one_s = Series.const(1) + S
            P5 = _powers(one_s, 5, bnd)[5]
            out = mul(S, S, bnd).scale(Fraction(-1, 2)) + mul(k, P5, bnd) + mul(c, one_s, bnd)
            return out.with_bound(bnd)

        # P'(Y) is of size e^{x/2}
        growth = ex(Fraction(1, 2))
    pol = IterationPolicy(bnd, diagnostics=True)
    S, trace = fixed_point_with_trace(phi, Series.zero(), pol)
    Y = mul(lead, Series.const(1) + S, y_bound)
    rb = y_bound * growth
    return Solved(Y, trace, fifth_residual(Y, rb), rb)


def fifth_residual(Y: Series, bound: Monomial) -> Series:
    """P(Y) = Y^5 + e^x Y^2 - x Y - 9, computed up to ``bound``."""
    _, Y1, Y2, _, _, Y5 = _powers(Y, 5, None)
    ex1 = Series.monomial(ex(1))
    out = add(Y5, mul(ex1, Y2), bound)
    out = add(out, -mul(Series.x(), Y1), bound)
    return add(out, Series.const(-9), bound)


# -- Lambert W -----------------------------------------------------------------

def lambert_w(degree: int = 6) -> Solved:
    """Inverse of x e^x: W = log x + Q with Q = -log(log x + Q).

    Works at depth 2, where the variable is log log x; terms of total degree
    above ``degree`` in (log log x / log x, 1 / log x) are dropped.
    """
    D = 2
    t = Series.monomial(Monomial.power(1, D))
    l1m = Monomial(0, ((X, 1),), D)
    bnd = Monomial(0, ((X, -degree),), D)
    inv_l1 = Series.monomial(l1m.inv())

    def phi(Q):
        return (-t - log(Series.const(1, D) + mul(Q, inv_l1, bnd), bnd)).with_bound(bnd)

    Q, trace = fixed_point_with_trace(phi, Series.zero(D), IterationPolicy(bnd, diagnostics=True))
    W = Series.monomial(l1m) + Q
    # W e^W - x: an error d in W changes W e^W by about x d
    xm = Monomial(0, ((Monomial(0, ((X, 1),)), 1),), D)
    rb = xm * bnd
    E = exp(W, rb / l1m)
    R = add(mul(W, E, rb), -Series.monomial(xm), rb)
    return Solved(W, trace, R, rb)


# -- integral of e^{e^{e^x}} -------------------------------------------------

def compint(rows: int = 4) -> tuple[Series, Monomial]:
    """∫ e^{e^{e^x}} up to e^{e^{e^x}} e^{-(rows+1) e^x}."""
    E1 = ex(1)
    E2 = Monomial(0, ((E1, 1),))
    E3 = Monomial(0, ((E2, 1),))
    bnd = E3 * Monomial(0, ((E1, -(rows + 1)),))
    return antiderivative(Series.monomial(E3), bnd), bnd


def compint_direct(rows: int = 4) -> Series:
    """Same integral through the e^T/T′·(1+U) route with T = e^{e^x}."""
    E2 = Monomial(0, ((ex(1), 1),))
    E3 = Monomial(0, ((E2, 1),))
    bnd = E3 * Monomial(0, ((ex(1), -(rows + 1)),))
    return anti_exp_large(Series.monomial(E2), bnd)


def compint_rows(B: Series, rows: int = 4) -> list:
    """c_{j,k}: coefficient of e^{e^{e^x}} e^{-j e^x} e^{-k x}."""
    E1 = ex(1)
    E2 = Monomial(0, ((E1, 1),))
    out = []
    for j in range(1, rows + 1):
        row = []
        for k in range(1, j + 1):
            m = Monomial.make(0, [(E2, 1), (E1, -j), (X, -k)])
            row.append(B.coeff(m))
        out.append(row)
    return out


# -- Riccati equation Y' = a Y + Y^2 ---------------------------------------------

RICCATI_RATIOS = RatioSet([Monomial(-1), ex(-1)])


def riccati(k: int = 6, margin: int = 3) -> Solved:
    """Y = S/(1 - ∫S), S = exp(∫a), a = (x - x^2)/(x^2 - x + 1), with c = 1.

    Computed on the grid over (1/x, e^-x); the result keeps all terms mu^j
    with j <= (k, k).  A wider working box absorbs the loss of one power of
    1/x per integration.
    """
    mu = RICCATI_RATIOS
    work = GridCap.box(mu, (k + margin, k + margin))
    final = GridCap.box(mu, (k, k))
    x = Series.x()
    a = mul(x - mul(x, x), mul_inverse(mul(x, x) - x + 1, work), work)
    S = exp(antiderivative(a, work), work)
    IS = antiderivative(S, work)
    Y = mul(S, mul_inverse(Series.const(1) - IS, work), work).with_bound(final)
    R = add(derivative(Y), -add(mul(a, Y, final), mul(Y, Y, final), final), final)
    return Solved(Y, SolverTrace(note="closed form"), R, final)


# -- factoring d^2 + x d + 1 = (d - alpha)(d - beta) -----------------------------

def factoring(order: int = 15) -> tuple[Series, Series, SolverTrace]:
    """beta solves beta' + beta^2 + x beta + 1 = 0; alpha = -x - beta."""
    bnd = Monomial(-order)
    inv_x = Series.monomial(Monomial(-1))

    def phi(b):
        return mul(Series.const(-1) - derivative(b) - mul(b, b, bnd), inv_x, bnd)

    beta, trace = fixed_point_with_trace(phi, Series.zero(), IterationPolicy(bnd, diagnostics=True))
    alpha = (-Series.x() - beta).with_bound(OTerm(bnd))
    return alpha, beta, trace
