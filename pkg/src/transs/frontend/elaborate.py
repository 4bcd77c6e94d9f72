"""Evaluation of parsed expressions to truncated transseries.

Each node is evaluated against a target bound.  Children get targets scaled
by the magnitude of their siblings (found with a cheap probe evaluation);
when a node's result still comes back coarser than its target, the internal
target is tightened by the missing ratio and the node is recomputed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .. import calculus as calc
from ..calculus import TaylorBudget, _over
from ..errors import TransseriesError, UnboundVariable, ZeroSeries
from ..grid import (
    RatioSet,
    derivative_addendum,
    inversion_addendum,
    smallness_addendum,
)
from ..integrate import antiderivative
from ..monomial import Monomial
from ..series import OTerm, Series, add, as_bound, decompose_additive, mul
from .parser import (
    Add,
    Diff,
    Div,
    Exp,
    Expr,
    Int,
    Log,
    Mul,
    Neg,
    Number,
    Pow,
    Sub,
    VarX,
    VarY,
    children,
    contains_y,
    parse,
)


@dataclass
class Context:
    bound: object = None
    budget: TaylorBudget = field(default_factory=TaylorBudget.from_env)
    policy: object = None
    ratios: Optional[RatioSet] = None
    track_ratios: bool = False
    refine_rounds: int = 6
    notes: list = field(default_factory=list)

    def __post_init__(self):
        b = self.bound
        if isinstance(b, Monomial) and b.is_one:
            raise ValueError("the bound must differ from 1")
        if isinstance(b, OTerm) and b.monomial.is_one:
            raise ValueError("the bound must differ from 1")

    def extend(self, make) -> None:
        """Apply an addendum to the ratio context; failures are noted, not raised."""
        if not self.track_ratios or self.ratios is None:
            return
        try:
            self.ratios = make(self.ratios)
        except (TransseriesError, ValueError) as exc:
            self.notes.append(f"ratio addendum skipped: {exc}")


def elaborate(e, ctx: Context | None = None, binding: Series | None = None) -> Series:
    """Evaluate an expression (text or AST) under ``ctx``; ``binding`` is the value of Y."""
    if isinstance(e, str):
        e = parse(e)
    ctx = ctx or Context()
    if ctx.track_ratios and ctx.ratios is None:
        ctx.ratios = collect_ratios(e, ctx)
    out = _Evaluator(ctx, binding).eval(e, as_bound(ctx.bound))
    return out.normalized()


def collect_ratios(e: Expr, ctx: Context | None = None) -> RatioSet:
    """{x^-1} plus e^(-|L|) for each exp whose argument is exact, closed under addenda."""
    base = [Monomial(-1)]
    budget = ctx.budget if ctx else TaylorBudget()
    stack = [e]
    while stack:
        node = stack.pop()
        stack.extend(children(node))
        if isinstance(node, Exp) and not contains_y(node.arg):
            try:
                arg = _Evaluator(Context(budget=budget), None).eval(node.arg, None)
                L, _, _ = decompose_additive(arg)
            except (TransseriesError, ValueError):
                continue
            if L.terms:
                g = Monomial(0, tuple((m.core, c) for m, c in L.terms), L.depth)
                base.append(g.inv() if g.cmp(Monomial.one(g.depth)) > 0 else g)
    return derivative_addendum(RatioSet(base))


def _tag(exc: Exception, node: Expr) -> None:
    if getattr(exc, "node_offset", None) is None:
        exc.node_offset = node.pos
        exc.node_kind = type(node).__name__


def _upper(S: Series) -> Monomial | None:
    if S.terms:
        return S.terms[0][0]
    if S.bound is not None:
        return S.bound.upper_monomials()[0]
    return None


def _finer(a, b):
    if a is None:
        return b
    if b is None:
        return a
    if isinstance(a, OTerm) and isinstance(b, OTerm):
        return a if a.monomial.cmp(b.monomial) <= 0 else b
    return a


_LEAVES = (Number, VarX, VarY)


class _Key:
    __slots__ = ("m",)

    def __init__(self, m):
        self.m = m

    def __lt__(self, other):
        return self.m.cmp(other.m) < 0


class _Evaluator:
    def __init__(self, ctx: Context, binding: Series | None):
        self.ctx = ctx
        self.binding = binding
        self.budget = ctx.budget
        self.memo: dict = {}

    def eval(self, node: Expr, t) -> Series:
        key = (id(node), t)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        try:
            out = self._refined(node, t)
        except TransseriesError as exc:
            _tag(exc, node)
            raise
        self.memo[key] = out
        return out

    def _refined(self, node: Expr, t) -> Series:
        out = self._once(node, t)
        if not isinstance(t, OTerm) or isinstance(node, _LEAVES):
            return out
        inner = t
        for _ in range(self.ctx.refine_rounds):
            b = out.bound
            if b is None or not isinstance(b, OTerm) or b.within(t):
                break
            d = max(t.depth, b.depth, inner.depth)
            gap = t.monomial.lift(d) / b.monomial.lift(d)
            inner = OTerm(inner.monomial.lift(d) * gap)
            out = self._once(node, inner)
        return out.with_bound(t)

    # -- one evaluation at internal target t ------------------------------
    def _once(self, node: Expr, t) -> Series:
        ev = self.eval
        if isinstance(node, Number):
            return Series.const(node.value)
        if isinstance(node, VarX):
            return Series.x()
        if isinstance(node, VarY):
            if self.binding is None:
                raise UnboundVariable("Y appears outside a solver context")
            return self.binding
        if isinstance(node, Neg):
            return -ev(node.arg, t)
        if isinstance(node, (Add, Sub)):
            a, b = ev(node.left, t), ev(node.right, t)
            return add(a, b if isinstance(node, Add) else -b, t)
        if isinstance(node, Mul):
            return self._mul(node, t)
        if isinstance(node, Div):
            return self._div(node, t)
        if isinstance(node, Pow):
            return self._pow(node, t)
        if isinstance(node, Exp):
            return self._exp(node, t)
        if isinstance(node, Log):
            return self._log(node, t)
        if isinstance(node, Diff):
            A = ev(node.arg, t)
            self.ctx.extend(derivative_addendum)
            return calc.derivative(A)
        if isinstance(node, Int):
            A = ev(node.arg, t)
            return antiderivative(A, t)
        raise TypeError(f"unknown node {node!r}")

    # -- magnitude estimates ----------------------------------------------
    def lead(self, node: Expr) -> Monomial | None:
        """An upper estimate of the node's magnitude (None for zero)."""
        key = ("lead", id(node))
        if key in self.memo:
            return self.memo[key]
        out = self._lead(node)
        self.memo[key] = out
        return out

    def _lead(self, node: Expr) -> Monomial | None:
        if isinstance(node, Number):
            return Monomial.one() if node.value else None
        if isinstance(node, VarX):
            return Monomial(1)
        if isinstance(node, VarY):
            return _upper(self.binding) if self.binding is not None else None
        if isinstance(node, Neg):
            return self.lead(node.arg)
        if isinstance(node, (Add, Sub)):
            ms = [m for m in (self.lead(node.left), self.lead(node.right)) if m is not None]
            return max(ms, key=_Key) if ms else None
        if isinstance(node, (Mul, Div)):
            a, b = self.lead(node.left), self.lead(node.right)
            if a is None or b is None:
                return None
            return a * b if isinstance(node, Mul) else a / b
        if isinstance(node, Pow):
            a = self.lead(node.base)
            return None if a is None else a ** node.exponent
        if isinstance(node, Diff):
            a = self.lead(node.arg)
            return None if a is None else OTerm(a).derivative().monomial
        if isinstance(node, Int):
            a = self.lead(node.arg)
            return None if a is None else a * Monomial(1)
        if isinstance(node, Exp):
            # e^L for the large part L of the argument
            arg = self.eval(node.arg, OTerm(Monomial(-1)))
            L, _, _ = decompose_additive(arg)
            return Monomial(0, tuple((m.core, c) for m, c in L.terms), arg.depth)
        a = self.lead(node.arg)
        if a is None:
            raise ZeroSeries("log of zero")
        head = calc.log_monomial(a)
        # log(1 + small) is below 1
        return head.terms[0][0] if head.terms else Monomial.one(a.depth)

    def _mul(self, node: Mul, t) -> Series:
        if t is None:
            return mul(self.eval(node.left, None), self.eval(node.right, None))
        ua, ub = self.lead(node.left), self.lead(node.right)
        if ua is None or ub is None:
            return Series.zero()
        a = self.eval(node.left, _over(t, ub))
        b = self.eval(node.right, _over(t, ua))
        return mul(a, b, t)

    def _div(self, node: Div, t) -> Series:
        if t is None:
            num, den = self.eval(node.left, None), self.eval(node.right, None)
        else:
            un, gd = self.lead(node.left), self.lead(node.right)
            if un is None:
                return Series.zero()
            if gd is None:
                raise ZeroSeries("division by zero")
            num = self.eval(node.left, _over(t, gd.inv()))
            den = self.eval(node.right, _over(t, un / (gd * gd)))
        self.ctx.extend(lambda mu: inversion_addendum(den, mu))
        return calc.divide(num, den, t, self.budget)

    def _pow(self, node: Pow, t) -> Series:
        p = node.exponent
        if t is None or p == 1:
            base = self.eval(node.base, t)
        else:
            g = self.lead(node.base)
            if g is None:
                if p <= 0:
                    raise ZeroSeries("non-positive power of zero")
                return Series.zero()
            base = self.eval(node.base, _over(t, g ** (p - 1)))
        if p < 0:
            self.ctx.extend(lambda mu: inversion_addendum(base, mu))
        return calc.power(base, p, t, self.budget)

    def _exp(self, node: Exp, t) -> Series:
        if t is None:
            return calc.exp(self.eval(node.arg, None), None, self.budget)
        probe = _finer(t, OTerm(Monomial(-1))) if isinstance(t, OTerm) else t
        arg = self.eval(node.arg, probe)
        L, _, small = decompose_additive(arg)
        E = Monomial(0, tuple((m.core, c) for m, c in L.terms), arg.depth)
        arg = self.eval(node.arg, _finer(probe, _over(t, E)))
        _, _, small = decompose_additive(arg)
        if small.terms:
            self.ctx.extend(lambda mu: smallness_addendum(small, mu))
        return calc.exp(arg, t, self.budget)

    def _log(self, node: Log, t) -> Series:
        if t is None:
            return calc.log(self.eval(node.arg, None), None, self.budget)
        g = self.lead(node.arg)
        if g is None:
            raise ZeroSeries("log of zero")
        arg = self.eval(node.arg, _over(t, g.inv()))
        return calc.log(arg, t, self.budget)
