"""Command line interface: ``transs <command> ...``.

Exit status: 0 success, 1 syntax or usage error, 2 unresolved order,
exhausted budget or a bound that could not be met, 3 domain error,
4 solver without stabilization.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

import mpmath

from ..calculus import TaylorBudget, _large_positive, numeric_eval
from ..errors import (
    BudgetExceeded,
    DomainError,
    ExprSyntaxError,
    NoStabilization,
    NotInGrid,
    NotSmall,
    TransseriesError,
    UnboundVariable,
    UnresolvedOrder,
    ZeroSeries,
)
from ..monomial import Monomial
from ..render import format_bound, format_monomial, format_series, series_json
from ..series import OTerm, Series, cmp, far_cmp
from ..solve import IterationPolicy, fixed_point_with_trace
from .elaborate import Context, elaborate
from .parser import Diff, Div, Int, Number, VarX, children, parse

EXIT_OK, EXIT_SYNTAX, EXIT_ORDER, EXIT_DOMAIN, EXIT_SOLVER = 0, 1, 2, 3, 4

_FAR = {"≺": "<<", "≍": "~~", "≻": ">>"}

_EPILOG = """\
Expressions use x, + - * / ^, exp(), log(), diff(), int() and e^(...).
Numbers are integers or fractions p/q; decimal literals are rejected.
Exponents are rational literals, e.g. x^(-1/2) or (1+1/x)^-3.
The environment variable TRANSS_MAX_TERMS sets the default term budget."""


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on bad usage; we reserve 2 for order problems."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_SYNTAX, f"{self.prog}: error: {message}\n")


class BoundTooFine(TransseriesError):
    """The computed result only reaches a coarser bound than requested."""


def exit_code(exc: BaseException) -> int:
    if isinstance(exc, (ExprSyntaxError, UsageError, UnboundVariable)):
        return EXIT_SYNTAX
    if isinstance(exc, NoStabilization):
        return EXIT_SOLVER
    if isinstance(exc, (DomainError, ZeroSeries)):
        return EXIT_DOMAIN
    if isinstance(exc, (UnresolvedOrder, BudgetExceeded, BoundTooFine, NotSmall, NotInGrid)):
        return EXIT_ORDER
    return EXIT_ORDER


# -- argument helpers ------------------------------------------------------

def parse_bound(text: str | None, budget: TaylorBudget):
    """A bound is a monomial expression with coefficient 1, other than 1."""
    if text is None:
        return None
    S = elaborate(text, Context(budget=budget))
    if len(S.terms) != 1 or S.bound is not None:
        raise UsageError(f"--bound must be a single monomial, got {format_series(S)}")
    m, c = S.terms[0]
    if c != 1:
        raise UsageError("--bound must have coefficient 1")
    if m.is_one:
        raise UsageError("--bound must differ from 1")
    return OTerm(m)


def parse_rational(text: str) -> Fraction:
    try:
        if "." in text or "e" in text.lower():
            raise ValueError
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a rational number: {text!r}") from None


def _budget(args) -> TaylorBudget:
    if args.max_terms is not None:
        if args.max_terms <= 0:
            raise UsageError("--max-terms must be positive")
        return TaylorBudget(args.max_terms)
    try:
        return TaylorBudget.from_env()
    except ValueError:
        raise UsageError("TRANSS_MAX_TERMS must be a positive integer") from None


def _substitute(e, s):
    """Replace every x in ``e`` by the expression ``s``."""
    if isinstance(e, VarX):
        return s
    kids = children(e)
    if not kids:
        return e
    new = [_substitute(k, s) for k in kids]
    fields = {f: getattr(e, f) for f in e.__dataclass_fields__}
    names = ("left", "right") if len(new) == 2 else (("base",) if hasattr(e, "base") else ("arg",))
    fields.update(zip(names, new))
    return type(e)(**fields)


# -- output ----------------------------------------------------------------

def emit(S: Series, args, out) -> None:
    if getattr(args, "format", "text") == "json":
        out.write(json.dumps(series_json(S)) + "\n")
    else:
        out.write(format_series(S) + "\n")


def _check_reached(S: Series, bound) -> None:
    if bound is None or S.bound is None:
        return
    if isinstance(S.bound, OTerm) and not S.bound.within(bound):
        raise BoundTooFine(
            f"result is only known up to {format_bound(S.bound)}, coarser than requested"
        )


# -- commands ---------------------------------------------------------------

def _expression(args, node):
    budget = _budget(args)
    bound = parse_bound(args.bound, budget)
    S = elaborate(node, Context(bound=bound, budget=budget))
    _check_reached(S, bound)
    return S


def cmd_expand(args, out):
    emit(_expression(args, parse(args.expr)), args, out)


def cmd_diff(args, out):
    emit(_expression(args, Diff(parse(args.expr))), args, out)


def cmd_int(args, out):
    emit(_expression(args, Int(parse(args.expr))), args, out)


def cmd_inv(args, out):
    emit(_expression(args, Div(Number(Fraction(1)), parse(args.expr))), args, out)


def cmd_compose(args, out):
    inner = parse(args.with_)
    probe = elaborate(inner, Context(bound=OTerm(Monomial(-1)), budget=_budget(args)))
    _large_positive(probe)
    emit(_expression(args, _substitute(parse(args.expr), inner)), args, out)


def cmd_cmp(args, out):
    budget = _budget(args)
    bound = parse_bound(args.bound, budget)
    ctx = Context(bound=bound, budget=budget)
    A, B = elaborate(args.a, ctx), elaborate(args.b, ctx)
    sign = {-1: "<", 0: "=", 1: ">"}[cmp(A, B)]
    far = far_cmp(A, B)
    out.write(f"{sign} {_FAR[far.relation]}\n")


def cmd_solve(args, out):
    budget = _budget(args)
    bound = parse_bound(args.bound, budget)
    if bound is None:
        raise UsageError("solve needs --bound")
    ctx = Context(bound=bound, budget=budget)
    seed = elaborate(args.seed, ctx) if args.seed else Series.zero()
    t0 = elaborate(args.t0, ctx) if args.t0 else None
    policy = IterationPolicy(bound, args.max_iter, diagnostics=args.diagnostics, budget=budget)
    phi = parse(args.phi)
    Y, trace = fixed_point_with_trace(lambda T: elaborate(phi, ctx, T), seed, policy, t0)
    if args.diagnostics:
        out.write(f"# iterations: {trace.iterations}\n")
        if trace.ratios is not None:
            names = ", ".join(format_series(Series.monomial(r)) for r in trace.ratios)
            out.write(f"# ratios: {names}\n")
        out.write(f"# contractive: {trace.contractive}\n")
        if trace.note:
            out.write(f"# note: {trace.note}\n")
    emit(Y, args, out)


def cmd_num(args, out):
    x0 = parse_rational(args.at)
    if x0 <= 0:
        raise UsageError("--at must be positive")
    if args.digits <= 0:
        raise UsageError("--digits must be positive")
    S = _expression(args, parse(args.expr))
    out.write(mpmath.nstr(numeric_eval(S, x0, args.digits), args.digits) + "\n")


# -- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(
        prog="transs",
        description="Truncated transseries expansions at x -> +infinity.",
        epilog=_EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, bound_help="truncation bound, a monomial such as x^-8 or e^(-7*x)"):
        sp.add_argument("--bound", help=bound_help)
        sp.add_argument("--max-terms", type=int, help="term budget for each series loop")
        sp.add_argument("--format", choices=("text", "json"), default="text")

    for name, func, what in (
        ("expand", cmd_expand, "expand an expression"),
        ("diff", cmd_diff, "derivative of an expression"),
        ("int", cmd_int, "antiderivative without constant term"),
        ("inv", cmd_inv, "multiplicative inverse"),
    ):
        sp = sub.add_parser(name, help=what)
        sp.add_argument("expr")
        common(sp)
        sp.set_defaults(func=func)

    sp = sub.add_parser("compose", help="substitute --with for x")
    sp.add_argument("expr")
    sp.add_argument("--with", dest="with_", required=True, help="large positive inner expression")
    common(sp)
    sp.set_defaults(func=cmd_compose)

    sp = sub.add_parser("cmp", help="compare two expressions")
    sp.add_argument("a")
    sp.add_argument("b")
    sp.add_argument("--bound")
    sp.add_argument("--max-terms", type=int)
    sp.set_defaults(func=cmd_cmp)

    sp = sub.add_parser("solve", help="fixed point of Y = phi(Y) (+ t0)")
    sp.add_argument("--phi", required=True, help="expression in Y")
    sp.add_argument("--t0")
    sp.add_argument("--seed")
    sp.add_argument("--max-iter", type=int, default=64)
    sp.add_argument("--diagnostics", action="store_true")
    common(sp)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("num", help="numeric value of the expansion")
    sp.add_argument("expr")
    sp.add_argument("--at", required=True, help="rational point, e.g. 10 or 21/2")
    sp.add_argument("--digits", type=int, default=30)
    sp.add_argument("--bound")
    sp.add_argument("--max-terms", type=int)
    sp.set_defaults(func=cmd_num)
    return p


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.func(args, out)
    except (TransseriesError, UsageError, ValueError) as exc:
        err.write(f"transs: {_describe(exc)}\n")
        if isinstance(exc, NoStabilization) and exc.last_differences:
            for supp in exc.last_differences:
                err.write("# support: " + ", ".join(map(format_monomial, supp)) + "\n")
        return EXIT_SYNTAX if isinstance(exc, ValueError) else exit_code(exc)
    return EXIT_OK


def _describe(exc: BaseException) -> str:
    text = f"{type(exc).__name__}: {exc}"
    where = getattr(exc, "node_offset", None)
    if where is not None and not isinstance(exc, ExprSyntaxError):
        text += f" (in {exc.node_kind} at offset {where})"
    return text


if __name__ == "__main__":
    sys.exit(main())
