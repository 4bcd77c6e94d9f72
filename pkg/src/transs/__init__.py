"""Exact computer algebra for grid-based transseries."""

from .calculus import (
    TaylorBudget,
    compose,
    compose_exp,
    compose_log,
    derivative,
    divide,
    exp,
    log,
    mul_inverse,
    numeric_eval,
    power,
)
from .errors import (
    BudgetExceeded,
    DomainError,
    ExprSyntaxError,
    NoStabilization,
    TransseriesError,
    UnresolvedOrder,
)
from .frontend.elaborate import Context, elaborate
from .frontend.parser import parse
from .grid import GridCap, RatioSet
from .integrate import anti_exp_large, anti_xaebxc, antiderivative
from .monomial import Monomial
from .render import format_series, series_json
from .series import OTerm, Series, add, cmp, far_cmp, mul, sub
from .solve import IterationPolicy, fixed_point, fixed_point_with_trace, solve_linear

__all__ = [
    "BudgetExceeded",
    "Context",
    "DomainError",
    "ExprSyntaxError",
    "GridCap",
    "IterationPolicy",
    "Monomial",
    "NoStabilization",
    "OTerm",
    "RatioSet",
    "Series",
    "TaylorBudget",
    "TransseriesError",
    "UnresolvedOrder",
    "add",
    "anti_exp_large",
    "anti_xaebxc",
    "antiderivative",
    "cmp",
    "compose",
    "compose_exp",
    "compose_log",
    "derivative",
    "divide",
    "elaborate",
    "exp",
    "far_cmp",
    "fixed_point",
    "fixed_point_with_trace",
    "format_series",
    "log",
    "mul",
    "mul_inverse",
    "numeric_eval",
    "parse",
    "power",
    "series_json",
    "solve_linear",
    "sub",
]
