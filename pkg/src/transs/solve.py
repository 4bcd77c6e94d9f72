"""Fixed-point iteration T ↦ Φ(T) (+ T₀) under a truncation bound."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cmp_to_key
from typing import Callable, Optional

from .calculus import TaylorBudget
from .errors import NoStabilization, NotInGrid, NotSmall
from .foundations import check_domination_chain
from .grid import RatioSet, mu_dominates
from .monomial import Monomial
from .series import Series, as_bound, sub


@dataclass(frozen=True)
class IterationPolicy:
    target_bound: object
    max_iterations: int = 64
    diagnostics: bool = False
    ratios: Optional[RatioSet] = None
    budget: Optional[TaylorBudget] = None

    def __post_init__(self):
        b = as_bound(self.target_bound)
        if b is None:
            raise ValueError("a target bound is required")
        if isinstance(self.target_bound, Monomial) and self.target_bound.is_one:
            raise ValueError("target bound must differ from 1")
        if self.max_iterations <= 0:
            raise ValueError("max_iterations must be positive")


@dataclass
class SolverTrace:
    iterations: int = 0
    differences: list = field(default_factory=list)  # Series of T_{j+1} - T_j
    ratios: Optional[RatioSet] = None
    contractive: Optional[bool] = None
    note: str = ""

    @property
    def supports(self) -> list:
        return [d.support() for d in self.differences]


def _as_callable(phi, policy: IterationPolicy) -> Callable[[Series], Series]:
    if callable(phi):
        return phi
    from .frontend.elaborate import Context, elaborate

    ctx = Context(bound=policy.target_bound, budget=policy.budget or TaylorBudget())
    return lambda Y: elaborate(phi, ctx, Y)


def fixed_point_with_trace(phi, seed: Series, policy: IterationPolicy, t0: Series | None = None):
    step = _as_callable(phi, policy)
    target = as_bound(policy.target_bound)
    trace = SolverTrace()
    T = seed.with_bound(target)
    for k in range(1, policy.max_iterations + 1):
        N = step(T)
        if t0 is not None:
            N = N + t0
        N = N.with_bound(target)
        trace.iterations = k
        if _same_terms(N, T):
            if policy.diagnostics:
                _diagnose(trace, policy)
            return N, trace
        trace.differences.append(_term_difference(N, T))
        T = N
    last = [d.support() for d in trace.differences[-3:]]
    raise NoStabilization(
        f"no stabilization after {policy.max_iterations} iterations", last
    )


def fixed_point(phi, seed: Series, policy: IterationPolicy, t0: Series | None = None) -> Series:
    return fixed_point_with_trace(phi, seed, policy, t0)[0]


def solve_linear(phi_linear, t0: Series, policy: IterationPolicy) -> Series:
    zero = Series.zero(t0.depth)
    return fixed_point(phi_linear, zero, policy, t0)


def _same_terms(A: Series, B: Series) -> bool:
    d = max(A.depth, B.depth)
    return A.lift(d).terms == B.lift(d).terms


def _term_difference(A: Series, B: Series) -> Series:
    """Difference of the stored terms only."""
    return sub(Series(A.terms, None, A.depth), Series(B.terms, None, B.depth))


def _diagnose(trace: SolverTrace, policy: IterationPolicy) -> None:
    diffs = [d for d in trace.differences if d.terms]
    if len(diffs) < 2:
        trace.contractive = True
        trace.note = "fewer than two non-zero differences"
        return
    mu = policy.ratios
    try:
        if mu is None:
            mu = _guess_ratios(diffs)
        trace.ratios = mu
        if mu.independent:
            idx = [[mu.index(m) for m in d.support()] for d in diffs]
            trace.contractive = check_domination_chain(idx)
        else:
            trace.contractive = all(
                mu_dominates(a, b, mu) for a, b in zip(diffs, diffs[1:])
            )
    except (NotInGrid, NotSmall, ValueError) as exc:
        trace.contractive = None
        trace.note = f"diagnostic unavailable: {exc}"


def _guess_ratios(diffs: list) -> RatioSet:
    """Greedy independent ratios from the first two differences.

    Candidates are the small monomials of both differences and of the second
    one divided by the first one's magnitude, taken largest first.
    """
    depth = max(d.depth for d in diffs)
    d1, d2 = diffs[0].lift(depth), diffs[1].lift(depth)
    lead = d1.terms[0][0]
    one = Monomial.one(depth)
    cands = [m for m, _ in d1.terms + d2.terms] + [m / lead for m, _ in d2.terms]
    cands = sorted({m for m in cands if m.cmp(one) < 0}, key=cmp_to_key(Monomial.cmp), reverse=True)
    chosen: list = []
    for m in cands:
        if not chosen or not RatioSet(chosen).in_group(m):
            chosen.append(m)
    if not chosen:
        raise ValueError("no small monomials to build a ratio set from")
    return RatioSet(chosen)
