"""Multi-indices and the well-partial-order helpers built on them.

Multi-indices are plain tuples of ints.  Scalars are ``fractions.Fraction``.
"""

from __future__ import annotations

import enum
from fractions import Fraction
from typing import Iterable, Sequence

Rational = Fraction
MultiIndex = tuple


class IndexOrder(enum.Enum):
    LEQ = "<="
    GREATER = ">"
    INCOMPARABLE = "incomparable"


def _check_dims(*indices: Sequence[int]) -> int:
    dims = {len(k) for k in indices}
    if len(dims) > 1:
        raise ValueError(f"multi-index dimension mismatch: {sorted(dims)}")
    return dims.pop() if dims else 0


def as_rational(value) -> Fraction:
    """Coerce ints, Fractions and 'p/q' strings; floats are refused."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("bool is not a rational")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


def leq(k: Sequence[int], p: Sequence[int]) -> bool:
    return all(a <= b for a, b in zip(k, p))


def lt(k: Sequence[int], p: Sequence[int]) -> bool:
    """Strict componentwise order: k <= p and k != p."""
    return leq(k, p) and tuple(k) != tuple(p)


def mi_leq(k: Sequence[int], p: Sequence[int]) -> IndexOrder:
    _check_dims(k, p)
    if leq(k, p):
        return IndexOrder.LEQ
    if leq(p, k):
        return IndexOrder.GREATER
    return IndexOrder.INCOMPARABLE


def mi_add(k: Sequence[int], p: Sequence[int]) -> tuple:
    return tuple(a + b for a, b in zip(k, p))


def mi_sub(k: Sequence[int], p: Sequence[int]) -> tuple:
    return tuple(a - b for a, b in zip(k, p))


def mi_meet(indices: Iterable[Sequence[int]]) -> tuple:
    """Componentwise minimum of a non-empty family."""
    indices = list(indices)
    return tuple(min(col) for col in zip(*indices))


def is_positive(k: Sequence[int]) -> bool:
    """k > 0 in the grid sense: every component >= 0 and k != 0."""
    return all(a >= 0 for a in k) and any(a != 0 for a in k)


def min_elements(E: Iterable[Sequence[int]]) -> frozenset:
    """Minimal elements of a finite set under the componentwise order."""
    items = sorted({tuple(e) for e in E}, key=sum)
    _check_dims(*items)
    out: list[tuple] = []
    # sorting by |k| means nothing later can lie strictly below an earlier one
    for e in items:
        if not any(leq(m, e) for m in out):
            out.append(e)
    return frozenset(out)


def dominates(E: Iterable[Sequence[int]], F: Iterable[Sequence[int]]) -> bool:
    """True iff every k in F has some p in E with p < k (strictly)."""
    E = [tuple(e) for e in E]
    F = [tuple(f) for f in F]
    _check_dims(*E, *F)
    return all(any(lt(p, k) for p in E) for k in F)


def check_domination_chain(chain: Sequence[Iterable[Sequence[int]]]) -> bool:
    sets = [[tuple(e) for e in s] for s in chain]
    _check_dims(*(k for s in sets for k in s))
    return all(dominates(a, b) for a, b in zip(sets, sets[1:]))


def in_upset(k: Sequence[int], gens: Iterable[Sequence[int]]) -> bool:
    """Whether k lies in the upward closure of ``gens``."""
    return any(leq(g, k) for g in gens)
