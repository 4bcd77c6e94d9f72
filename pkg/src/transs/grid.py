"""Ratio sets, grid membership and the grid-cap truncation.

Membership ``μ^k = g`` is a linear problem over the exponent lattice: each
monomial maps to the vector of its x-exponent followed by the coefficients
of its exponent series over a common basis of cores.  Integral solutions are
found with an integer column reduction; when the ratios are dependent the
kernel is enumerated inside the box implied by ``k >= base``.
"""

from __future__ import annotations

import itertools
from functools import cmp_to_key
from fractions import Fraction
from math import ceil, floor, lcm
from typing import Iterable, Sequence

from .errors import NotInGrid, NotSmall, ZeroSeries
from .foundations import (
    dominates,
    in_upset,
    is_positive,
    leq,
    mi_add,
    min_elements,
)
from .monomial import ONE, Monomial, chain_core, core_derivative
from .series import Series, decompose_multiplicative


_mono_sort_key = cmp_to_key(lambda a, b: a.cmp(b))


class RatioSet:
    """Finite set of small monomials μ_1 ≻ μ_2 ≻ … ≻ μ_n."""

    __slots__ = ("ratios", "depth", "_lattice", "_basis", "_matrix", "_kernel_rank")

    def __init__(self, ratios: Iterable[Monomial] = ()):
        ratios = list(ratios)
        d = max((m.depth for m in ratios), default=0)
        uniq: list[Monomial] = []
        for m in ratios:
            m = m.lift(d)
            if m.cmp(ONE) >= 0:
                raise NotSmall(f"ratio {m!r} is not ≺ 1")
            if m not in uniq:
                uniq.append(m)
        uniq.sort(key=_mono_sort_key, reverse=True)
        self.ratios = tuple(uniq)
        self.depth = d
        self._lattice = {}
        self._basis = None
        self._matrix = None
        self._kernel_rank = None

    def __len__(self):
        return len(self.ratios)

    def __iter__(self):
        return iter(self.ratios)

    def __getitem__(self, i):
        return self.ratios[i]

    def __eq__(self, other):
        return isinstance(other, RatioSet) and set(self.ratios) == set(other.ratios)

    def __hash__(self):
        return hash(frozenset(self.ratios))

    def __repr__(self):
        return f"RatioSet({list(self.ratios)!r})"

    def union(self, extra: Iterable[Monomial]) -> "RatioSet":
        return RatioSet(list(self.ratios) + list(extra))

    def lifted(self, depth: int) -> "RatioSet":
        return self if depth == self.depth else RatioSet(m.lift(depth) for m in self.ratios)

    def power(self, k: Sequence[int]) -> Monomial:
        out = Monomial.one(self.depth)
        for m, e in zip(self.ratios, k):
            if e:
                out = out * (m ** e)
        return out

    # -- lattice solving ----------------------------------------------
    def _vectors(self, g: Monomial):
        """Integer system (rows, rhs) for μ^k = g, or None if g uses a foreign core."""
        basis = {}
        for m in self.ratios:
            for n, _ in m.exp_terms:
                basis.setdefault(n, len(basis))
        for n, _ in g.exp_terms:
            if n not in basis:
                return None
        dim = 1 + len(basis)
        cols = []
        for m in self.ratios:
            v = [Fraction(0)] * dim
            v[0] = m.xexp
            for n, c in m.exp_terms:
                v[1 + basis[n]] = c
            cols.append(v)
        rhs = [Fraction(0)] * dim
        rhs[0] = g.xexp
        for n, c in g.exp_terms:
            rhs[1 + basis[n]] = c
        rows, ints = [], []
        for r in range(dim):
            entries = [col[r] for col in cols] + [rhs[r]]
            scale = lcm(*(e.denominator for e in entries)) if entries else 1
            rows.append([int(e * scale) for e in entries[:-1]])
            ints.append(int(entries[-1] * scale))
        return rows, ints

    def lattice(self, g: Monomial):
        """(particular solution, kernel basis) of μ^k = g over Z^n, or None."""
        g = g.lift(max(g.depth, self.depth)) if g.depth != self.depth else g
        if g.depth > self.depth:
            return self.lifted(g.depth).lattice(g)
        hit = self._lattice.get(g, False)
        if hit is not False:
            return hit
        res = None
        sysm = self._vectors(g)
        if sysm is not None:
            res = _integer_solve(*sysm, len(self.ratios))
        self._lattice[g] = res
        return res

    @property
    def independent(self) -> bool:
        if self._kernel_rank is None:
            lat = self.lattice(Monomial.one(self.depth))
            self._kernel_rank = len(lat[1])
        return self._kernel_rank == 0

    def representations(self, g: Monomial, base: Sequence[int] | None = None) -> list:
        lat = self.lattice(g)
        if lat is None:
            return []
        k0, kernel = lat
        n = len(self.ratios)
        base = tuple(base) if base is not None else (0,) * n
        if not kernel:
            return [k0] if leq(base, k0) else []
        return _enumerate(k0, kernel, base)

    def in_group(self, g: Monomial) -> bool:
        return self.lattice(g) is not None

    def index(self, g: Monomial) -> tuple:
        """The unique k with μ^k = g (independent ratio sets only)."""
        lat = self.lattice(g)
        if lat is None:
            raise NotInGrid(f"{g!r} is not a product of the ratios")
        if lat[1]:
            raise ValueError("ratio set is dependent; index is ambiguous")
        return lat[0]

    def some_representation(self, g: Monomial) -> tuple:
        lat = self.lattice(g)
        if lat is None:
            raise NotInGrid(f"{g!r} is not a product of the ratios")
        return lat[0]


def _integer_solve(rows: list, rhs: list, n: int):
    """Solve A k = v over the integers by unimodular column reduction."""
    d = len(rows)
    if n == 0:
        return ((), ()) if not any(rhs) else None
    # M holds the columns of A (as rows) augmented with the identity
    M = [[rows[r][i] for r in range(d)] + [int(i == j) for j in range(n)] for i in range(n)]
    pr = 0
    pivots = []
    for col in range(d):
        if pr == n:
            break
        while True:
            nz = [i for i in range(pr, n) if M[i][col]]
            if not nz:
                break
            i0 = min(nz, key=lambda i: abs(M[i][col]))
            M[pr], M[i0] = M[i0], M[pr]
            clean = True
            piv = M[pr][col]
            for i in range(pr + 1, n):
                if M[i][col]:
                    q = M[i][col] // piv
                    M[i] = [a - q * b for a, b in zip(M[i], M[pr])]
                    if M[i][col]:
                        clean = False
            if clean:
                pivots.append(col)
                pr += 1
                break
    rank = pr
    y = []
    resid = list(rhs)
    for i in range(rank):
        col = pivots[i]
        piv = M[i][col]
        if resid[col] % piv:
            return None
        yi = resid[col] // piv
        y.append(yi)
        resid = [a - yi * b for a, b in zip(resid, M[i][:d])]
    if any(resid):
        return None
    k0 = [0] * n
    for i, yi in enumerate(y):
        for j in range(n):
            k0[j] += yi * M[i][d + j]
    kernel = tuple(tuple(M[i][d:]) for i in range(rank, n))
    return tuple(k0), kernel


def _enumerate(k0: tuple, kernel: tuple, base: tuple) -> list:
    """All k = k0 + Σ t_l w_l with k >= base (the region is bounded)."""
    from scipy.optimize import linprog

    L = len(kernel)
    n = len(k0)
    # constraints: -(Σ t_l w_l[i]) <= k0[i] - base[i]
    A_ub = [[-kernel[l][i] for l in range(L)] for i in range(n)]
    b_ub = [k0[i] - base[i] for i in range(n)]
    ranges = []
    for l in range(L):
        c = [0.0] * L
        bounds = []
        for sgn in (1.0, -1.0):
            c[l] = sgn
            res = linprog(c, A_ub=A_ub, b_ub=b_ub, bounds=[(None, None)] * L, method="highs")
            if res.status == 2:
                return []
            if res.status != 0:
                raise ValueError("representation set is unbounded; ratios are not all small")
            bounds.append(sgn * res.fun)
        lo, hi = bounds[0], bounds[1]
        ranges.append(range(ceil(lo - 1e-9), floor(hi + 1e-9) + 1))
    out = []
    for t in itertools.product(*ranges):
        k = tuple(k0[i] + sum(t[l] * kernel[l][i] for l in range(L)) for i in range(n))
        if leq(base, k):
            out.append(k)
    return sorted(out)


# -- functional API -------------------------------------------------------

def _as_ratioset(mu) -> RatioSet:
    return mu if isinstance(mu, RatioSet) else RatioSet(mu)


def mu_representations(g: Monomial, mu, base: Sequence[int] | None = None) -> list:
    return _as_ratioset(mu).representations(g, base)


def is_mu_small(g: Monomial, mu) -> bool:
    mu = _as_ratioset(mu)
    if g.cmp(ONE) >= 0 or not len(mu):
        return False
    return any(is_positive(k) for k in mu.representations(g))


def _support_indices(T: Series, mu: RatioSet) -> list:
    out = []
    for m, _ in T.terms:
        if not mu.in_group(m):
            raise NotInGrid(f"{m!r} is not in the grid generated by the ratios")
        out.append(mu.some_representation(m))
    return out


def smallness_addendum(T: Series, mu) -> RatioSet:
    """Extend μ so that every monomial of the small series T is μ̃-small."""
    mu = _as_ratioset(mu)
    if any(m.cmp(ONE) >= 0 for m, _ in T.terms):
        raise NotSmall("series has a term ≽ 1")
    extra = []
    todo = [m for m, _ in T.terms if not is_mu_small(m, mu)]
    if not todo:
        return mu
    E = _support_indices(T, mu)
    for k in min_elements(E):
        if not is_positive(k):
            extra.append(mu.power(k))
    return mu.union(extra)


def inversion_addendum(A: Series, mu) -> RatioSet:
    mu = _as_ratioset(mu)
    if not A.terms:
        raise ZeroSeries("cannot invert a series without terms")
    _support_indices(A, mu)
    _, _, S = decompose_multiplicative(A)
    if not S.terms:
        return mu
    return smallness_addendum(S, mu)


def heredity_addendum(mu) -> RatioSet:
    """Close μ so the exponent of every ratio is a μ-series."""
    cur = _as_ratioset(mu)
    while True:
        missing = None
        for r in cur:
            for n, _ in r.exp_terms:
                m = n.at_depth(cur.depth)
                if not cur.in_group(m):
                    missing = m
                    break
            if missing is not None:
                break
        if missing is None:
            return cur
        cur = cur.union([missing.inv()])


def derivative_addendum(mu) -> RatioSet:
    cur = heredity_addendum(mu)
    xinv = Monomial.power(-1).lift(cur.depth)
    if not is_mu_small(xinv, cur):
        cur = cur.union([xinv])
    return cur


def mu_dominates(S: Series, T: Series, mu) -> bool:
    """Every monomial of T is μ-small relative to some monomial of S."""
    mu = _as_ratioset(mu)
    ES = _support_indices(S, mu)
    ET = _support_indices(T, mu)
    if not ET:
        return True
    if mu.independent:
        return dominates(ES, ET)
    sm = [m for m, _ in S.terms]
    return all(any(is_mu_small(b / a, mu) for a in sm) for b, _ in T.terms)


# -- grid-cap bound -------------------------------------------------------

class GridCap:
    """Bound "every discarded term is μ^k with k in Up(gens)".

    The ratio set must be independent so that each monomial has one index.
    """

    __slots__ = ("ratios", "gens")

    def __init__(self, ratios, gens: Iterable[Sequence[int]]):
        ratios = _as_ratioset(ratios)
        if not ratios.independent:
            raise ValueError("a grid cap needs independent ratios")
        self.ratios = ratios
        self.gens = min_elements(gens)
        if any(len(g) != len(ratios) for g in self.gens):
            raise ValueError("generator dimension does not match the ratio set")

    @classmethod
    def box(cls, ratios, cap: Sequence[int]) -> "GridCap":
        """Keep exactly the indices 0 <= k <= cap (for base-0 grids)."""
        n = len(cap)
        return cls(ratios, [tuple(c + 1 if i == j else 0 for j in range(n)) for i, c in enumerate(cap)])

    @property
    def depth(self) -> int:
        return self.ratios.depth

    def lifted(self, depth: int) -> "GridCap":
        return self if depth == self.depth else GridCap(self.ratios.lifted(depth), self.gens)

    def index(self, m: Monomial) -> tuple:
        return self.ratios.index(m)

    def absorbs(self, m: Monomial) -> bool:
        return in_upset(self.index(m), self.gens)

    def upper_monomials(self) -> tuple:
        return tuple(self.ratios.power(e) for e in self.gens)

    def shifted(self, D: Iterable[Sequence[int]]) -> "GridCap":
        D = list(D)
        return GridCap(self.ratios, [mi_add(e, s) for e in self.gens for s in D])

    def times(self, m: Monomial) -> "GridCap":
        return self.shifted([self.index(m)])

    def coarser(self, other):
        if other is None:
            return self
        if not isinstance(other, GridCap) or other.ratios != self.ratios:
            raise TypeError("grid caps over different ratio sets do not combine")
        return GridCap(self.ratios, set(self.gens) | set(other.gens))

    def within(self, other) -> bool:
        if other is None:
            return False
        if not isinstance(other, GridCap) or other.ratios != self.ratios:
            raise TypeError("grid caps over different ratio sets do not compare")
        return all(in_upset(e, other.gens) for e in self.gens)

    def floor(self, S: Series) -> frozenset:
        """Min of the indices S may occupy (stored or hidden)."""
        idx = [self.index(m) for m, _ in S.terms]
        if isinstance(S.bound, GridCap):
            idx.extend(S.bound.gens)
        return min_elements(idx)

    @staticmethod
    def product(A: Series, B: Series) -> "GridCap | None":
        cap = A.bound if isinstance(A.bound, GridCap) else B.bound
        gens = set()
        for X, Y in ((A, B), (B, A)):
            if isinstance(X.bound, GridCap):
                for e in X.bound.gens:
                    for f in cap.floor(Y):
                        gens.add(mi_add(e, f))
        return GridCap(cap.ratios, gens) if gens else None

    def derivative_shifts(self) -> frozenset:
        """Min of the indices of every dlog μ_i (needs them inside the grid)."""
        out = []
        d = self.depth
        chain = chain_core(d) if d else None
        for r in self.ratios:
            for p, _ in core_derivative(r.core):
                q = p / r.core
                if chain is not None:
                    q = q * chain
                out.append(self.index(q.at_depth(d)))
        return min_elements(out) if out else frozenset({(0,) * len(self.ratios)})

    def derivative(self):
        return self.shifted(self.derivative_shifts())

    def __eq__(self, other):
        return isinstance(other, GridCap) and self.ratios == other.ratios and self.gens == other.gens

    def __hash__(self):
        return hash((self.ratios, self.gens))

    def __repr__(self):
        return f"GridCap({list(self.ratios)!r}, {sorted(self.gens)})"


def cap_series(T: Series, ratios, cap: Sequence[int]) -> Series:
    """Attach the box cap k <= ``cap`` to a series over ``ratios``."""
    return T.with_bound(GridCap.box(ratios, cap))


def grid_coefficients(T: Series, ratios) -> dict:
    """Map index -> coefficient for a series whose support lies in the grid."""
    mu = _as_ratioset(ratios)
    return {mu.index(m): c for m, c in T.terms}


def known_region_contains(bound, k: Sequence[int]) -> bool:
    """Whether index k is outside the discarded region of a grid cap."""
    if bound is None:
        return True
    return not in_upset(tuple(k), bound.gens)


__all__ = [
    "RatioSet",
    "GridCap",
    "mu_representations",
    "is_mu_small",
    "smallness_addendum",
    "inversion_addendum",
    "heredity_addendum",
    "derivative_addendum",
    "mu_dominates",
    "cap_series",
    "grid_coefficients",
    "known_region_contains",
]
