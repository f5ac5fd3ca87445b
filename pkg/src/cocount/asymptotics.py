"""Counting functions N(X), power-log fits, and surjectivity proportions.

Counts are exact; fitting is the only place floating point enters.  The
fitted model is N(X) = c * X^alpha * (log X)^beta, so the log-power
prediction for a family with invariants (a, b) is alpha = 1/a and
beta = b - 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import sympy

from .characters import enumerate_characters, is_surjective, surjective_count
from .families import (
    FULL,
    ConditionFamily,
    inertia_generated_subgroup,
    minimal_inertia_subgroup,
)
from .orderings import DISC, RADICAL, OrderingSpec
from .sieves import (
    d1mod4_qualifying_counts,
    fundamental_discriminant_counts,
    multiplicative_radical_counts,
)


@dataclass(frozen=True)
class CountSample:
    """Grid of exact counts N(X) = #{classes of weight < X}."""

    grid: tuple
    counts: tuple
    n: int
    family: str
    ordering: str

    def __post_init__(self):
        if list(self.grid) != sorted(self.grid):
            raise ValueError("grid must be ascending")
        if any(b < a for a, b in zip(self.counts, self.counts[1:])):
            raise ValueError("counts must be nondecreasing")

    def render_csv(self) -> str:
        lines = ["X,N"]
        lines += [f"{x},{c}" for x, c in zip(self.grid, self.counts)]
        return "\n".join(lines)


def geometric_grid(x_min: int, x_max: int, points: int) -> tuple:
    """Ascending integer grid, geometrically spaced, deduplicated."""
    if points < 2 or x_min < 2 or x_max <= x_min:
        raise ValueError("need x_max > x_min >= 2 and at least two points")
    ratio = (x_max / x_min) ** (1 / (points - 1))
    out = []
    for i in range(points):
        v = int(round(x_min * ratio**i))
        if not out or v > out[-1]:
            out.append(v)
    out[-1] = x_max
    return tuple(out)


def _is_full(family: ConditionFamily) -> bool:
    return all(spec == FULL for _, spec in family.exceptional) and all(
        len(pairs) == family.n * max(math.gcd(family.n, c - 1), 1)
        for c, pairs in family.generic.class_sets
    )


def counting_function(family: ConditionFamily, ordering: OrderingSpec, grid,
                      force_enumeration: bool = False) -> CountSample:
    """Exact N(X) on the grid.

    Sieve-backed closed forms cover the heavily used configurations (full
    quadratic count, the quadratic uniformizer example, the full radical
    n = 4 count); everything else streams through the enumerator.  Tests
    pin the fast paths against forced enumeration.
    """
    grid = tuple(int(x) for x in grid)
    n = family.n
    if not force_enumeration:
        if n == 2 and ordering.kind == DISC and _is_full(family):
            counts = [c + (1 if x > 1 else 0) for c, x in
                      zip(fundamental_discriminant_counts(list(grid)), grid)]
            return CountSample(grid, tuple(counts), n, family.name, ordering.label())
        if n == 2 and ordering.kind == DISC and family.name == "example-d1mod4":
            counts = [c + (1 if x > 1 else 0) for c, x in
                      zip(d1mod4_qualifying_counts(list(grid)), grid)]
            return CountSample(grid, tuple(counts), n, family.name, ordering.label())
        if n == 4 and ordering.kind == RADICAL and _is_full(family):
            totals, _ = multiplicative_radical_counts(4, list(grid))
            return CountSample(grid, tuple(totals), n, family.name, ordering.label())
    counts = [0] * len(grid)
    top = max(grid)
    for chi in enumerate_characters(n, top, ordering, family, sort=False):
        for i, x in enumerate(grid):
            if chi.weight < x:
                counts[i] += 1
    return CountSample(grid, tuple(counts), n, family.name, ordering.label())


@dataclass(frozen=True)
class FitResult:
    alpha: float
    beta: float
    constant: float
    residual: float

    def render(self) -> str:
        return "\n".join(
            [
                f"alpha={self.alpha:.6f}",
                f"beta={self.beta:.6f}",
                f"constant={self.constant:.6g}",
                f"residual={self.residual:.3e}",
            ]
        )


def fit_power_log(sample: CountSample, top_fraction: float = 0.6) -> FitResult:
    """Least-squares fit of log N against (log X, log log X).

    Only the top fraction of the grid by X enters, suppressing lower-order
    terms; beta is poorly conditioned at desk scale, so tolerance bands on
    it should stay wide.
    """
    xs = [x for x, c in zip(sample.grid, sample.counts) if c > 0]
    cs = [c for c in sample.counts if c > 0]
    if len(xs) < 4:
        raise ValueError("not enough nonzero grid points to fit")
    if min(cs) == max(cs):
        raise ValueError("degenerate sample: counts are constant")
    k = max(4, int(round(len(xs) * top_fraction)))
    xs, cs = xs[-k:], cs[-k:]
    rows = np.array([[1.0, math.log(x), math.log(math.log(x))] for x in xs])
    rhs = np.array([math.log(c) for c in cs])
    coef, *_ = np.linalg.lstsq(rows, rhs, rcond=None)
    fitted = rows @ coef
    residual = float(np.sqrt(np.mean((fitted - rhs) ** 2)))
    return FitResult(float(coef[1]), float(coef[2]), math.exp(float(coef[0])), residual)


PREDICT_ONE = "limit-one"
PREDICT_POSITIVE = "limit-positive"
PREDICT_CONVERGES = "limit-exists"


def predicted_limit_class(family: ConditionFamily, ordering: OrderingSpec) -> str:
    """Surjectivity-proportion prediction from the inertia subgroups."""
    if minimal_inertia_subgroup(family, ordering) == family.n:
        return PREDICT_ONE
    if inertia_generated_subgroup(family) == family.n:
        return PREDICT_POSITIVE
    return PREDICT_CONVERGES


def surjective_proportion(family: ConditionFamily, ordering: OrderingSpec, x,
                          force_enumeration: bool = False):
    """(proportion of surjective classes at X, predicted limit class)."""
    x = int(x)
    n = family.n
    if (
        not force_enumeration
        and n == 4
        and ordering.kind == RADICAL
        and _is_full(family)
    ):
        totals, subs = multiplicative_radical_counts(4, [x])
        ratio = Fraction(totals[0] - subs[0], totals[0])
        return ratio, predicted_limit_class(family, ordering)
    total = 0
    surj = 0
    for chi in enumerate_characters(n, x, ordering, family, sort=False):
        total += 1
        if is_surjective(chi):
            surj += 1
    if total == 0:
        raise ValueError("no classes below the bound")
    return Fraction(surj, total), predicted_limit_class(family, ordering)


def surjective_ratio_grid(family: ConditionFamily, ordering: OrderingSpec, grid,
                          force_enumeration: bool = False):
    """Per grid point: (direct surjective ratio, Moebius-inverted ratio).

    The direct ratio filters by image; the inverted one passes the per-
    divisor counts through Moebius inversion on the divisor lattice.  The
    two must agree exactly.
    """
    grid = tuple(int(x) for x in grid)
    n = family.n
    if (
        not force_enumeration
        and n == 4
        and ordering.kind == RADICAL
        and _is_full(family)
    ):
        totals, subs = multiplicative_radical_counts(4, list(grid))
        out = []
        for tot, sub in zip(totals, subs):
            counts = {1: 1 if tot else 0, 2: sub, 4: tot}
            direct = Fraction(tot - sub, tot)
            inverted = Fraction(surjective_count(counts, 4), tot)
            out.append((direct, inverted))
        return out
    divisors = list(sympy.divisors(n))
    per_divisor = [{d: 0 for d in divisors} for _ in grid]
    totals = [0] * len(grid)
    surj = [0] * len(grid)
    for chi in enumerate_characters(n, max(grid), ordering, family, sort=False):
        order = chi.order()
        s = is_surjective(chi)
        for i, x in enumerate(grid):
            if chi.weight < x:
                totals[i] += 1
                if s:
                    surj[i] += 1
                for d in divisors:
                    if d % order == 0:
                        per_divisor[i][d] += 1
    out = []
    for i in range(len(grid)):
        if totals[i] == 0:
            out.append((Fraction(0), Fraction(0)))
            continue
        direct = Fraction(surj[i], totals[i])
        inverted = Fraction(surjective_count(per_divisor[i], n), totals[i])
        out.append((direct, inverted))
    return out
