"""Vectorized sieve utilities shared by enumeration, oracles and counts."""

from __future__ import annotations

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=4)
def primes_up_to(limit: int) -> np.ndarray:
    """Primes <= limit, ascending (int64)."""
    limit = int(limit)
    if limit < 2:
        return np.array([], dtype=np.int64)
    sieve = np.ones(limit + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, int(limit**0.5) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.nonzero(sieve)[0].astype(np.int64)


def squarefree_mask(limit: int) -> np.ndarray:
    """Boolean array: index m is True iff m is squarefree (index 0 False)."""
    mask = np.ones(limit + 1, dtype=bool)
    mask[0] = False
    for p in primes_up_to(int(limit**0.5)):
        mask[p * p :: p * p] = False
    return mask


def fundamental_discriminant_counts(grid: list[int]) -> list[int]:
    """Count of fundamental discriminants with |d| < X for each X in grid.

    Both signs are counted; d = 1 (the trivial class) is not.  Per absolute
    value: one discriminant at odd squarefree |d| >= 3, one at |d| = 4m with
    m odd squarefree, and two at |d| = 8m with m odd squarefree (both signs
    occur there).
    """
    top = max(grid)
    sf = squarefree_mask(top)
    idx = np.arange(top + 1)
    odd_sf = sf & (idx % 2 == 1)
    weights = np.zeros(top + 1, dtype=np.int64)
    weights[odd_sf] = 1
    weights[1] = 0
    m4 = np.nonzero(odd_sf[: top // 4 + 1])[0]
    weights[4 * m4] += 1
    m8 = np.nonzero(odd_sf[: top // 8 + 1])[0]
    weights[8 * m8] += 2
    counts = np.cumsum(weights)
    return [int(counts[x - 1]) for x in grid]


def d1mod4_qualifying_counts(grid: list[int]) -> list[int]:
    """Sieve oracle for the quadratic family ramified only through sqrt(p).

    Counts squarefree odd D < X (with the sign convention D = 1 mod 4 on the
    signed discriminant) such that for every p | D, (D/p) is a square modulo
    p.  The trivial class is not counted.
    """
    top = max(grid)
    spf = smallest_prime_factor(top)
    sf = squarefree_mask(top)
    out = np.zeros(len(grid), dtype=np.int64)
    grid_arr = sorted((x, i) for i, x in enumerate(grid))
    gi = 0
    count = 0
    for m in range(3, top, 2):
        while gi < len(grid_arr) and grid_arr[gi][0] <= m:
            out[grid_arr[gi][1]] = count
            gi += 1
        if not sf[m]:
            continue
        d = m if m % 4 == 1 else -m
        good = True
        mm = m
        while mm > 1:
            p = int(spf[mm])
            mm //= p
            r = (d // p) % p
            if r and pow(r, (p - 1) // 2, p) != 1:
                good = False
                break
        if good:
            count += 1
    while gi < len(grid_arr):
        out[grid_arr[gi][1]] = count
        gi += 1
    return [int(x) for x in out]


@lru_cache(maxsize=2)
def smallest_prime_factor(limit: int) -> np.ndarray:
    """spf[m] = least prime factor of m (spf[1] = 1)."""
    limit = int(limit)
    spf = np.zeros(limit + 1, dtype=np.int32)
    for p in range(2, int(limit**0.5) + 1):
        if spf[p] == 0:
            sl = spf[p * p :: p]
            sl[sl == 0] = p
    untouched = spf == 0
    spf[untouched] = np.arange(limit + 1)[untouched]
    spf[0] = 0
    spf[1] = 1
    return spf


def multiplicative_radical_counts(n: int, grid: list[int]) -> tuple[list[int], list[int]]:
    """For the full family under the radical ordering: per grid point X,
    (total classes of weight < X, classes with image inside the index-2
    subgroup).

    n = 4 shape: a class is an odd squarefree tame conductor m carrying
    gcd(4, p-1) - 1 primitive value choices per prime, optionally times one
    of the 7 primitive 2-adic components (weight contribution 2); 3 of those
    components have order 2.  Only n = 4 is supported; the generic
    enumerator covers everything else.
    """
    if n != 4:
        raise ValueError("fast path implemented for n = 4 only")
    top = max(grid) - 1
    vals = np.ones(top + 1, dtype=np.int64)
    vals[0] = 0
    for p in primes_up_to(top):
        p = int(p)
        if p == 2:
            vals[p::p] = 0
            continue
        if p % 4 == 1:
            vals[p::p] *= 3
        if p * p <= top:
            vals[p * p :: p * p] = 0
    vals[1] = 1
    order2 = (vals > 0).astype(np.int64)
    order2[0] = 0
    cum_total = np.cumsum(vals)
    cum_two = np.cumsum(order2)
    totals = []
    subs = []
    for x in grid:
        odd_total = int(cum_total[x - 1])
        odd_two = int(cum_two[x - 1])
        # components at 2 (weight factor 2): 7 primitive choices, 3 of order 2
        half = (x + 1) // 2  # weight 2m < x  <=>  m <= ceil(x/2) - 1
        even_total = 7 * int(cum_total[half - 1]) if half >= 1 else 0
        even_two = 3 * int(cum_two[half - 1]) if half >= 1 else 0
        totals.append(odd_total + even_total)
        subs.append(odd_two + even_two)
    return totals, subs
