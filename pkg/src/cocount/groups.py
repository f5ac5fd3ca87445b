"""Finite abelian group plumbing: carriers, subgroups, duality, divisions.

Groups are presented as products of cyclic factors with explicit moduli.
The moduli list is whatever presentation the caller needs (local cohomology
carriers mix coprime factors, so no divisor-chain normal form is imposed);
``invariant_factors`` exposes the canonical chain when it is wanted.
Everything here is small and immutable; membership and annihilators go
through plain closure enumeration.
"""

from __future__ import annotations

from functools import reduce, lru_cache
from math import gcd
from typing import Iterable, Iterator, Sequence

import sympy

from .cyclotomic import UnitRootExponent

Vector = tuple[int, ...]


class FiniteAbelianGroup:
    """Product of cyclic groups Z/d_i; elements are int vectors mod d_i."""

    __slots__ = ("moduli", "order")

    def __init__(self, moduli: Sequence[int]):
        if any(d < 1 for d in moduli):
            raise ValueError("cyclic factor moduli must be positive")
        self.moduli = tuple(int(d) for d in moduli)
        self.order = reduce(lambda a, b: a * b, self.moduli, 1)

    @property
    def rank(self) -> int:
        return len(self.moduli)

    @property
    def zero(self) -> Vector:
        return (0,) * len(self.moduli)

    @property
    def exponent(self) -> int:
        return reduce(lambda a, b: a * b // gcd(a, b), self.moduli, 1)

    def invariant_factors(self) -> tuple[int, ...]:
        """Divisor-chain form d_1 | d_2 | ... of the same group."""
        factors = [d for d in self.moduli if d > 1]
        primary: dict[int, list[int]] = {}
        for d in factors:
            for p, e in sympy.factorint(d).items():
                primary.setdefault(p, []).append(p**e)
        for parts in primary.values():
            parts.sort(reverse=True)
        width = max((len(v) for v in primary.values()), default=0)
        chain = []
        for i in range(width):
            q = 1
            for parts in primary.values():
                if i < len(parts):
                    q *= parts[i]
            chain.append(q)
        return tuple(reversed(chain))

    def reduce_vec(self, vec: Sequence[int]) -> Vector:
        self._check_shape(vec)
        return tuple(v % d for v, d in zip(vec, self.moduli))

    def add(self, a: Sequence[int], b: Sequence[int]) -> Vector:
        self._check_shape(a)
        self._check_shape(b)
        return tuple((x + y) % d for x, y, d in zip(a, b, self.moduli))

    def neg(self, a: Sequence[int]) -> Vector:
        return tuple((-x) % d for x, d in zip(a, self.moduli))

    def scale(self, k: int, a: Sequence[int]) -> Vector:
        return tuple((k * x) % d for x, d in zip(a, self.moduli))

    def element_order(self, a: Sequence[int]) -> int:
        order = 1
        for x, d in zip(a, self.moduli):
            if x % d:
                o = d // gcd(d, x)
                order = order * o // gcd(order, o)
        return order

    def elements(self, cap: int = 10**6) -> Iterator[Vector]:
        if self.order > cap:
            raise ValueError(f"group of order {self.order} too large to iterate")
        def rec(i: int, prefix: tuple[int, ...]):
            if i == len(self.moduli):
                yield prefix
                return
            for v in range(self.moduli[i]):
                yield from rec(i + 1, prefix + (v,))
        return rec(0, ())

    def _check_shape(self, vec: Sequence[int]) -> None:
        if len(vec) != len(self.moduli):
            raise ValueError(
                f"vector of length {len(vec)} does not match moduli {self.moduli}"
            )

    def __eq__(self, other):
        return isinstance(other, FiniteAbelianGroup) and self.moduli == other.moduli

    def __hash__(self):
        return hash(self.moduli)

    def __repr__(self):
        return f"FiniteAbelianGroup{self.moduli}"


def subgroup_closure(G: FiniteAbelianGroup, generators: Iterable[Sequence[int]]) -> frozenset[Vector]:
    """All elements of the subgroup generated by ``generators``."""
    gens = [G.reduce_vec(g) for g in generators]
    seen = {G.zero}
    frontier = [G.zero]
    while frontier:
        cur = frontier.pop()
        for g in gens:
            nxt = G.add(cur, g)
            if nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
    return frozenset(seen)


def character_pairing(chi: Sequence[int], x: Sequence[int], G: FiniteAbelianGroup) -> UnitRootExponent:
    """Duality pairing sum_i chi_i x_i / d_i in Q/Z; bilinear and perfect."""
    G._check_shape(chi)
    G._check_shape(x)
    m = G.exponent
    total = 0
    for c, v, d in zip(chi, x, G.moduli):
        if d > 1:
            total += c * v * (m // d)
    return UnitRootExponent(total, m)


def annihilator(G: FiniteAbelianGroup, generators: Iterable[Sequence[int]]) -> frozenset[Vector]:
    """Characters (vectors in the dual, same moduli) killing all generators."""
    gens = [G.reduce_vec(g) for g in generators]
    out = []
    for chi in G.elements():
        if all(character_pairing(chi, h, G).is_zero() for h in gens):
            out.append(chi)
    return frozenset(out)


@lru_cache(maxsize=None)
def divisions(n: int) -> tuple[frozenset[int], ...]:
    """Partition of Z/n into orbits under multiplication by units of Z/n.

    Two residues are in the same block exactly when they generate the same
    subgroup of Z/n.
    """
    if n < 1:
        raise ValueError("n must be positive")
    units = [u for u in range(1, n + 1) if gcd(u, n) == 1] or [1]
    remaining = set(range(n))
    blocks = []
    while remaining:
        x = min(remaining)
        orbit = frozenset((u * x) % n for u in units) if n > 1 else frozenset({0})
        blocks.append(orbit)
        remaining -= orbit
    return tuple(blocks)


def mobius_divisor_lattice(n: int) -> dict[int, int]:
    """Map d | n -> mu(n/d), the inversion weights for surjection counts.

    With N(d) = number of classes whose image lies in the order-d subgroup,
    sum_d mu(n/d) N(d) counts the classes with image exactly Z/n.
    """
    if n < 1:
        raise ValueError("n must be positive")
    return {d: int(sympy.mobius(n // d)) for d in sympy.divisors(n)}
