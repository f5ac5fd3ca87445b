"""Admissible orderings: ideal-valued invariants read off local coordinates.

An ordering assigns to each local class a nonnegative exponent nu_p; the
global weight of a class is the product of p^(nu_p) over its ramified places
(plus any declared exceptional places).  Built-in kinds:

* ``disc``    -- regular-representation discriminant: the sum of Artin
                 conductor exponents of the n-1 nontrivial multiples of the
                 class (conductor-discriminant formula for Z/n).
* ``radical`` -- 1 on every ramified class, 0 otherwise.
* ``custom``  -- an explicit Frobenian table keyed by congruence class of p
                 and the inertia coordinates (tame, wild) of the class.

Admissibility contract (checked on construction for custom tables): the
exponent depends only on (p mod modulus, local coordinates), vanishes on
unramified classes outside the exceptional places, and is >= 1 on ramified
classes there.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from .localfields import OO, LocalClass

DISC = "disc"
RADICAL = "radical"
CUSTOM = "custom"


class OrderingError(ValueError):
    pass


@dataclass(frozen=True)
class OrderingSpec:
    """One admissible ordering; immutable and hashable."""

    kind: str = DISC
    n: int = 0  # coefficient order the custom table was written for (0 = any)
    modulus: int = 1
    # (congruence class mod modulus, tame coord, wild coord) -> exponent
    table: tuple = ()
    # (place, tame coord, wild coord) -> exponent; places listed here form
    # the ordering's exceptional set.  Unramified patterns keep exponent 0
    # (weights stay multiplicative over ramified places).
    exceptional: tuple = ()
    # exponent rule applied at wild/exceptional places lacking a table entry
    wild_fallback: str = DISC

    def __post_init__(self):
        if self.kind not in (DISC, RADICAL, CUSTOM):
            raise OrderingError(f"unknown ordering kind {self.kind!r}")
        for (_v, t, w), e in self.exceptional:
            if (t, w) == (0, 0) and e != 0:
                raise OrderingError("unramified patterns must get exponent 0")
        if self.kind == CUSTOM:
            if self.n < 2:
                raise OrderingError("custom ordering needs its coefficient order")
            if self.modulus % self.n:
                raise OrderingError("custom modulus must be a multiple of n")
            for (c, t, w), e in self.table:
                if gcd(c, self.modulus) != 1:
                    raise OrderingError(f"class {c} not coprime to {self.modulus}")
                if (t, w) == (0, 0):
                    if e != 0:
                        raise OrderingError("unramified classes must get exponent 0")
                elif e < 1:
                    raise OrderingError(
                        f"ramified pattern {(c, t, w)} must get exponent >= 1"
                    )

    @property
    def generic_table(self) -> dict:
        return dict(self.table)

    @property
    def exceptional_places(self) -> frozenset:
        return frozenset(key[0] for key, _ in self.exceptional)

    def label(self) -> str:
        return self.kind


def disc_ordering() -> OrderingSpec:
    return OrderingSpec(kind=DISC)


def radical_ordering() -> OrderingSpec:
    return OrderingSpec(kind=RADICAL)


def custom_ordering(n: int, modulus: int, table: dict, exceptional: dict | None = None,
                    wild_fallback: str = DISC) -> OrderingSpec:
    return OrderingSpec(
        kind=CUSTOM,
        n=n,
        modulus=modulus,
        table=tuple(sorted(table.items())),
        exceptional=tuple(sorted((exceptional or {}).items())),
        wild_fallback=wild_fallback,
    )


def _disc_exponent_from_coords(p: int, n: int, t: int, w: int,
                               tame_mod: int, wild_mod: int) -> int:
    """Sum of conductor exponents of the j-th multiples, j = 1..n-1."""
    total = 0
    for j in range(1, n):
        tj = (j * t) % tame_mod if tame_mod > 1 else 0
        wj = (j * w) % wild_mod if wild_mod > 1 else 0
        if wj:
            order = wild_mod // gcd(wild_mod, wj)
            jexp = _vp(order, p) + (1 if p != 2 else 2)
        elif tj:
            jexp = 1 if p != 2 else 2
        else:
            jexp = 0
        total += jexp
    return total


def _vp(m: int, p: int) -> int:
    e = 0
    while m % p == 0:
        m //= p
        e += 1
    return e


def generic_tame_exponent(ordering: OrderingSpec, n: int, cls: int, t: int,
                          tame_mod: int) -> int:
    """nu at a generic (odd, prime-to-n) place p == cls, for tame coord t."""
    if ordering.kind == RADICAL:
        return 1 if t % tame_mod else 0
    if ordering.kind == DISC:
        return _disc_exponent_from_coords(0, n, t, 0, tame_mod, 1)
    key = (cls % ordering.modulus, t % tame_mod, 0)
    if t % tame_mod == 0:
        return 0
    table = ordering.generic_table
    if key not in table:
        raise OrderingError(f"custom ordering table missing entry for {key}")
    return table[key]


def inv_exponent(f: LocalClass, ordering: OrderingSpec) -> int:
    """Exponent nu_p of the ordering's ideal at the class's place.

    Zero at the infinite place by definition; zero on unramified classes
    outside the ordering's exceptional places.
    """
    if f.place == OO:
        return 0
    p = int(f.place)
    n = f.n
    _, tame_mod, wild_mod = f.group.carrier.moduli
    t, w = f.coords[1], f.coords[2]
    exceptional = dict(ordering.exceptional)
    if (p, t, w) in exceptional:
        return exceptional[(p, t, w)]
    if ordering.kind == RADICAL:
        return 0 if (t % tame_mod == 0 and w % wild_mod == 0) else 1
    if ordering.kind == DISC:
        return _disc_exponent_from_coords(p, n, t, w, tame_mod, wild_mod)
    if wild_mod > 1 or p == 2 or n % p == 0:
        # wild place without an explicit entry: fall back
        fb = OrderingSpec(kind=ordering.wild_fallback)
        return inv_exponent(f, fb)
    return generic_tame_exponent(ordering, n, p, t, tame_mod)


def is_constant_on_divisions(ordering: OrderingSpec, n: int, modulus: int | None = None) -> bool:
    """Diagnostic: does nu depend only on the subgroup the inertia image
    generates?  Nothing in the counting machinery requires this; the
    predicate exists to exhibit orderings that violate it."""
    m = modulus or (ordering.modulus if ordering.kind == CUSTOM else n)
    m = m if m % n == 0 else m * n
    for cls in range(1, m + 1):
        if gcd(cls, m) != 1:
            continue
        d = gcd(n, cls - 1)
        by_subgroup: dict[int, set[int]] = {}
        for t in range(d):
            sub = gcd(n, t * (n // d)) if t else -1
            nu = generic_tame_exponent(ordering, n, cls, t, d)
            by_subgroup.setdefault(sub, set()).add(nu)
        if any(len(vals) > 1 for vals in by_subgroup.values()):
            return False
    return True
