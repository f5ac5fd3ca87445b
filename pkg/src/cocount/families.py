"""Frobenian families of local conditions and their counting invariants.

A family fixes, at every place of Q, a subset of H^1(Q_p, Z/n) that global
classes must restrict into.  Away from a finite irregular set the subset is
given by a congruence rule: for p in a fixed class mod M the allowed classes
are a fixed set of (frobenius, tame) coordinate pairs.  The irregular set
always carries 2, the infinite place and the primes dividing n; conditions
there are explicit subsets.

The growth invariants live here too: the minimal generic ramified exponent
(``a_invariant``), the Chebotarev average of minimal-slice densities
(``b_invariant``), and the subgroup of Z/n generated by minimal-slice
inertia (``minimal_inertia_subgroup``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd

import sympy

from .localfields import (
    OO,
    SIDE_CHARACTER,
    LocalClass,
    Place,
    is_finite,
    local_group,
    place_key,
)
from .orderings import OrderingSpec, generic_tame_exponent, inv_exponent

PERIODIC = "periodic-eligible"
NONPERIODIC = "nonperiodic-eligible"
BOTH = "both"
NEITHER = "neither"

FULL = "full"
UNRAMIFIED = "unramified"
ZERO = "zero"


class FamilyError(ValueError):
    pass


@dataclass(frozen=True)
class FrobenianRule:
    """Generic local condition: congruence class of p -> allowed (fr, t)."""

    n: int
    modulus: int
    class_sets: tuple  # tuple of (class c, frozenset of (fr, t) pairs)

    def __post_init__(self):
        if self.modulus % self.n:
            raise FamilyError("rule modulus must be a multiple of n")
        classes = dict(self.class_sets)
        for c in range(1, self.modulus + 1):
            if gcd(c, self.modulus) == 1 and c % self.modulus not in classes:
                raise FamilyError(f"rule misses congruence class {c} mod {self.modulus}")
        for c, pairs in classes.items():
            d = gcd(self.n, c - 1)
            for fr, t in pairs:
                if not (0 <= fr < self.n and 0 <= t < max(d, 1)):
                    raise FamilyError(
                        f"pair {(fr, t)} out of range for class {c} (tame modulus {d})"
                    )

    @property
    def sets(self) -> dict:
        return dict(self.class_sets)

    def tame_modulus(self, c: int) -> int:
        return gcd(self.n, c - 1)

    def set_for_class(self, c: int) -> frozenset:
        return self.sets[c % self.modulus]


def _pairs_full(n: int, c: int) -> frozenset:
    d = gcd(n, c - 1)
    return frozenset((fr, t) for fr in range(n) for t in range(max(d, 1)))


def _pairs_unramified(n: int) -> frozenset:
    return frozenset((fr, 0) for fr in range(n))


def full_rule(n: int, modulus: int | None = None) -> FrobenianRule:
    m = modulus or n
    sets = tuple(
        (c, _pairs_full(n, c)) for c in range(1, m + 1) if gcd(c, m) == 1
    )
    return FrobenianRule(n, m, sets)


def unramified_rule(n: int, modulus: int | None = None) -> FrobenianRule:
    m = modulus or n
    sets = tuple(
        (c, _pairs_unramified(n)) for c in range(1, m + 1) if gcd(c, m) == 1
    )
    return FrobenianRule(n, m, sets)


def ramified_quadratic_uniformizer_rule() -> FrobenianRule:
    """n=2 rule allowing, besides unramified classes, only the class of
    Q_p(sqrt(p)): frobenius coordinate 0 for p = 1 mod 4 and 1 for p = 3
    mod 4 (the value of the quadratic symbol of -1)."""
    sets = (
        (1, frozenset({(0, 0), (1, 0), (0, 1)})),
        (3, frozenset({(0, 0), (1, 0), (1, 1)})),
    )
    return FrobenianRule(2, 4, sets)


@dataclass(frozen=True)
class ConditionFamily:
    """Local conditions L = (L_p): a generic rule plus explicit exceptions."""

    n: int
    generic: FrobenianRule
    exceptional: tuple  # tuple of (place, subset spec)
    name: str = field(default="", compare=False)

    def __post_init__(self):
        required = {2, OO} | {int(p) for p in sympy.primefactors(self.n)}
        table = dict(self.exceptional)
        missing = [v for v in required if v not in table]
        if missing:
            raise FamilyError(f"exceptional table must cover places {sorted(missing, key=place_key)}")
        for v, spec in table.items():
            self._resolve(v, spec)  # validates

    # -- instantiation ---------------------------------------------------
    @property
    def irregular(self) -> frozenset:
        return frozenset(v for v, _ in self.exceptional)

    @property
    def irregular_finite(self) -> tuple:
        return tuple(sorted((v for v in self.irregular if is_finite(v))))

    def _resolve(self, v: Place, spec) -> frozenset:
        G = local_group(v, self.n, SIDE_CHARACTER)
        if spec == FULL:
            return frozenset(x for x in G.carrier.elements())
        if spec == UNRAMIFIED:
            if v == OO:
                return frozenset({G.carrier.zero})
            return frozenset((fr, 0, 0) for fr in range(self.n))
        if spec == ZERO:
            return frozenset({G.carrier.zero})
        out = frozenset(G.carrier.reduce_vec(tuple(x)) for x in spec)
        if not out:
            raise FamilyError(f"empty local condition at {v}")
        return out

    def instantiate(self, v: Place) -> frozenset:
        """The concrete allowed subset of H^1(Q_v, Z/n) in coordinates."""
        table = dict(self.exceptional)
        if v in table:
            return self._resolve(v, table[v])
        if v == OO or not is_finite(v):
            raise FamilyError("infinite place must be in the exceptional table")
        p = int(v)
        if self.n % p == 0 or p == 2:
            raise FamilyError(f"place {p} divides n; must be tabulated explicitly")
        pairs = self.generic.set_for_class(p % self.generic.modulus)
        return frozenset((fr, t, 0) for fr, t in pairs)

    def local_elements(self, v: Place) -> list[LocalClass]:
        G = local_group(v, self.n, SIDE_CHARACTER)
        return [G.element(x) for x in sorted(self.instantiate(v))]

    def contains_zero_everywhere(self) -> bool:
        for _, pairs in self.generic.class_sets:
            if (0, 0) not in pairs:
                return False
        return all(
            local_group(v, self.n, SIDE_CHARACTER).carrier.zero in self._resolve(v, spec)
            for v, spec in self.exceptional
        )

    # -- structure of the generic rule ------------------------------------
    def generic_profile(self, modulus: int) -> dict:
        """Per congruence class mod ``modulus``: {tame t: allowed fr set or None}.

        None means every frobenius coordinate is allowed (saturated), which
        lets enumeration skip cross-component evaluation.
        """
        if modulus % self.generic.modulus:
            raise FamilyError("profile modulus must refine the rule modulus")
        out = {}
        allfr = frozenset(range(self.n))
        for c in range(1, modulus + 1):
            if gcd(c, modulus) != 1:
                continue
            pairs = self.generic.set_for_class(c % self.generic.modulus)
            by_t: dict[int, set] = {}
            for fr, t in pairs:
                by_t.setdefault(t, set()).add(fr)
            out[c] = {
                t: (None if frozenset(frs) == allfr else frozenset(frs))
                for t, frs in by_t.items()
            }
        return out

    def generic_contains_unramified(self) -> bool:
        allfr = frozenset(range(self.n))
        for _, pairs in self.generic.class_sets:
            if frozenset(fr for fr, t in pairs if t == 0) != allfr:
                return False
        return True


# -- construction helpers --------------------------------------------------

def _base_exceptional(n: int, default: str, at_infinity: str = FULL) -> dict:
    table: dict[Place, object] = {2: default, OO: at_infinity}
    for p in sympy.primefactors(n):
        table[int(p)] = default
    return table


def full_family(n: int) -> ConditionFamily:
    return ConditionFamily(
        n, full_rule(n), tuple(sorted(_base_exceptional(n, FULL).items(), key=lambda kv: place_key(kv[0]))),
        name=f"full-{n}",
    )


def unramified_family(n: int) -> ConditionFamily:
    return ConditionFamily(
        n,
        unramified_rule(n),
        tuple(sorted(_base_exceptional(n, UNRAMIFIED).items(), key=lambda kv: place_key(kv[0]))),
        name=f"unramified-{n}",
    )


def example_d1mod4_family() -> ConditionFamily:
    """Quadratic classes unramified at 2, free at infinity, and at every odd
    p allowed to ramify only through Q_p(sqrt(p))."""
    table = ((2, UNRAMIFIED), (OO, FULL))
    return ConditionFamily(2, ramified_quadratic_uniformizer_rule(), table, name="example-d1mod4")


def box_family(n: int, conditions: dict, generic: str = UNRAMIFIED, name: str = "") -> ConditionFamily:
    """Family equal to ``generic`` away from the given places, overridden by
    explicit specs there.  Places 2, oo, p | n are always tabulated."""
    rule = unramified_rule(n) if generic == UNRAMIFIED else full_rule(n)
    table = _base_exceptional(n, generic if generic in (FULL, UNRAMIFIED) else UNRAMIFIED)
    table.update(conditions)
    items = tuple(sorted(table.items(), key=lambda kv: place_key(kv[0])))
    return ConditionFamily(n, rule, items, name=name or f"box-{n}")


# -- membership and classification ----------------------------------------

def membership(f_p: LocalClass, family: ConditionFamily) -> bool:
    if f_p.n != family.n:
        raise FamilyError("coefficient order mismatch")
    return f_p.coords in family.instantiate(f_p.place)


def classify_family(family: ConditionFamily) -> str:
    """Labels per the two eligibility regimes, checking the generic rule.

    periodic: every generic set is a union of unramified-translation cosets
    containing the identity coset; nonperiodic: every generic set contains
    the unramified subgroup.  Finitely many exceptional places carry no
    constraint.
    """
    n = family.n
    allfr = frozenset(range(n))
    periodic = True
    nonperiodic = True
    contains_zero = True
    for _, pairs in family.generic.class_sets:
        by_t: dict[int, set] = {}
        for fr, t in pairs:
            by_t.setdefault(t, set()).add(fr)
        if (0, 0) not in pairs:
            contains_zero = False
        ur_sat = frozenset(by_t.get(0, set())) == allfr
        if not ur_sat:
            nonperiodic = False
        if not all(frozenset(frs) == allfr for frs in by_t.values()) or not ur_sat:
            periodic = False
    if periodic and contains_zero:
        return BOTH
    if nonperiodic:
        return NONPERIODIC
    if periodic:
        return PERIODIC
    return NEITHER


def family_slice(p: int, family: ConditionFamily, m: int, ordering: OrderingSpec) -> list[LocalClass]:
    """L_p^[m]: allowed classes at p whose ordering exponent is m."""
    return [f for f in family.local_elements(p) if inv_exponent(f, ordering) == m]


# -- growth invariants -------------------------------------------------------

class NoRamificationError(ValueError):
    """The family allows no generically ramified class; counts stay bounded."""


def _joint_modulus(family: ConditionFamily, ordering: OrderingSpec) -> int:
    m = family.generic.modulus
    if ordering.kind == "custom":
        m = m * ordering.modulus // gcd(m, ordering.modulus)
    return m


@lru_cache(maxsize=None)
def _generic_slice_data(family: ConditionFamily, ordering: OrderingSpec):
    """Per class mod the joint modulus: {nu: number of allowed classes}."""
    n = family.n
    L = _joint_modulus(family, ordering)
    profile = family.generic_profile(L)
    data = {}
    for c, by_t in profile.items():
        d = gcd(n, c - 1)
        counts: dict[int, int] = {}
        gens: dict[int, list[int]] = {}
        for t, frs in by_t.items():
            size = n if frs is None else len(frs)
            nu = generic_tame_exponent(ordering, n, c, t, max(d, 1))
            counts[nu] = counts.get(nu, 0) + size
            if t:
                gens.setdefault(nu, []).append((t * (n // d)) % n)
        data[c] = (counts, gens)
    return data


def a_invariant(family: ConditionFamily, ordering: OrderingSpec) -> int:
    """Minimal nonzero generic exponent; the reciprocal growth power."""
    data = _generic_slice_data(family, ordering)
    best = None
    for counts, _ in data.values():
        for nu in counts:
            if nu > 0 and (best is None or nu < best):
                best = nu
    if best is None:
        raise NoRamificationError(
            "family allows no ramified classes at generic places"
        )
    return best


def b_invariant(family: ConditionFamily, ordering: OrderingSpec) -> Fraction:
    """Chebotarev average of |L_p^[a]| / |H^0(Q_p, Z/n)| over generic classes."""
    a = a_invariant(family, ordering)
    data = _generic_slice_data(family, ordering)
    L = _joint_modulus(family, ordering)
    phi = int(sympy.totient(L))
    total = Fraction(0)
    for counts, _ in data.values():
        total += Fraction(counts.get(a, 0), family.n) * Fraction(1, phi)
    return total


def minimal_inertia_subgroup(family: ConditionFamily, ordering: OrderingSpec) -> int:
    """Order of the subgroup of Z/n generated by inertia images of
    minimal-exponent generic classes."""
    a = a_invariant(family, ordering)
    data = _generic_slice_data(family, ordering)
    n = family.n
    g = n
    for _, gens in data.values():
        for val in gens.get(a, []):
            g = gcd(g, val)
    return n // g if g else 1


def inertia_generated_subgroup(family: ConditionFamily) -> int:
    """Order of the subgroup generated by inertia images across all allowed
    generic classes (any exponent)."""
    n = family.n
    g = n
    for c, by_t in family.generic_profile(family.generic.modulus).items():
        d = gcd(n, c - 1)
        for t in by_t:
            if t:
                g = gcd(g, (t * (n // d)) % n)
    return n // g if g else 1
