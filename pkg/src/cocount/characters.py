"""Global cohomology over Q: Dirichlet characters with values in Z/n and
Kummer classes in Q^*/(Q^*)^n, with localization, enumeration, surjectivity
counts and the global reciprocity check.

A character is stored primitively as components at the prime powers exactly
dividing its conductor: at odd p^e the value on a fixed primitive root, at
2^e the values on -1 and 5.  Localization follows class field theory with
the arithmetic-Frobenius normalization: the restriction at an unramified p
sends the uniformizer class to the character value at p, and unit classes
are evaluated through the inverse (the sign that makes the sum of local
pairings of a global pair vanish).

Enumeration walks conductors as (wild or exceptional part) x (squarefree
tame part) with exact weight bookkeeping, so only classes of weight < X are
ever built.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import sympy

from .cyclotomic import UnitRootExponent
from .families import ConditionFamily, FamilyError
from .localfields import (
    OO,
    SIDE_CHARACTER,
    LocalClass,
    LocalKummerClass,
    Place,
    is_finite,
    local_group,
    local_tate_pair,
    place_key,
    restrict_rational,
    unit_coder,
)
from .orderings import OrderingSpec, inv_exponent
from .sieves import primes_up_to


def _vp(m: int, p: int) -> int:
    e = 0
    while m % p == 0:
        m //= p
        e += 1
    return e


def _div_exact(value: int, unit: int) -> int:
    if value % unit:
        raise AssertionError(f"{value} not divisible by {unit}")
    return value // unit


@dataclass(frozen=True)
class CharComponent:
    """Primitive character component at one prime power p^e.

    values: (c,) at odd p -- the value on the canonical primitive root;
            (val_m1, val_5) at p = 2.
    """

    p: int
    e: int
    values: tuple

    @property
    def prime_power(self) -> int:
        return self.p**self.e

    def value_at(self, a: int, n: int) -> int:
        """Component value at an integer prime to p."""
        q = self.prime_power
        a %= q
        if a == 0 or (self.p != 2 and a % self.p == 0):
            raise ValueError(f"{a} is not a unit at {self.p}")
        if self.p == 2:
            val_m1, val_5 = self.values
            if self.e == 2:
                return val_m1 if a == 3 else 0
            half = q // 4
            for j in range(half):
                pw = pow(5, j, q)
                if pw == a:
                    return (j * val_5) % n
                if q - pw == a:
                    return (val_m1 + j * val_5) % n
            raise AssertionError("2-adic decomposition failed")
        c = self.values[0] % n
        if c == 0:
            return 0
        order = n // gcd(n, c)
        phi_q = (self.p - 1) * (q // self.p)
        g = unit_coder(self.p, n).generator
        target = pow(a, phi_q // order, q)
        cur = 1
        gen = pow(g, phi_q // order, q)
        for k in range(order):
            if cur == target:
                return (k * c) % n
            cur = cur * gen % q
        raise AssertionError("component evaluation failed")

    def parity_value(self, n: int) -> int:
        """Value at -1."""
        if self.p == 2:
            return self.values[0] % n
        return self.value_at(self.prime_power - 1, n)

    def inertia_coords(self, n: int) -> tuple[int, int]:
        """(tame, wild) coordinates of the local restriction at p."""
        coder = unit_coder(self.p, n)
        d, wild = coder.tame_modulus, coder.wild_modulus
        if self.p == 2:
            val_m1, val_5 = self.values
            t = _div_exact((-val_m1) % n, n // d) % d if d > 1 else 0
            w = _div_exact((-val_5) % n, n // wild) % wild if wild > 1 else 0
            return (t, w)
        c = self.values[0] % n
        if self.e == 1:
            t = _div_exact((-c) % n, n // d) % d if d > 1 else 0
            return (t, 0)
        t = _div_exact((-c * coder.tame_log) % n, n // d) % d if d > 1 else 0
        w = _div_exact((-c * coder.wild_log) % n, n // wild) % wild
        return (t, w)


class GlobalCharacter:
    """Primitive Dirichlet character with values in Z/n, weight-tagged."""

    __slots__ = ("n", "conductor", "components", "weight", "_restrictions")

    def __init__(self, n: int, components: tuple, weight: int = 0):
        self.n = n
        self.components = tuple(sorted(components, key=lambda c: c.p))
        self.conductor = 1
        for comp in self.components:
            self.conductor *= comp.prime_power
        self.weight = weight
        self._restrictions: dict = {}

    # -- identity -----------------------------------------------------
    def key(self) -> tuple:
        return (self.n, tuple((c.p, c.e, c.values) for c in self.components))

    def __eq__(self, other):
        return isinstance(other, GlobalCharacter) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        parts = ",".join(
            f"{c.p}^{c.e}:{':'.join(map(str, c.values))}" for c in self.components
        )
        return f"GlobalCharacter(n={self.n}, m={self.conductor}, [{parts}])"

    # -- values --------------------------------------------------------
    def is_trivial(self) -> bool:
        return not self.components

    def value(self, a: int) -> int:
        if gcd(a, self.conductor) != 1:
            raise ValueError(f"{a} is not prime to the conductor {self.conductor}")
        return sum(comp.value_at(a, self.n) for comp in self.components) % self.n

    def value_at_minus1(self) -> int:
        return sum(comp.parity_value(self.n) for comp in self.components) % self.n

    def image_generator(self) -> int:
        g = self.n
        for comp in self.components:
            for v in comp.values:
                g = gcd(g, v % self.n)
        return g % self.n

    def order(self) -> int:
        g = self.image_generator()
        return self.n // g if g else 1

    # -- localization ----------------------------------------------------
    def restrict(self, v: Place) -> LocalClass:
        if v in self._restrictions:
            return self._restrictions[v]
        G = local_group(v, self.n, SIDE_CHARACTER)
        n = self.n
        if v == OO:
            if n % 2 == 0:
                s = _div_exact(self.value_at_minus1(), n // 2) % 2
                out = G.element((s,))
            else:
                out = G.element((0,))
        else:
            p = int(v)
            own = None
            fr = 0
            for comp in self.components:
                if comp.p == p:
                    own = comp
                else:
                    fr += comp.value_at(p, n)
            t, w = own.inertia_coords(n) if own else (0, 0)
            out = G.element((fr % n, t, w))
        self._restrictions[v] = out
        return out


def restrict_character(f: GlobalCharacter, v: Place) -> LocalClass:
    return f.restrict(v)


def is_surjective(f: GlobalCharacter) -> bool:
    """True iff the values generate Z/n."""
    return f.image_generator() == 1


def surjective_count(counts_by_divisor: dict, n: int) -> int:
    """Moebius inversion over the divisor lattice.

    counts_by_divisor[d] = number of classes with image inside the order-d
    subgroup; returns the number with image exactly Z/n.
    """
    total = 0
    for d in sympy.divisors(n):
        if d not in counts_by_divisor:
            raise KeyError(f"missing divisor entry {d}")
        total += int(sympy.mobius(n // d)) * counts_by_divisor[d]
    return total


# -- global Kummer classes ---------------------------------------------------

@dataclass(frozen=True)
class GlobalKummerClass:
    """Class in Q^*/(Q^*)^n: sign (for even n) and exponents at finite primes."""

    n: int
    sign: int
    exponents: tuple  # sorted tuple of (p, e) with 0 < e < n

    @staticmethod
    def from_rational(a, n: int) -> "GlobalKummerClass":
        a = Fraction(a)
        if a == 0:
            raise ValueError("0 has no Kummer class")
        sign = 1 if (a < 0 and n % 2 == 0) else 0
        exps: dict[int, int] = {}
        for num, s in ((a.numerator, 1), (a.denominator, -1)):
            for p, e in sympy.factorint(abs(num)).items():
                exps[int(p)] = (exps.get(int(p), 0) + s * e) % n
        cleaned = tuple(sorted((p, e) for p, e in exps.items() if e))
        return GlobalKummerClass(n, sign, cleaned)

    @property
    def is_identity(self) -> bool:
        return self.sign == 0 and not self.exponents

    def rational(self) -> Fraction:
        val = Fraction(-1 if self.sign else 1)
        for p, e in self.exponents:
            val *= p**e
        return val

    @property
    def support(self) -> tuple:
        return tuple(p for p, _ in self.exponents)

    def restrict(self, v: Place) -> LocalKummerClass:
        return restrict_rational(self.rational(), v, self.n)

    def __repr__(self):
        return f"KummerClass({self.rational()}, n={self.n})"


def reciprocity_defect(f: GlobalCharacter, a: GlobalKummerClass) -> UnitRootExponent:
    """Sum of all local pairings of a global pair; vanishes identically."""
    if f.n != a.n:
        raise ValueError("coefficient order mismatch")
    n = f.n
    places = {2, OO} | set(a.support) | {comp.p for comp in f.components}
    places |= {int(p) for p in sympy.primefactors(n)}
    total = UnitRootExponent(0, n)
    for v in sorted(places, key=place_key):
        total = total + local_tate_pair(f.restrict(v), a.restrict(v))
    return total


# -- enumeration --------------------------------------------------------------

def _tame_options_by_class(n: int, L: int, ordering: OrderingSpec, family: ConditionFamily):
    """Per congruence class mod L: ramified tame choices as
    (nu, character value, tame coord, allowed frobenius set or None)."""
    from .orderings import generic_tame_exponent

    profile = family.generic_profile(L)
    out = {}
    for c, by_t in profile.items():
        d = gcd(n, c - 1)
        opts = []
        for t in sorted(by_t):
            if t == 0:
                continue
            frs = by_t[t]
            nu = generic_tame_exponent(ordering, n, c, t, d)
            value = (-t * (n // d)) % n
            opts.append((nu, value, t, frs))
        out[c] = opts
    return out


def _components_at(p: int, n: int) -> list[CharComponent]:
    """All primitive character components at p with values in Z/n."""
    out = []
    if p == 2:
        if n % 2 == 0:
            out.append(CharComponent(2, 2, (n // 2, 0)))
            v = _vp(n, 2)
            for e in range(3, v + 3):
                for val5 in range(1, n):
                    if (val5 * 2 ** (e - 2)) % n == 0 and (val5 * 2 ** (e - 3)) % n:
                        for m1 in (0, n // 2):
                            out.append(CharComponent(2, e, (m1, val5)))
        return out
    d = gcd(n, p - 1)
    for j in range(1, d):
        out.append(CharComponent(p, 1, (j * (n // d),)))
    v = _vp(n, p)
    for e in range(2, v + 2):
        phi_e = (p - 1) * p ** (e - 1)
        for c in range(1, n):
            ordc = n // gcd(n, c)
            if phi_e % ordc == 0 and _vp(ordc, p) == e - 1:
                out.append(CharComponent(p, e, (c,)))
    return out


def _exceptional_options(p: int, n: int, ordering: OrderingSpec, family: ConditionFamily):
    """Choices at an irregular finite place: (nu, component or None, fr_set)."""
    allowed = family.instantiate(p)
    allfr = frozenset(range(n))
    G = local_group(p, n, SIDE_CHARACTER)
    opts = []
    ur_frs = frozenset(x[0] for x in allowed if x[1] == 0 and x[2] == 0)
    opts.append((0, None, None if ur_frs == allfr else ur_frs))
    for comp in _components_at(p, n):
        t, w = comp.inertia_coords(n)
        frs = frozenset(x[0] for x in allowed if (x[1], x[2]) == (t, w))
        if not frs:
            continue
        nu = inv_exponent(G.element((0, t, w)), ordering)
        opts.append((nu, comp, None if frs == allfr else frs))
    return opts


def _candidate_characters(n: int, bound, ordering: OrderingSpec, family: ConditionFamily):
    """Deterministic raw stream of family members of weight < bound."""
    if family.n != n:
        raise FamilyError("family coefficient order mismatch")
    if bound <= 1:
        return
    if not family.generic_contains_unramified():
        raise FamilyError(
            "generic rule must allow all unramified classes for enumeration"
        )
    bound = int(bound)
    L = family.generic.modulus
    if ordering.kind == "custom":
        L = L * ordering.modulus // gcd(L, ordering.modulus)
    tame_opts = _tame_options_by_class(n, L, ordering, family)

    exc_places = sorted(set(family.irregular_finite) | set(
        v for v in ordering.exceptional_places if is_finite(v)
    ))
    exc_options = [_exceptional_options(p, n, ordering, family) for p in exc_places]

    oo_allowed = family.instantiate(OO)
    oo_all = len(oo_allowed) == local_group(OO, n, SIDE_CHARACTER).order

    # a tame prime p contributes at least p^min_nu to the weight, so the
    # sieve only needs to reach bound^(1/min_nu)
    min_nu = min(
        (opt[0] for opts in tame_opts.values() for opt in opts),
        default=1,
    )
    prime_limit = int(round(bound ** (1.0 / min_nu))) + 2
    primes = primes_up_to(min(bound, prime_limit))
    skip = set(exc_places)

    def finish(weight: int, comps: list, constraints: list):
        """Apply frobenius-sensitive and infinite-place filters, then build."""
        chi = GlobalCharacter(n, tuple(comps), weight)
        for place, frs in constraints:
            fr = 0
            for comp in chi.components:
                if comp.p != place:
                    fr += comp.value_at(place, n)
            if fr % n not in frs:
                return None
        if not oo_all:
            s = (_div_exact(chi.value_at_minus1(), n // 2) % 2,) if n % 2 == 0 else (0,)
            if s not in oo_allowed:
                return None
        return chi

    def tame_rec(start: int, weight: int, comps: list, constraints: list):
        chi = finish(weight, comps, constraints)
        if chi is not None:
            yield chi
        for idx in range(start, len(primes)):
            p = int(primes[idx])
            if weight * p**min_nu >= bound:
                break
            if p in skip or n % p == 0:
                continue
            opts = tame_opts.get(p % L)
            if not opts:
                continue
            for nu, value, _t, frs in opts:
                w2 = weight * p**nu
                if w2 < bound:
                    comp = CharComponent(p, 1, (value,))
                    cons2 = constraints + [(p, frs)] if frs is not None else constraints
                    yield from tame_rec(idx + 1, w2, comps + [comp], cons2)

    for combo in itertools.product(*exc_options):
        weight = 1
        comps: list = []
        constraints: list = []
        ok = True
        for p, (nu, comp, frs) in zip(exc_places, combo):
            weight *= p**nu
            if weight >= bound:
                ok = False
                break
            if comp is not None:
                comps.append(comp)
            if frs is not None:
                constraints.append((p, frs))
        if not ok:
            continue
        yield from tame_rec(0, weight, comps, constraints)


def enumerate_characters(n: int, bound, ordering: OrderingSpec, family: ConditionFamily,
                         sort: bool = True):
    """All f in H^1(Q, Z/n) with res_p(f) in L_p everywhere and weight < bound.

    Sorted output is (weight, conductor, value table); ``sort=False`` streams
    in raw deterministic order without buffering.
    """
    raw = _candidate_characters(n, bound, ordering, family)
    if not sort:
        return raw
    return iter(sorted(raw, key=lambda chi: (chi.weight, chi.conductor, chi.key())))


def character_weight(chi: GlobalCharacter, ordering: OrderingSpec) -> int:
    """Product over places of p^(nu_p) computed from actual restrictions."""
    total = 1
    places = {comp.p for comp in chi.components} | set(
        v for v in ordering.exceptional_places if is_finite(v)
    )
    for p in sorted(places):
        total *= int(p) ** inv_exponent(chi.restrict(p), ordering)
    return total


def render_stream(chars) -> str:
    """Line format: weight,conductor,colon-joined component residues."""
    lines = []
    for chi in chars:
        table = ":".join(
            ":".join(str(v) for v in comp.values) for comp in chi.components
        )
        lines.append(f"{chi.weight},{chi.conductor},{table}")
    return "\n".join(lines)
