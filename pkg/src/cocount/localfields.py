"""Explicit local cohomology of Q_v with cyclic coefficients.

For T = Z/n with trivial action, both local cohomology groups at a finite
place p are modelled through B_p = Q_p^* / (Q_p^*)^n:

* the Kummer side H^1(Q_p, mu_n) IS B_p, in coordinates
  (valuation mod n, tame unit class, wild unit class);
* the character side H^1(Q_p, Z/n) = Hom(B_p, Z/n), in the dual coordinates
  (value on the uniformizer p, tame character, wild character).

The local Tate pairing is then literal evaluation of a character on a class,
landing in (1/n)Z/Z.  Unit classes are computed at finite precision:

* odd p not dividing n: units mod p (the wild quotient is trivial);
* odd p | n: units mod p^(v_p(n)+2) split along a fixed primitive root;
* p = 2, n even: units mod 2^(v_2(n)+2) split as {+-1} x <5>.

At the real place the character side is Hom(Gal(C/R), Z/n) and the Kummer
side is R^*/(R^*)^n, both of order gcd(n, 2); the unramified subgroup there
is trivial.  Frobenius normalization: a global character restricted at an
unramified p sends the class of the uniformizer to its value on the
arithmetic Frobenius.  (Consequently characters evaluate on local units
through inversion; the global reciprocity tests pin this down.)
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd

import sympy

from .cyclotomic import UnitRootExponent
from .groups import FiniteAbelianGroup, character_pairing

# The infinite place of Q.
OO = "oo"

Place = int | str

SIDE_CHARACTER = "T"
SIDE_KUMMER = "T*"


def is_finite(v: Place) -> bool:
    return v != OO


def place_key(v: Place):
    """Sort key putting finite places first, in order, then oo."""
    return (1, 0) if v == OO else (0, v)


def _vp(n: int, p: int) -> int:
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return e


@lru_cache(maxsize=None)
def unit_coder(p: int, n: int) -> "UnitCoder":
    return UnitCoder(p, n)


class UnitCoder:
    """Coordinates on Z_p^* / (Z_p^*)^n at fixed, cached precision."""

    def __init__(self, p: int, n: int):
        self.p = p
        self.n = n
        if p == 2:
            self.wild_exp = _vp(n, 2)
            self.tame_modulus = gcd(n, 2)
            self.wild_modulus = 2**self.wild_exp
            self.precision = 2 ** (self.wild_exp + 2) if n % 2 == 0 else 2
            self.generator = 5
        else:
            v = _vp(n, p)
            self.wild_exp = v
            self.tame_modulus = gcd(n, p - 1)
            self.wild_modulus = p**v
            # Precision p^(v+2) at p | n; plain p suffices when the wild
            # quotient is trivial (and keeps large p cheap).
            self.precision = p ** (v + 2) if v else p
            g = sympy.primitive_root(p)
            if v and pow(g, p - 1, p * p) == 1:
                g += p
            self.generator = g
            self.unit_group_order = (p - 1) * (self.precision // p)
            if v:
                # Integers acting as tame / wild projectors on <g>.
                pk1 = self.precision // p
                self.tame_log = int(sympy.ntheory.modular.crt([p - 1, pk1], [1, 0])[0])
                self.wild_log = int(sympy.ntheory.modular.crt([p - 1, pk1], [0, 1])[0])

    # -- class maps -----------------------------------------------------
    def unit_residue(self, num: int, den: int = 1) -> int:
        m = self.precision
        if num % self.p == 0 or den % self.p == 0:
            raise ValueError(f"not a unit at {self.p}")
        return num * pow(den, -1, m) % m

    def unit_class(self, num: int, den: int = 1) -> tuple[int, int]:
        """(tame class, wild class) of a p-adic unit given as num/den."""
        u = self.unit_residue(num, den)
        if self.p == 2:
            if self.n % 2:
                return (0, 0)
            m = self.precision
            for j in range(m // 4):
                pw = pow(5, j, m)
                if pw == u:
                    return (0, j % self.wild_modulus)
                if m - pw == u:
                    return (1, j % self.wild_modulus)
            raise AssertionError("2-adic unit decomposition failed")
        m = self.precision
        phi = (self.p - 1) * (m // self.p)
        t = self._small_dlog(u, self.tame_modulus, phi, m)
        w = self._small_dlog(u, self.wild_modulus, phi, m) if self.wild_exp else 0
        return (t, w)

    def _small_dlog(self, u: int, d: int, phi: int, m: int) -> int:
        """dlog of u along <g> reduced mod d, via the order-d quotient."""
        if d == 1:
            return 0
        target = pow(u, phi // d, m)
        gen = pow(self.generator, phi // d, m)
        cur = 1
        for c in range(d):
            if cur == target:
                return c
            cur = cur * gen % m
        raise AssertionError(f"unit {u} outside <{self.generator}> mod {m}")


@dataclass(frozen=True)
class LocalCohomologyGroup:
    """One of H^1(Q_v, Z/n) or H^1(Q_v, mu_n) with marked unramified part."""

    place: Place
    n: int
    side: str
    carrier: FiniteAbelianGroup
    unramified_gens: tuple[tuple[int, ...], ...]
    coordinate_meaning: tuple[str, ...]

    @property
    def order(self) -> int:
        return self.carrier.order

    @property
    def unramified_order(self) -> int:
        from .groups import subgroup_closure

        return len(subgroup_closure(self.carrier, self.unramified_gens))

    def element(self, coords) -> "LocalClass | LocalKummerClass":
        vec = self.carrier.reduce_vec(tuple(coords))
        cls = LocalClass if self.side == SIDE_CHARACTER else LocalKummerClass
        return cls(self, vec)

    def all_elements(self):
        return [self.element(v) for v in self.carrier.elements()]


@lru_cache(maxsize=None)
def local_group(v: Place, n: int, side: str) -> LocalCohomologyGroup:
    """The explicit model of H^1(Q_v, .) for T = Z/n or its Tate dual."""
    if n < 2:
        raise ValueError("coefficient order must be at least 2")
    if side not in (SIDE_CHARACTER, SIDE_KUMMER):
        raise ValueError(f"unknown side {side!r}")
    if v == OO:
        carrier = FiniteAbelianGroup([gcd(n, 2)])
        meaning = ("complex-conjugation value",) if side == SIDE_CHARACTER else ("sign class",)
        return LocalCohomologyGroup(v, n, side, carrier, (), meaning)
    p = int(v)
    if not sympy.isprime(p):
        raise ValueError(f"{v} is not a place of Q")
    coder = unit_coder(p, n)
    moduli = [n, coder.tame_modulus, coder.wild_modulus]
    carrier = FiniteAbelianGroup(moduli)
    if side == SIDE_CHARACTER:
        gens = ((1, 0, 0),)
        meaning = ("value on Frobenius", "tame character", "wild character")
    else:
        gens = ((0, 1, 0), (0, 0, 1))
        meaning = ("valuation mod n", "tame unit class", "wild unit class")
    return LocalCohomologyGroup(p, n, side, carrier, gens, meaning)


@dataclass(frozen=True)
class LocalClass:
    """Element of H^1(Q_v, Z/n) in character coordinates."""

    group: LocalCohomologyGroup
    coords: tuple[int, ...]

    @property
    def place(self) -> Place:
        return self.group.place

    @property
    def n(self) -> int:
        return self.group.n

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def is_unramified(self) -> bool:
        if self.group.place == OO:
            return self.is_zero()
        return self.coords[1] == 0 and self.coords[2] == 0

    def inertia_coords(self) -> tuple[int, int]:
        if self.group.place == OO:
            return (self.coords[0], 0)
        return (self.coords[1], self.coords[2])

    def inertia_image_generator(self) -> int:
        """Generator of the subgroup of Z/n cut out by the inertia image."""
        n = self.n
        if self.group.place == OO:
            vals = [self.coords[0] * (n // self.group.carrier.moduli[0])] if n % 2 == 0 else []
        else:
            _, d, q = self.group.carrier.moduli
            vals = [self.coords[1] * (n // d), self.coords[2] * (n // q)]
        g = n
        for x in vals:
            g = gcd(g, x % n)
        return g % n

    def scaled(self, k: int) -> "LocalClass":
        return LocalClass(self.group, self.group.carrier.scale(k, self.coords))

    def added(self, other: "LocalClass") -> "LocalClass":
        return LocalClass(self.group, self.group.carrier.add(self.coords, other.coords))


@dataclass(frozen=True)
class LocalKummerClass:
    """Element of H^1(Q_v, mu_n) = Q_v^*/(Q_v^*)^n in valuation/unit coordinates."""

    group: LocalCohomologyGroup
    coords: tuple[int, ...]

    @property
    def place(self) -> Place:
        return self.group.place

    @property
    def n(self) -> int:
        return self.group.n

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    @property
    def valuation(self) -> int:
        return 0 if self.group.place == OO else self.coords[0]


def local_tate_pair(f: LocalClass, a: LocalKummerClass) -> UnitRootExponent:
    """Evaluation pairing H^1(Q_v, Z/n) x H^1(Q_v, mu_n) -> (1/n)Z/Z."""
    if f.group.side != SIDE_CHARACTER or a.group.side != SIDE_KUMMER:
        raise ValueError("pairing needs a character-side and a Kummer-side class")
    if f.place != a.place or f.n != a.n:
        raise ValueError("pairing requires matching place and coefficient order")
    n = f.n
    if f.place == OO:
        d = gcd(n, 2)
        return UnitRootExponent(f.coords[0] * a.coords[0] * (n // d) if d == 2 else 0, n)
    return character_pairing(f.coords, a.coords, f.group.carrier).rescale(n)


def conductor_exponent(f: LocalClass) -> int:
    """Artin conductor exponent of a local character; 0 iff unramified."""
    if f.place == OO:
        return 0
    p = int(f.place)
    t, w = f.coords[1], f.coords[2]
    wild_mod = f.group.carrier.moduli[2]
    if w % wild_mod == 0:
        if t % f.group.carrier.moduli[1] == 0:
            return 0
        return 1 if p != 2 else 2
    order = wild_mod // gcd(wild_mod, w)
    j = _vp(order, p)
    return j + 1 if p != 2 else j + 2


def restrict_rational(a, v: Place, n: int) -> LocalKummerClass:
    """Class of a nonzero rational in Q_v^*/(Q_v^*)^n."""
    a = Fraction(a)
    if a == 0:
        raise ValueError("0 has no Kummer class")
    G = local_group(v, n, SIDE_KUMMER)
    if v == OO:
        if n % 2 == 0 and a < 0:
            return G.element((1,))
        return G.element((0,))
    p = int(v)
    num, den = a.numerator, a.denominator
    val = 0
    while num % p == 0:
        num //= p
        val += 1
    while den % p == 0:
        den //= p
        val -= 1
    coder = unit_coder(p, n)
    t, w = coder.unit_class(num, den)
    return G.element((val % n, t, w))


def kummer_class_order_oracle(p: int, n: int, cap: int = 3 * 10**4) -> int:
    """Brute-force |Hom(Q_p^*, Z/n)| via n-torsion of (Z/p^k)^*; test oracle."""
    coder = unit_coder(p, n)
    m = coder.precision
    if m > cap:
        raise ValueError("precision beyond brute-force cap")
    torsion = sum(1 for u in range(1, m) if u % p and pow(u, n, m) == 1)
    return n * torsion
