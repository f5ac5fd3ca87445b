"""Exact scalars: roots of unity as pairing values, and the ring Q(zeta_n).

Two value types live here:

* ``UnitRootExponent`` -- an element of (1/n)Z/Z, the codomain of local
  pairings.  Purely additive bookkeeping.
* ``CyclotomicScalar`` -- an element of Q(zeta_n), stored as a length-n
  rational coefficient vector on the powers of zeta_n and kept in canonical
  form (reduced mod the n-th cyclotomic polynomial).  All identity checks in
  the package compare these exactly; floating point never enters equality.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd
import cmath


class UnitRootExponent:
    """Element a/n of (1/n)Z/Z.  Additive; n * value = 0."""

    __slots__ = ("numerator", "modulus")

    def __init__(self, numerator: int, modulus: int):
        if modulus < 1:
            raise ValueError("modulus must be positive")
        self.modulus = modulus
        self.numerator = numerator % modulus

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.numerator, self.modulus)

    def is_zero(self) -> bool:
        return self.numerator == 0

    def rescale(self, modulus: int) -> "UnitRootExponent":
        """Rewrite over a new denominator; requires the value to live there."""
        num = self.numerator * modulus
        if num % self.modulus != 0:
            raise ValueError(f"{self} does not lie in (1/{modulus})Z/Z")
        return UnitRootExponent(num // self.modulus, modulus)

    def __add__(self, other: "UnitRootExponent") -> "UnitRootExponent":
        m = self.modulus * other.modulus // gcd(self.modulus, other.modulus)
        return UnitRootExponent(
            self.numerator * (m // self.modulus)
            + other.numerator * (m // other.modulus),
            m,
        )

    def __neg__(self) -> "UnitRootExponent":
        return UnitRootExponent(-self.numerator, self.modulus)

    def __eq__(self, other) -> bool:
        if isinstance(other, UnitRootExponent):
            return self.fraction == other.fraction
        if other == 0:
            return self.numerator == 0
        return NotImplemented

    def __hash__(self):
        return hash(self.fraction)

    def __repr__(self):
        return f"{self.numerator}/{self.modulus}"


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Coefficients (ascending) of the n-th cyclotomic polynomial."""
    if n == 1:
        return (-1, 1)
    # (x^n - 1) / prod_{d | n, d < n} Phi_d, by exact integer division.
    num = [0] * (n + 1)
    num[0], num[n] = -1, 1
    for d in range(1, n):
        if n % d == 0:
            num = _poly_divide_exact(num, list(cyclotomic_polynomial(d)))
    return tuple(num)


def _poly_divide_exact(num: list[int], den: list[int]) -> list[int]:
    num = list(num)
    dn, dd = len(num) - 1, len(den) - 1
    quot = [0] * (dn - dd + 1)
    for i in range(dn - dd, -1, -1):
        c = num[i + dd]
        if c % den[dd] != 0:
            raise ArithmeticError("non-exact polynomial division")
        q = c // den[dd]
        quot[i] = q
        for j in range(dd + 1):
            num[i + j] -= q * den[j]
    if any(num):
        raise ArithmeticError("non-exact polynomial division")
    return quot


@lru_cache(maxsize=None)
def _reduction_rows(n: int) -> tuple[tuple[Fraction, ...], ...]:
    """Row k: coefficients of x^(phi+k) mod Phi_n on the basis 1..x^(phi-1)."""
    phi_poly = cyclotomic_polynomial(n)
    phi = len(phi_poly) - 1
    rows: list[tuple[Fraction, ...]] = []
    # x^phi = -(phi_poly[0] + ... + phi_poly[phi-1] x^(phi-1)) / phi_poly[phi]
    lead = phi_poly[phi]
    cur = [Fraction(-c, lead) for c in phi_poly[:phi]]
    for _ in range(phi, n):
        rows.append(tuple(cur))
        nxt = [Fraction(0)] * phi
        carry = cur[phi - 1]
        for i in range(phi - 1):
            nxt[i + 1] = cur[i]
        for i in range(phi):
            nxt[i] += carry * rows[0][i]
        cur = nxt
    return tuple(rows)


def _reduce_vector(n: int, coeffs: list[Fraction]) -> tuple[Fraction, ...]:
    phi = len(cyclotomic_polynomial(n)) - 1
    out = list(coeffs[:phi]) + [Fraction(0)] * (phi - min(phi, len(coeffs)))
    rows = _reduction_rows(n)
    for k in range(phi, min(len(coeffs), n)):
        c = coeffs[k]
        if c:
            row = rows[k - phi]
            for i in range(phi):
                out[i] += c * row[i]
    return tuple(out) + (Fraction(0),) * (n - phi)


class CyclotomicScalar:
    """Exact element of Q(zeta_n), canonical on the power basis of zeta_n.

    ``coeffs`` always has length n with zeros from position phi(n) on, so
    equality and hashing are structural.
    """

    __slots__ = ("n", "coeffs")

    def __init__(self, n: int, coeffs, *, _reduced: bool = False):
        self.n = n
        if _reduced:
            self.coeffs = coeffs
        else:
            vec = [Fraction(c) for c in coeffs]
            if len(vec) < n:
                vec += [Fraction(0)] * (n - len(vec))
            elif len(vec) > n:
                folded = [Fraction(0)] * n
                for i, c in enumerate(vec):
                    folded[i % n] += c
                vec = folded
            self.coeffs = _reduce_vector(n, vec)

    # -- constructors -------------------------------------------------
    @staticmethod
    def from_rational(n: int, value) -> "CyclotomicScalar":
        vec = [Fraction(0)] * (n - 1)
        return CyclotomicScalar(n, (Fraction(value),) + tuple(vec), _reduced=True)

    @staticmethod
    @lru_cache(maxsize=4096)
    def zeta_power(n: int, a: int) -> "CyclotomicScalar":
        vec = [Fraction(0)] * n
        vec[a % n] = Fraction(1)
        return CyclotomicScalar(n, vec)

    @staticmethod
    def from_pairing(value: UnitRootExponent, n: int) -> "CyclotomicScalar":
        return CyclotomicScalar.zeta_power(n, value.rescale(n).numerator)

    # -- ring structure ------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, CyclotomicScalar):
            if other.n != self.n:
                raise ValueError("mixed cyclotomic orders")
            return other
        if isinstance(other, (int, Fraction)):
            return CyclotomicScalar.from_rational(self.n, other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return CyclotomicScalar(
            self.n,
            tuple(a + b for a, b in zip(self.coeffs, o.coeffs)),
            _reduced=True,
        )

    __radd__ = __add__

    def __neg__(self):
        return CyclotomicScalar(self.n, tuple(-a for a in self.coeffs), _reduced=True)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            q = Fraction(other)
            return CyclotomicScalar(
                self.n, tuple(a * q for a in self.coeffs), _reduced=True
            )
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        n = self.n
        out = [Fraction(0)] * n
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(o.coeffs):
                    if b:
                        out[(i + j) % n] += a * b
        return CyclotomicScalar(n, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (Fraction(1) / Fraction(other))
        return NotImplemented

    # -- structure queries ----------------------------------------------
    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coeffs[1:])

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.coeffs[0]

    def conjugate(self) -> "CyclotomicScalar":
        n = self.n
        vec = [Fraction(0)] * n
        for i, c in enumerate(self.coeffs):
            vec[(-i) % n] += c
        return CyclotomicScalar(n, vec)

    def is_real(self) -> bool:
        return self == self.conjugate()

    def norm_squared(self) -> Fraction:
        """|z|^2 = z * conj(z); exact, and rational for real-embeddable use."""
        val = self * self.conjugate()
        # z z-bar is fixed by conjugation but need not be rational for n > 2;
        # callers compare against rational bounds, so force the rational case.
        if val.is_rational():
            return val.rational_value()
        raise ValueError("norm_squared is not rational; use complex_value")

    def abs_squared_upper(self) -> Fraction:
        """Rational upper bound for |z|^2 via the triangle inequality."""
        s = sum(abs(c) for c in self.coeffs)
        return s * s

    def complex_value(self) -> complex:
        z = cmath.exp(2j * cmath.pi / self.n)
        return sum(float(c) * z**i for i, c in enumerate(self.coeffs) if c)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and self.coeffs[0] == other
        if isinstance(other, CyclotomicScalar):
            return self.n == other.n and self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self):
        return hash((self.n, self.coeffs))

    def __repr__(self):
        if self.is_rational():
            return f"Cyc({self.n}; {self.coeffs[0]})"
        body = " + ".join(
            f"{c}*z^{i}" for i, c in enumerate(self.coeffs) if c
        )
        return f"Cyc({self.n}; {body})"

    def render(self) -> str:
        """Colon-separated coefficient tuple, or p/q when rational."""
        if self.is_rational():
            return str(self.coeffs[0])
        return ":".join(str(c) for c in self.coeffs)
