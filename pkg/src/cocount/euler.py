"""Frobenian Euler products over exact cyclotomic scalars.

An Euler product here is a prefactor times a product of local polynomial
factors in x = p^(-s).  Generic factors come from a provider: either an
explicit congruence-class table (``FrobenianPolyMap``) or any object that
can produce the exact factor at a given prime.  Coefficient expansion is
exact; numerical evaluation appears only in ``evaluate``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import sympy

from .cyclotomic import CyclotomicScalar
from .sieves import primes_up_to

Poly = tuple  # tuple[CyclotomicScalar, ...], ascending degrees in x = p^(-s)


class CapExceeded(RuntimeError):
    """Requested truncation or cutoff beyond the configured resource cap."""


def poly_is_one(poly: Poly) -> bool:
    return len(poly) >= 1 and poly[0] == 1 and all(c.is_zero() for c in poly[1:])


def poly_is_zero(poly: Poly) -> bool:
    return all(c.is_zero() for c in poly)


@dataclass(frozen=True)
class FrobenianPolyMap:
    """Generic local factor depending on p only through p mod modulus."""

    n: int
    modulus: int
    class_polys: tuple  # tuple of (congruence class, Poly)

    def factor_at(self, p: int) -> Poly:
        table = dict(self.class_polys)
        cls = p % self.modulus
        if cls not in table:
            raise KeyError(f"no class polynomial for {p} mod {self.modulus}")
        return table[cls]

    def as_frobenian(self) -> "FrobenianPolyMap":
        return self

    def classes(self):
        return dict(self.class_polys)


@dataclass(frozen=True)
class EulerProductSpec:
    """prefactor * prod_p (local factor at p).

    ``exceptional`` overrides the generic provider at finitely many primes.
    A ``None`` generic means the finite product of the exceptional factors.
    """

    n: int
    generic: object | None
    exceptional: tuple  # tuple of (p, Poly)
    prefactor: CyclotomicScalar

    def factor_at(self, p: int) -> Poly:
        table = dict(self.exceptional)
        if p in table:
            return table[p]
        if self.generic is None:
            return (CyclotomicScalar.from_rational(self.n, 1),)
        return self.generic.factor_at(p)

    def as_frobenian(self) -> FrobenianPolyMap | None:
        if self.generic is None:
            return None
        getter = getattr(self.generic, "as_frobenian", None)
        return getter() if getter else None


@dataclass
class CoefficientSeries:
    """Truncated Dirichlet series sum a_k k^(-s), exact coefficients."""

    n: int
    truncation: int
    coeffs: list  # index 0 unused; entries CyclotomicScalar

    @staticmethod
    def zero(n: int, truncation: int) -> "CoefficientSeries":
        z = CyclotomicScalar.from_rational(n, 0)
        return CoefficientSeries(n, truncation, [z] * (truncation + 1))

    def __getitem__(self, k: int) -> CyclotomicScalar:
        return self.coeffs[k]

    def add(self, other: "CoefficientSeries") -> "CoefficientSeries":
        if (self.n, self.truncation) != (other.n, other.truncation):
            raise ValueError("series shape mismatch")
        return CoefficientSeries(
            self.n,
            self.truncation,
            [a + b for a, b in zip(self.coeffs, other.coeffs)],
        )

    def accumulate(self, other: "CoefficientSeries") -> None:
        """In-place sparse addition; skips the addend's zero entries."""
        if (self.n, self.truncation) != (other.n, other.truncation):
            raise ValueError("series shape mismatch")
        for k in range(1, self.truncation + 1):
            c = other.coeffs[k]
            if not c.is_zero():
                self.coeffs[k] = self.coeffs[k] + c

    def scale(self, c) -> "CoefficientSeries":
        return CoefficientSeries(self.n, self.truncation, [a * c for a in self.coeffs])

    def dirichlet_convolve(self, other: "CoefficientSeries") -> "CoefficientSeries":
        if (self.n, self.truncation) != (other.n, other.truncation):
            raise ValueError("series shape mismatch")
        out = CoefficientSeries.zero(self.n, self.truncation)
        for a in range(1, self.truncation + 1):
            ca = self.coeffs[a]
            if ca.is_zero():
                continue
            for b in range(1, self.truncation // a + 1):
                cb = other.coeffs[b]
                if not cb.is_zero():
                    out.coeffs[a * b] = out.coeffs[a * b] + ca * cb
        return out

    def __eq__(self, other):
        return (
            isinstance(other, CoefficientSeries)
            and (self.n, self.truncation) == (other.n, other.truncation)
            and self.coeffs == other.coeffs
        )

    def render(self) -> str:
        return "\n".join(
            f"{k},{self.coeffs[k].render()}" for k in range(1, self.truncation + 1)
        )


def expand(spec: EulerProductSpec, truncation: int, cap: int = 200_000) -> CoefficientSeries:
    """Exact Dirichlet coefficients of the Euler product up to ``truncation``."""
    if truncation < 1:
        raise ValueError("truncation must be at least 1")
    if truncation > cap:
        raise CapExceeded(f"truncation {truncation} exceeds cap {cap}")
    n = spec.n
    zero = CyclotomicScalar.from_rational(n, 0)
    one = CyclotomicScalar.from_rational(n, 1)
    series = [zero] * (truncation + 1)
    series[1] = spec.prefactor
    for p in primes_up_to(truncation):
        p = int(p)
        poly = spec.factor_at(p)
        if poly_is_one(poly):
            continue
        c0 = poly[0]
        adds: list[tuple[int, CyclotomicScalar]] = []
        top = truncation // p
        for m in range(1, top + 1):
            if m % p == 0:
                continue
            v = series[m]
            if v.is_zero():
                continue
            pe = p
            for e in range(1, len(poly)):
                idx = m * pe
                if idx > truncation:
                    break
                ce = poly[e]
                if not ce.is_zero():
                    adds.append((idx, v * ce))
                pe *= p
        if c0 != one:
            for m in range(1, truncation + 1):
                if m % p and not series[m].is_zero():
                    series[m] = series[m] * c0
        for idx, val in adds:
            series[idx] = series[idx] + val
    return CoefficientSeries(n, truncation, series)


def singularity(spec: EulerProductSpec, bound_mode: bool = False) -> tuple[Fraction, Fraction]:
    """(abscissa 1/a, order b) of the rightmost singularity, combinatorially.

    a is the least degree >= 1 carrying a nonzero coefficient in some
    congruence class; b is the Chebotarev-weighted sum of those minimal
    coefficients (exact rationals).  ``bound_mode`` replaces coefficients by
    rational upper bounds on their absolute values, giving only an upper
    bound on the order (the twisted-product case).  Returns (0, 0) when all
    generic factors are trivial.
    """
    fmap = spec.as_frobenian()
    if fmap is None:
        return (Fraction(0), Fraction(0))
    classes = fmap.classes()
    if not classes:
        return (Fraction(0), Fraction(0))
    a = None
    for poly in classes.values():
        for e in range(1, len(poly)):
            if not poly[e].is_zero():
                if a is None or e < a:
                    a = e
                break
    if a is None:
        return (Fraction(0), Fraction(0))
    phi = int(sympy.totient(fmap.modulus))
    order = Fraction(0)
    for poly in classes.values():
        if a < len(poly) and not poly[a].is_zero():
            c = poly[a]
            if bound_mode:
                val = _abs_upper(c)
            else:
                if not c.is_rational():
                    raise ValueError(
                        "minimal-degree coefficient is irrational; use bound_mode"
                    )
                val = c.rational_value()
                if val < 0:
                    raise ValueError(
                        "minimal-degree coefficient is negative; use bound_mode"
                    )
            order += Fraction(val, phi)
    return (Fraction(1, a), order)


def _abs_upper(c: CyclotomicScalar) -> Fraction:
    return sum((abs(x) for x in c.coeffs), Fraction(0))


def evaluate(spec: EulerProductSpec, s, prime_cutoff: int,
             mode: str = "absolute", truncation: int | None = None):
    """Numerical value of the Euler product.

    absolute mode: returns (value, tail_bound) with a rigorous bound on the
    truncated tail, valid strictly right of the abscissa.  conditional mode:
    returns the sequence of partial sums of the coefficient series at s,
    for convergence inspection only.
    """
    n = spec.n
    if mode == "conditional":
        N = truncation or prime_cutoff
        series = expand(spec, N)
        partials = []
        acc = 0 + 0j
        for k in range(1, N + 1):
            c = series.coeffs[k]
            if not c.is_zero():
                acc += c.complex_value() * k ** (-float(s))
            partials.append(acc)
        return partials
    if mode != "absolute":
        raise ValueError(f"unknown mode {mode!r}")
    s = float(s)
    fmap = spec.as_frobenian()
    amin, coeff_bound = None, Fraction(0)
    polys = list(dict(spec.exceptional).values())
    if fmap is not None:
        polys += list(fmap.classes().values())
    for poly in polys:
        bound = Fraction(0)
        for e in range(1, len(poly)):
            if not poly[e].is_zero():
                if amin is None or e < amin:
                    amin = e
                bound += _abs_upper(poly[e])
        coeff_bound = max(coeff_bound, bound)
    if amin is None:
        # no growing factors: the finite product converges everywhere
        value = complex(spec.prefactor.complex_value())
        for _, poly in spec.exceptional:
            value *= poly[0].complex_value()
        return value, 0.0
    if amin * s <= 1:
        raise ValueError(f"s = {s} not strictly right of the abscissa 1/{amin}")
    value = complex(spec.prefactor.complex_value())
    for p in primes_up_to(prime_cutoff):
        p = int(p)
        x = p ** (-s)
        poly = spec.factor_at(p)
        value *= sum(c.complex_value() * x**e for e, c in enumerate(poly))
    # tail: |log prod_(p>P) (1+t_p)| <= 2 sum |t_p| once |t_p| <= 1/2
    P = prime_cutoff
    tail_terms = float(coeff_bound) * P ** (1 - amin * s) / (amin * s - 1)
    if float(coeff_bound) * P ** (-amin * s) > 0.5:
        raise ValueError("cutoff too small for a rigorous tail bound")
    tail_bound = abs(value) * (math.exp(2 * tail_terms) - 1)
    return value, tail_bound
