import random
from fractions import Fraction
from math import gcd

import pytest
import sympy

from cocount.groups import annihilator, subgroup_closure
from cocount.localfields import (
    OO,
    SIDE_CHARACTER,
    SIDE_KUMMER,
    conductor_exponent,
    kummer_class_order_oracle,
    local_group,
    local_tate_pair,
    restrict_rational,
    unit_coder,
)


def test_local_group_examples():
    g = local_group(5, 2, SIDE_CHARACTER)
    assert g.order == 4 and g.unramified_order == 2
    g = local_group(2, 2, SIDE_CHARACTER)
    assert g.order == 8 and g.unramified_order == 2
    g = local_group(5, 3, SIDE_CHARACTER)
    assert g.order == 3 and g.unramified_order == 3


def test_infinite_place_orders():
    for n in (2, 3, 4, 5, 6):
        for side in (SIDE_CHARACTER, SIDE_KUMMER):
            assert local_group(OO, n, side).order == gcd(n, 2)


def test_sides_have_equal_order():
    for p in (2, 3, 5, 7, 13):
        for n in range(2, 7):
            a = local_group(p, n, SIDE_CHARACTER).order
            b = local_group(p, n, SIDE_KUMMER).order
            assert a == b


def test_euler_characteristic_closed_form_vs_bruteforce():
    """|H^1(Q_p, Z/n)| = n * |n-torsion of the truncated unit group|."""
    for n in range(2, 7):
        for p in sympy.primerange(2, 101):
            coder = unit_coder(int(p), n)
            if coder.precision > 3 * 10**4:
                continue
            assert local_group(int(p), n, SIDE_CHARACTER).order == \
                kummer_class_order_oracle(int(p), n)


def test_closed_form_odd_p():
    for n in range(2, 7):
        for p in (3, 5, 7, 11, 97):
            expected = n * gcd(n, p - 1) * p ** _vp(n, p)
            assert local_group(p, n, SIDE_CHARACTER).order == expected


def _vp(n, p):
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return e


def test_pairing_perfect_all_small_places():
    """Annihilator of everything is trivial; unramified parts are exact
    annihilators of each other, for all p <= 100, n <= 6."""
    for n in range(2, 7):
        for p in list(sympy.primerange(2, 101)):
            p = int(p)
            T = local_group(p, n, SIDE_CHARACTER)
            K = local_group(p, n, SIDE_KUMMER)
            full = list(T.carrier.elements())
            assert annihilator(T.carrier, full) == frozenset({T.carrier.zero})
            ur_T = subgroup_closure(T.carrier, T.unramified_gens)
            ann = annihilator(T.carrier, T.unramified_gens)
            assert len(ann) * len(ur_T) == K.order
            ur_K = subgroup_closure(K.carrier, K.unramified_gens)
            assert ann == ur_K


def test_tate_pair_examples():
    T = local_group(5, 2, SIDE_CHARACTER)
    zero = T.element((0, 0, 0))
    a5 = restrict_rational(5, 5, 2)
    assert local_tate_pair(zero, a5).is_zero()
    frob = T.element((1, 0, 0))
    assert local_tate_pair(frob, a5).fraction == Fraction(1, 2)
    tame = T.element((0, 1, 0))
    a2 = restrict_rational(2, 5, 2)  # 2 is not a square mod 5
    assert local_tate_pair(tame, a2).fraction == Fraction(1, 2)
    a4 = restrict_rational(4, 5, 2)  # 4 is a square
    assert local_tate_pair(tame, a4).is_zero()


def test_tate_pair_mismatch_errors():
    T = local_group(5, 2, SIDE_CHARACTER)
    K3 = local_group(3, 2, SIDE_KUMMER)
    with pytest.raises(ValueError):
        local_tate_pair(T.element((1, 0, 0)), K3.element((1, 0, 0)))
    with pytest.raises(ValueError):
        local_tate_pair(T.element((1, 0, 0)), T.element((1, 0, 0)))


def test_conductor_exponents():
    T = local_group(5, 2, SIDE_CHARACTER)
    assert conductor_exponent(T.element((1, 0, 0))) == 0
    assert conductor_exponent(T.element((0, 1, 0))) == 1
    T2 = local_group(2, 2, SIDE_CHARACTER)
    assert conductor_exponent(T2.element((0, 1, 0))) == 2  # Q_2(i)
    assert conductor_exponent(T2.element((0, 0, 1))) == 3  # Q_2(sqrt 2) etc.
    assert conductor_exponent(T2.element((0, 1, 1))) == 3
    T9 = local_group(3, 9, SIDE_CHARACTER)
    assert conductor_exponent(T9.element((0, 0, 3))) == 2  # wild of order 3
    assert conductor_exponent(T9.element((0, 0, 1))) == 3  # wild of order 9
    assert conductor_exponent(local_group(OO, 2, SIDE_CHARACTER).element((1,))) == 0


def test_conductor_zero_iff_unramified():
    for (p, n) in [(3, 2), (2, 4), (5, 4), (3, 6), (7, 3)]:
        T = local_group(p, n, SIDE_CHARACTER)
        for x in T.carrier.elements():
            f = T.element(x)
            assert (conductor_exponent(f) == 0) == f.is_unramified()


def test_restrict_rational_examples():
    for p in (2, 3, 5, 97):
        assert restrict_rational(1, p, 2).is_zero()
    c = restrict_rational(12, 5, 2)
    assert c.coords == (0, 1, 0)
    c = restrict_rational(5, 5, 2)
    assert c.coords == (1, 0, 0)
    assert restrict_rational(-1, OO, 2).coords == (1,)
    assert restrict_rational(2, OO, 2).coords == (0,)
    assert restrict_rational(-1, OO, 3).coords == (0,)
    with pytest.raises(ValueError):
        restrict_rational(0, 5, 2)


def test_restrict_rational_multiplicative_kills_powers():
    rng = random.Random(3)
    for n in (2, 3, 4, 6):
        for p in (2, 3, 5, 13):
            K = local_group(p, n, SIDE_KUMMER)
            for _ in range(40):
                a = Fraction(rng.randint(1, 400), rng.randint(1, 11))
                b = Fraction(rng.randint(1, 400), rng.randint(1, 11))
                ca = restrict_rational(a, p, n).coords
                cb = restrict_rational(b, p, n).coords
                cab = restrict_rational(a * b, p, n).coords
                assert cab == K.carrier.add(ca, cb)
                assert restrict_rational(a**n, p, n).is_zero()


def test_unit_coder_wild_place():
    assert unit_coder(3, 9).precision == 3**4  # v + 2 = 4 at p | n
    assert unit_coder(3, 6).precision == 3**3
    assert unit_coder(2, 4).precision == 2**4
    assert unit_coder(5, 6).precision == 5  # wild part trivial away from n
    # 8 square classes of Q_2: +-1, +-5, +-2, +-10 representatives
    reps = [1, -1, 5, -5, 2, -2, 10, -10]
    classes = {restrict_rational(r, 2, 2).coords for r in reps}
    assert len(classes) == 8
