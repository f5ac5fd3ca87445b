import random
from fractions import Fraction

import pytest

from cocount.cyclotomic import CyclotomicScalar
from cocount.euler import expand, poly_is_zero
from cocount.families import (
    box_family,
    example_d1mod4_family,
    full_family,
    unramified_family,
)
from cocount.characters import GlobalKummerClass
from cocount.localfields import (
    OO,
    SIDE_KUMMER,
    local_group,
    restrict_rational,
)
from cocount.orderings import custom_ordering, disc_ordering, radical_ordering
from cocount.poisson import (
    NotEligibleError,
    dual_series,
    dual_support,
    greenberg_wiles_check,
    local_fourier,
    mb_main_term,
    poisson_check,
)

DISC = disc_ordering()


def rat(n, q):
    return CyclotomicScalar.from_rational(n, q)


def test_local_fourier_full_family():
    fam = full_family(2)
    g0 = restrict_rational(1, 7, 2)
    factor = local_fourier(7, fam, DISC, g0)
    assert factor.poly == (rat(2, 1), rat(2, 1))  # 1 + x


def test_local_fourier_example_family():
    fam = example_d1mod4_family()
    # trivial restriction: 1 + x/2
    factor = local_fourier(7, fam, DISC, restrict_rational(1, 7, 2))
    assert factor.poly == (rat(2, 1), rat(2, Fraction(1, 2)))
    # class pairing nontrivially with the allowed ramified class: 1 - x/2
    factor = local_fourier(7, fam, DISC, restrict_rational(-1, 7, 2))
    assert factor.poly == (rat(2, 1), rat(2, Fraction(-1, 2)))
    # ramified dual class: unramified terms cancel, leaving +-x/2
    factor = local_fourier(7, fam, DISC, restrict_rational(7, 7, 2))
    assert factor.poly[0].is_zero()
    assert factor.poly[1] in (rat(2, Fraction(1, 2)), rat(2, Fraction(-1, 2)))


def test_local_fourier_infinite_place():
    fam = full_family(2)
    factor = local_fourier(OO, fam, DISC, restrict_rational(1, OO, 2))
    assert factor.poly == (rat(2, 1),)
    factor = local_fourier(OO, fam, DISC, restrict_rational(-1, OO, 2))
    assert factor.poly[0].is_zero()


def test_dual_support_counts():
    fam = unramified_family(2)
    assert len(dual_support(fam, {2, OO}, 2)) == 4
    assert len(dual_support(fam, {2, 3, OO}, 2)) == 8
    vals = {g.rational() for g in dual_support(fam, {2, OO}, 2)}
    assert vals == {Fraction(1), Fraction(-1), Fraction(2), Fraction(-2)}
    vals = {g.rational() for g in dual_support(fam, {OO}, 2)}
    assert vals == {Fraction(1), Fraction(-1)}
    # odd n: no sign classes
    assert len(dual_support(unramified_family(3), {3, OO}, 3)) == 3
    with pytest.raises(NotEligibleError):
        dual_support(example_d1mod4_family(), {2, OO}, 2)


def test_dual_series_structure():
    fam = full_family(2)
    spec = dual_series(fam, DISC, GlobalKummerClass(2, 0, ()))
    assert spec.as_frobenian() is not None
    assert spec.factor_at(11) == (rat(2, 1), rat(2, 1))
    g = GlobalKummerClass.from_rational(3, 2)
    spec = dual_series(fam, DISC, g)
    # at p | g the factor has vanishing constant term
    factor3 = dict(spec.exceptional)[3]
    assert factor3[0].is_zero()


def test_twisted_factors_are_frobenian_for_n2():
    """The per-prime twisted factor is constant on classes mod 8 rad(g) m."""
    import sympy

    fam = example_d1mod4_family()
    for gval in (3, 5, 15):
        g = GlobalKummerClass.from_rational(gval, 2)
        spec = dual_series(fam, DISC, g)
        modulus = 8 * gval * fam.generic.modulus
        by_class = {}
        for p in sympy.primerange(3, 2000):
            p = int(p)
            if gval % p == 0:
                continue
            cls = p % modulus
            poly = spec.factor_at(p)
            if cls in by_class:
                assert by_class[cls] == poly, (gval, p, cls)
            else:
                by_class[cls] = poly


def test_domination_by_untwisted_factor():
    """|factor(g)| <= factor(0) coefficient-wise on random local inputs."""
    rng = random.Random(23)
    fams = [full_family(2), full_family(3), full_family(4), example_d1mod4_family()]
    checked = 0
    while checked < 300:
        fam = rng.choice(fams)
        n = fam.n
        p = rng.choice([3, 5, 7, 11, 13])
        if n % p == 0:
            continue
        K = local_group(p, n, SIDE_KUMMER)
        coords = rng.choice(list(K.carrier.elements()))
        g = K.element(coords)
        twisted = local_fourier(p, fam, DISC, g).poly
        plain = local_fourier(p, fam, DISC, K.element(K.carrier.zero)).poly
        assert len(twisted) <= len(plain)
        for e, c in enumerate(twisted):
            bound = plain[e].rational_value()
            value_sq = (c * c.conjugate())
            assert value_sq.is_rational()
            assert value_sq.rational_value() <= bound * bound
        checked += 1


def test_untwisted_coefficients_nonnegative_rational():
    for fam in (full_family(2), full_family(3), full_family(4), example_d1mod4_family()):
        spec, _ = mb_main_term(fam, DISC)
        polys = [poly for _, poly in spec.exceptional]
        polys += list(spec.as_frobenian().classes().values())
        for poly in polys:
            for c in poly:
                assert c.is_rational() and c.rational_value() >= 0


def test_support_vanishing_off_dual_support():
    """For coset-union families the twisted product vanishes unless the
    class is supported inside the irregular set."""
    fam = box_family(2, {3: "full", OO: "full"})
    g = GlobalKummerClass.from_rational(5, 2)  # 5 outside {2, 3, oo}
    spec = dual_series(fam, DISC, g)
    assert poly_is_zero(spec.factor_at(5))
    series = expand(spec, 50)
    assert all(series[k].is_zero() for k in range(1, 51))


def test_subgroup_collapse():
    """When L_p is a subgroup, the factor evaluated at x = 1 is |L_p|/n on
    the annihilator and 0 off it."""
    fam = unramified_family(2)
    K = local_group(7, 2, SIDE_KUMMER)
    on = local_fourier(7, fam, DISC, K.element((0, 1, 0))).poly
    off = local_fourier(7, fam, DISC, K.element((1, 0, 0))).poly
    total_on = sum((c for c in on), rat(2, 0))
    total_off = sum((c for c in off), rat(2, 0))
    assert total_on.rational_value() == Fraction(2, 2)
    assert total_off.is_zero()


def test_mb_main_term_singularities():
    assert mb_main_term(full_family(2), DISC)[1] == (1, 1)
    assert mb_main_term(example_d1mod4_family(), DISC)[1] == (1, Fraction(1, 2))
    assert mb_main_term(full_family(3), DISC)[1] == (Fraction(1, 2), 1)
    assert mb_main_term(full_family(2), radical_ordering())[1] == (1, 1)
    assert mb_main_term(full_family(4), radical_ordering())[1] == (1, 2)


def test_poisson_box_families():
    cases = [
        (box_family(2, {3: "full", OO: "full"}), [1, 3]),
        (unramified_family(2), [1]),
        (box_family(2, {OO: "zero"}), [1]),
    ]
    for fam, support in cases:
        rep = poisson_check(fam, DISC, 120)
        assert rep.verified, fam.name
        actual = [k for k in range(1, 121) if not rep.direct[k].is_zero()]
        assert actual == support


def test_poisson_full_odd_and_coset_union_at_two():
    fam = box_family(2, {2: "unramified", OO: "full"}, generic="full")
    rep = poisson_check(fam, DISC, 300)
    assert rep.verified
    fam = box_family(
        2,
        {2: ((0, 0, 0), (1, 0, 0), (0, 1, 0), (1, 1, 0)), OO: "full"},
    )
    rep = poisson_check(fam, DISC, 200)
    assert rep.verified
    assert [k for k in range(1, 201) if not rep.direct[k].is_zero()] == [1, 4]


def test_poisson_example_family_small():
    rep = poisson_check(example_d1mod4_family(), DISC, 250)
    assert rep.verified
    # squarefree D = 1 mod 4 with every (D/p) a square mod p
    assert not rep.direct[5].is_zero()
    assert rep.direct[21].is_zero()  # 3 is not a square mod 7
    assert not rep.direct[1].is_zero()


def test_poisson_subgroup_exceptional_condition():
    # an explicit subgroup at one place is a legitimate coset-union family
    fam = box_family(2, {5: ((0, 0, 0), (0, 1, 0)), OO: "full"})
    rep = poisson_check(fam, DISC, 80)
    assert rep.verified
    assert [k for k in range(1, 81) if not rep.direct[k].is_zero()] == [1, 5]


def test_poisson_not_eligible():
    """The nonperiodic path only covers the built-in example family."""
    from cocount.families import ConditionFamily, ramified_quadratic_uniformizer_rule

    fam = ConditionFamily(
        2,
        ramified_quadratic_uniformizer_rule(),
        ((2, "unramified"), (OO, "zero")),
        name="example-variant",
    )
    with pytest.raises(NotEligibleError):
        poisson_check(fam, DISC, 50)


def test_poisson_n3_with_division_breaking_ordering():
    """An ordering that separates inertia generators inside one division
    still satisfies the summation identity (the point of dropping the
    constancy hypothesis)."""
    ordering = custom_ordering(3, 3, {(1, 1, 0): 1, (1, 2, 0): 2})
    from cocount.orderings import is_constant_on_divisions

    assert not is_constant_on_divisions(ordering, 3)
    rep = poisson_check(full_family(3), ordering, 60)
    assert rep.verified
    assert rep.scalar_ratio == 3


def test_poisson_n3_disc():
    rep = poisson_check(full_family(3), DISC, 150)
    assert rep.verified
    assert not rep.direct[49].is_zero()


def test_poisson_n4_ratio_and_identity():
    rep = poisson_check(unramified_family(4), DISC, 40)
    assert rep.verified and rep.scalar_ratio == 2
    rep = poisson_check(box_family(4, {3: "full", OO: "full"}), DISC, 40)
    assert rep.verified
    assert [k for k in range(1, 41) if not rep.direct[k].is_zero()] == [1, 9]


def test_conditional_inner_series_stabilizes_nonzero():
    """The character-twisted squarefree series of the example family is
    numerically convergent and visibly nonzero at s = 1."""
    from cocount.euler import EulerProductSpec, evaluate
    from cocount.poisson import TwistedFactorProvider

    one = rat(2, 1)
    fam = example_d1mod4_family()
    for gv in (5, 13):
        g = GlobalKummerClass.from_rational(gv, 2)
        provider = TwistedFactorProvider(fam, DISC, g)
        spec = EulerProductSpec(2, provider, ((2, (one,)), (gv, (one,))), one)
        partials = evaluate(spec, 1, 0, mode="conditional", truncation=12000)
        tail = [p.real for p in partials[5999:]]
        assert max(tail) - min(tail) < 0.02
        assert abs(tail[-1]) > 0.1


def test_poisson_threads_match():
    fam = box_family(2, {3: "full", 5: "full", OO: "full"})
    seq = poisson_check(fam, DISC, 400)
    par = poisson_check(fam, DISC, 400, threads=2)
    assert seq.verified and par.verified
    assert seq.render() == par.render()


def test_poisson_report_render():
    rep = poisson_check(box_family(2, {3: "full", OO: "full"}), DISC, 10)
    lines = rep.render().splitlines()
    assert lines[0] == "index,direct,dual,match"
    assert "1,1,1,1" in lines and "3,1,1,1" in lines


def test_gw_spec_examples():
    r = greenberg_wiles_check(2, {3: "full", 2: "unramified", OO: "full"})
    assert (r.selmer_size, r.dual_selmer_size) == (2, 1)
    assert r.lhs == r.rhs == 2
    r = greenberg_wiles_check(2, {OO: "zero"})
    assert (r.selmer_size, r.dual_selmer_size) == (1, 2)
    assert r.lhs == r.rhs == Fraction(1, 2)
    r = greenberg_wiles_check(2, {5: "full", OO: "full"})
    assert (r.selmer_size, r.dual_selmer_size) == (2, 1)
    assert r.lhs == r.rhs == 2


def test_gw_rejects_non_subgroup():
    # {0, (0,1,0), (1,1,0)} is not closed: the two ramified classes sum to
    # the unramified frobenius class
    with pytest.raises(ValueError):
        greenberg_wiles_check(2, {5: ((0, 0, 0), (0, 1, 0), (1, 1, 0))})


def test_gw_randomized_boxes():
    from cocount.poisson import random_subgroup_box

    rng = random.Random(99)
    for _ in range(40):
        n = rng.choice([2, 3, 4])
        box = random_subgroup_box(n, rng)
        report = greenberg_wiles_check(n, box)
        assert report.equal, (n, box, report.lhs, report.rhs)


def test_dual_series_example_prefactor_shape():
    """For the example family the twisted product's coefficient at its own
    support index is +-(1/2)^(number of prime factors)."""
    fam = example_d1mod4_family()
    for gv, omega in ((5, 1), (15, 2), (105, 3)):
        g = GlobalKummerClass.from_rational(gv, 2)
        series = expand(dual_series(fam, DISC, g), gv)
        val = series[gv].rational_value()
        assert abs(val) == Fraction(1, 2**omega), (gv, val)
        for k in range(1, gv):
            if not series[k].is_zero():
                assert k % min(p for p, _ in g.exponents) == 0
