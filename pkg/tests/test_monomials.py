import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from conftest import box_colength, box_quotient_length, in_ideal, staircases
from reesmult.errors import ArityMismatch, ContextMismatch, InfiniteLength, ParseError, UnknownVariable
from reesmult.monomials import (
    RingContext, colength, colon_by_monomial, contains, filtration_length, ideal_sum, is_m_primary,
    is_subset, minimalize, parse_monomial, power, product, quotient_length,
)


def test_minimalize_prunes_multiples(r2):
    assert set(minimalize(r2, [(2, 0), (2, 1), (0, 1)]).gens) == {(2, 0), (0, 1)}
    assert minimalize(r2, []).is_zero
    assert minimalize(r2, [(0, 0), (1, 0)]).is_unit


def test_sum_examples(r2):
    assert r2.ideal("x^2", "x*y", "y^2") + r2.ideal("x") == r2.ideal("x", "y^2")
    a = r2.ideal("x^2", "y^3")
    assert a + r2.zero_ideal() == a
    assert ideal_sum(r2.ideal("x^2"), r2.ideal("y^3")) == a


def test_product_examples(r2):
    assert r2.ideal("x") * r2.ideal("y") == r2.ideal("x*y")
    assert product(r2.ideal("x^2", "y"), r2.ideal("x", "y^3")) == r2.ideal("x^3", "x*y", "y^4")
    m = r2.maximal_ideal()
    assert m * m == r2.ideal("x^2", "x*y", "y^2")


def test_power_examples(r2):
    assert power(r2.maximal_ideal(), 2) == r2.ideal("x^2", "x*y", "y^2")
    assert power(r2.ideal("x^2", "y^3"), 2) == r2.ideal("x^4", "x^2*y^3", "y^6")
    assert power(r2.ideal("x^2", "y^3"), 0).is_unit


def test_colon_examples(r2):
    a = r2.ideal("x^2", "y^3")
    assert colon_by_monomial(a, (1, 1)) == r2.ideal("x", "y^2")
    assert a.colon(r2.unit) == a
    assert colon_by_monomial(r2.ideal("x"), (1, 0)).is_unit


def test_membership_examples(r2):
    assert contains(r2.ideal("x"), (1, 1))
    assert not contains(r2.ideal("x^2"), (1, 0))
    assert (2, 3) in r2.ideal("x^2", "y^3")


def test_m_primary_examples(r2):
    assert is_m_primary(r2.ideal("x^2", "y^3"))
    assert not is_m_primary(r2.ideal("x"))
    assert is_m_primary(r2.maximal_ideal())
    assert not is_m_primary(r2.zero_ideal())


def test_colength_examples(r2):
    assert colength(r2.maximal_ideal()) == 1
    assert colength(r2.ideal("x^2", "x*y", "y^3")) == 4
    with pytest.raises(InfiniteLength):
        colength(r2.ideal("x"))
    assert colength(r2.unit_ideal()) == 0


def test_quotient_length_examples(r2):
    a, b = r2.ideal("x^2", "x*y"), r2.ideal("x^3", "x^2*y", "x*y^2")
    assert quotient_length(a, b) == 2
    assert quotient_length(a, a) == 0
    assert quotient_length(r2.maximal_ideal(), power(r2.maximal_ideal(), 2)) == 2


def test_quotient_length_requires_containment(r2):
    with pytest.raises(Exception) as info:
        quotient_length(r2.ideal("x^2"), r2.ideal("x"))
    assert info.value.code == "NotContained"


def test_quotient_length_infinite(r2):
    with pytest.raises(InfiniteLength):
        quotient_length(r2.ideal("x"), r2.ideal("x^2"))


def test_parse_errors(r2):
    with pytest.raises(ParseError):
        parse_monomial(r2, "x^-1")
    with pytest.raises(UnknownVariable):
        parse_monomial(r2, "z^2")
    with pytest.raises(ParseError):
        parse_monomial(r2, "x^")
    assert parse_monomial(r2, "1") == (0, 0)
    assert parse_monomial(r2, "x^2*y") == (2, 1)


def test_format_round_trip(r3):
    for u in itertools.product(range(3), repeat=3):
        assert r3.parse(r3.format(u)) == u


def test_context_mismatch(r2, r3):
    with pytest.raises((ContextMismatch, ArityMismatch)):
        r2.maximal_ideal() + r3.maximal_ideal()


# -- properties -------------------------------------------------------------------

@settings(max_examples=60, deadline=None)
@given(staircases(dim=2, max_exp=7))
def test_colength_matches_box_count_d2(ideal):
    assert colength(ideal) == box_colength(ideal)


@settings(max_examples=40, deadline=None)
@given(staircases(dim=3, max_exp=5))
def test_colength_matches_box_count_d3(ideal):
    assert colength(ideal) == box_colength(ideal)


@settings(max_examples=40, deadline=None)
@given(staircases(dim=2, max_exp=6), staircases(dim=2, max_exp=6))
def test_quotient_length_is_colength_difference(a, b):
    inner = a * b
    assert quotient_length(a, inner) == colength(inner) - colength(a)


@settings(max_examples=40, deadline=None)
@given(staircases(dim=3, max_exp=4), staircases(dim=3, max_exp=4))
def test_quotient_length_is_colength_difference_d3(a, b):
    inner = a * b
    assert quotient_length(a, inner) == colength(inner) - colength(a)


@settings(max_examples=40, deadline=None)
@given(staircases(dim=2, max_exp=5, m_primary=False), st.integers(1, 3))
def test_quotient_length_without_finite_colength(a, extra):
    """A/(A * m^k) has finite length even when A is not m-primary."""
    b = a * power(a.ctx.maximal_ideal(), extra)
    bound = max(max(g) for g in a.gens) + extra + 2
    assert quotient_length(a, b) == box_quotient_length(a, b, bound)


@settings(max_examples=40, deadline=None)
@given(staircases(dim=2, max_exp=5, m_primary=False), st.randoms(use_true_random=False))
def test_filtration_order_does_not_matter(a, rnd):
    b = a * a.ctx.maximal_ideal()
    extra = list(a.gens)
    rnd.shuffle(extra)
    assert filtration_length(a, b, order=extra) == filtration_length(a, b)


@settings(max_examples=60, deadline=None)
@given(staircases(dim=3, max_exp=4, m_primary=False),
       st.tuples(st.integers(0, 5), st.integers(0, 5), st.integers(0, 5)))
def test_membership_iff_colon_is_unit(a, u):
    assert contains(a, u) == a.colon(u).is_unit
    assert contains(a, u) == in_ideal(a.gens, u)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 5), st.integers(0, 5), st.integers(0, 5)), max_size=8))
def test_minimal_generators_are_antichain(gens):
    ctx = RingContext.standard(3)
    a = minimalize(ctx, gens)
    for g, h in itertools.permutations(a.gens, 2):
        assert not all(x <= y for x, y in zip(g, h))
    for u in gens:
        assert contains(a, u)


@settings(max_examples=30, deadline=None)
@given(staircases(dim=2, max_exp=4))
def test_powers_descend(a):
    for n in range(4):
        assert is_subset(power(a, n + 1), power(a, n))
        assert colength(power(a, n + 1)) > colength(power(a, n))


def test_random_colon_agrees_with_definition(r2):
    rng = random.Random(7)
    for _ in range(50):
        gens = [(rng.randint(0, 5), rng.randint(0, 5)) for _ in range(3)]
        a = minimalize(r2, gens)
        u = (rng.randint(0, 4), rng.randint(0, 4))
        c = a.colon(u)
        for v in itertools.product(range(8), repeat=2):
            assert contains(c, v) == contains(a, (v[0] + u[0], v[1] + u[1]))
