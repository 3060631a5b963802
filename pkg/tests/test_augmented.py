"""Ordering and serialization of the four-component exponent values."""

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from cubearc.augmented import (AugmentedExponent, DELTA_CAP, DELTA_LOW, EPS,
                               ZERO, as_exponent, encode_rational,
                               max_exponent, min_exponent, parse_rational)

rationals = st.fractions(
    min_value=Fraction(-50), max_value=Fraction(50), max_denominator=64)


def exponents():
    return st.builds(AugmentedExponent, rationals, rationals, rationals,
                     rationals)


def test_constants_are_infinitesimal_ladder():
    assert ZERO == AugmentedExponent(0, 0, 0, 0)
    # one capital-delta dominates any number of lower-order terms
    assert DELTA_CAP > DELTA_LOW.scale(1000) + EPS.scale(1000)
    assert DELTA_LOW > EPS.scale(1000)
    assert EPS > ZERO
    assert as_exponent(Fraction(1, 10 ** 9)) > DELTA_CAP.scale(1000)


def test_lexicographic_order_examples():
    assert as_exponent(Fraction(127, 16)) < as_exponent(8)
    assert as_exponent(8) + DELTA_CAP.scale(Fraction(-1, 8)) < as_exponent(8)
    low = as_exponent(8) - DELTA_LOW.scale(Fraction(1, 99))
    assert low < as_exponent(8) - EPS


@given(exponents(), exponents(), exponents())
def test_order_is_total_and_translation_invariant(a, b, c):
    assert (a < b) + (a == b) + (b < a) == 1
    if a < b:
        assert a + c < b + c
    assert (a < b) == (a - b < ZERO)


@given(exponents(), exponents())
def test_addition_commutes_and_subtraction_inverts(a, b):
    assert a + b == b + a
    assert (a + b) - b == a


@given(exponents())
def test_scaling_distributes(a):
    assert a.scale(2) == a + a
    assert a.scale(Fraction(1, 2)) + a.scale(Fraction(1, 2)) == a
    assert a.scale(-1) == -a


@given(exponents())
def test_json_round_trip(a):
    assert AugmentedExponent.from_json(a.to_json()) == a


@given(rationals)
def test_rational_encode_parse_round_trip(x):
    enc = encode_rational(x)
    assert isinstance(enc, (int, str))
    assert parse_rational(enc) == x
    if x.denominator == 1:
        assert enc == int(x)


def test_parse_rational_refuses_floats():
    with pytest.raises(TypeError):
        parse_rational(0.5)
    assert parse_rational("11/20") == Fraction(11, 20)
    assert parse_rational(7) == 7


@given(st.lists(exponents(), min_size=1, max_size=8))
def test_max_min_agree_with_sorting(values):
    ordered = sorted(values)
    assert max_exponent(*values) == ordered[-1]
    assert min_exponent(*values) == ordered[0]


def test_little_o_uses_strict_order():
    assert (as_exponent(8) - EPS).is_little_o(8)
    assert not as_exponent(8).is_little_o(8)
    assert (as_exponent(8) + DELTA_CAP.scale(Fraction(-1, 8))).is_little_o(8)
