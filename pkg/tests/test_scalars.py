import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from quadtame.scalars import Infinity, QSqrt2, to_fraction

rats = st.fractions(min_value=-50, max_value=50, max_denominator=30)
qs = st.builds(QSqrt2, rats, rats)


def test_parse_forms():
    assert QSqrt2.parse("3/4") == QSqrt2(Fraction(3, 4))
    assert QSqrt2.parse("-1/2+3/5*r2") == QSqrt2(Fraction(-1, 2), Fraction(3, 5))
    assert QSqrt2.parse("1-2*r2") == QSqrt2(1, -2)
    assert QSqrt2.parse("-r2") == QSqrt2(0, -1)
    assert QSqrt2.parse("r2") == QSqrt2(0, 1)


@pytest.mark.parametrize("bad", ["", "abc", "1/", "r3", "2*r2*r2"])
def test_parse_rejects(bad):
    with pytest.raises(ValueError):
        QSqrt2.parse(bad)


@given(qs)
def test_string_round_trip(a):
    assert QSqrt2.parse(str(a)) == a


@given(qs, qs, qs)
def test_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert a - a == QSqrt2(0)
    if a != QSqrt2(0):
        assert a * (QSqrt2(1) / a) == QSqrt2(1)


@given(qs, qs)
def test_order_matches_reals(a, b):
    fa, fb = float(a), float(b)
    if abs(fa - fb) > 1e-9:
        assert (a < b) == (fa < fb)
    assert (a < b) + (a == b) + (b < a) == 1


def test_order_near_sqrt2():
    # 99/70 and 140/99 are continued-fraction neighbours of sqrt 2
    assert QSqrt2(Fraction(99, 70)) > QSqrt2(0, 1)
    assert QSqrt2(Fraction(140, 99)) < QSqrt2(0, 1)
    assert QSqrt2(Fraction(-99, 70), 1) < 0
    assert float(QSqrt2(1, 1)) == pytest.approx(1 + math.sqrt(2))


def test_rationality_and_conversion():
    assert QSqrt2(3, 0).is_rational()
    assert not QSqrt2(0, 1).is_rational()
    assert to_fraction(QSqrt2(Fraction(5, 3))) == Fraction(5, 3)
    with pytest.raises(ValueError):
        to_fraction(QSqrt2(0, 1))


def test_infinity_dominates():
    assert Infinity > QSqrt2(10 ** 9)
    assert QSqrt2(-3) < Infinity
    assert Infinity == Infinity
