from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from singlecell.exact import (DomainError, RatInterval, format_rational, interval_add,
                              interval_midpoint, interval_mul, parse_rational, rat_normalize)

F = Fraction
rationals = st.fractions(max_denominator=50).filter(lambda q: abs(q) < 1000)


@pytest.mark.parametrize("n,d,expected", [(2, 4, F(1, 2)), (-1, -2, F(1, 2)), (0, 7, F(0))])
def test_rat_normalize(n, d, expected):
    q = rat_normalize(n, d)
    assert q == expected and q.denominator > 0


def test_rat_normalize_zero_denominator():
    with pytest.raises(DomainError):
        rat_normalize(1, 0)


def test_zero_is_canonical():
    q = rat_normalize(0, 7)
    assert (q.numerator, q.denominator) == (0, 1)


@pytest.mark.parametrize("a,b,expected", [
    ((-1, 2), (3, 4), (-4, 8)),
    ((0, 0), (5, 9), (0, 0)),
    ((1, 2), (1, 2), (1, 4)),
])
def test_interval_mul(a, b, expected):
    r = interval_mul(RatInterval(F(a[0]), F(a[1])), RatInterval(F(b[0]), F(b[1])))
    assert (r.lo, r.hi) == expected


def test_interval_midpoint():
    assert interval_midpoint(RatInterval(F(1), F(3))) == 2
    assert interval_midpoint(RatInterval(F(1, 3), F(2, 3))) == F(1, 2)
    assert interval_midpoint(RatInterval.exact(5)) == 5


def test_interval_rejects_empty():
    with pytest.raises(DomainError):
        RatInterval(F(2), F(1))
    with pytest.raises(DomainError):
        RatInterval(F(1), F(2), True)


@pytest.mark.parametrize("text,value", [("3", F(3)), ("-7/10", F(-7, 10)), ("-0.75", F(-3, 4)),
                                        (" 4/8 ", F(1, 2))])
def test_parse_rational(text, value):
    assert parse_rational(text) == value


@pytest.mark.parametrize("text", ["", "1/0", "abc", "1.2.3"])
def test_parse_rational_errors(text):
    with pytest.raises(ValueError):
        parse_rational(text)


@given(rationals)
def test_format_parse_round_trip(q):
    text = format_rational(q)
    assert "." not in text
    assert parse_rational(text) == q


@given(st.integers(-10**30, 10**30), st.integers(1, 10**30),
       st.integers(-10**30, 10**30), st.integers(1, 10**30))
def test_product_normalizes_two_ways(a, b, c, d):
    cross = rat_normalize(a * c, b * d)
    factored = rat_normalize(a, b) * rat_normalize(c, d)
    assert cross == factored
    assert (cross.numerator, cross.denominator) == (factored.numerator, factored.denominator)


@given(st.lists(rationals, min_size=4, max_size=4), st.data())
def test_interval_mul_is_conservative(ends, data):
    A = RatInterval(min(ends[:2]), max(ends[:2]))
    B = RatInterval(min(ends[2:]), max(ends[2:]))
    prod = interval_mul(A, B)
    total = interval_add(A, B)
    for _ in range(10):
        ta = data.draw(st.fractions(0, 1, max_denominator=20))
        tb = data.draw(st.fractions(0, 1, max_denominator=20))
        a = A.lo + ta * A.width
        b = B.lo + tb * B.width
        assert a * b in prod
        assert a + b in total
