"""Exact rationals and rational intervals.

Rationals are :class:`fractions.Fraction`, which is already canonical
(positive denominator, reduced).  Nothing in the package touches floats.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

Rational = Fraction


class DomainError(ValueError):
    """Raised when an operation is applied outside its mathematical domain."""


def rat_normalize(n: int, d: int) -> Fraction:
    if d == 0:
        raise DomainError("zero denominator")
    return Fraction(n, d)


def to_rational(value) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def parse_rational(text: str) -> Fraction:
    """Parse ``"p"``, ``"p/q"`` or a finite decimal such as ``"-0.75"``."""
    s = text.strip()
    if not s:
        raise ValueError("empty rational literal")
    try:
        if "/" in s:
            num, den = s.split("/", 1)
            return rat_normalize(int(num), int(den))
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        if isinstance(exc, DomainError):
            raise
        raise ValueError(f"invalid rational literal {text!r}") from None


def format_rational(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class RatInterval:
    """Closed rational interval ``[lo, hi]``; ``point`` marks an exact value.

    Isolating intervals are read as open (lo, hi) unless ``point`` is set.
    """

    lo: Fraction
    hi: Fraction
    point: bool = False

    def __post_init__(self):
        if self.lo > self.hi:
            raise DomainError(f"empty interval [{self.lo}, {self.hi}]")
        if self.point and self.lo != self.hi:
            raise DomainError("exact point needs lo == hi")

    @classmethod
    def exact(cls, q) -> "RatInterval":
        q = to_rational(q)
        return cls(q, q, True)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def __contains__(self, q) -> bool:
        return self.lo <= q <= self.hi


def interval_mul(a: RatInterval, b: RatInterval) -> RatInterval:
    products = (a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi)
    lo, hi = min(products), max(products)
    return RatInterval(lo, hi, a.point and b.point)


def interval_add(a: RatInterval, b: RatInterval) -> RatInterval:
    return RatInterval(a.lo + b.lo, a.hi + b.hi, a.point and b.point)


def interval_midpoint(a: RatInterval) -> Fraction:
    return (a.lo + a.hi) / 2
