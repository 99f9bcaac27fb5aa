"""The real projective line R u {oo}: cyclic order and projective roots."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
from itertools import combinations
from typing import Sequence, Union

from sympy.polys.domains import QQ
from sympy.polys.sqfreetools import dup_sqf_list

from .exact import DomainError, to_rational
from .poly import Polynomial, univariate_coeffs
from .realroots import AlgebraicValue, compare, isolate


@dataclass(frozen=True)
class ProjPoint:
    """A finite value (Fraction or AlgebraicValue) or the point at infinity."""

    value: Union[Fraction, AlgebraicValue, None] = None

    @property
    def is_infinite(self) -> bool:
        return self.value is None

    def __repr__(self):
        return "INF" if self.value is None else f"Finite({self.value!r})"


INF = ProjPoint(None)


def finite(x) -> ProjPoint:
    if isinstance(x, AlgebraicValue):
        return ProjPoint(x)
    return ProjPoint(to_rational(x))


def _as_alg(x):
    if isinstance(x, AlgebraicValue):
        return x
    return AlgebraicValue((-x.numerator, x.denominator), x, x, True, 1)


def extended_cmp(a: ProjPoint, b: ProjPoint) -> int:
    """Total order on R u {oo} with every real below oo."""
    if a.is_infinite or b.is_infinite:
        return (a.is_infinite) - (b.is_infinite)
    x, y = a.value, b.value
    if isinstance(x, Fraction) and isinstance(y, Fraction):
        return (x > y) - (x < y)
    return compare(_as_alg(x), _as_alg(y))


def cyclic3(t1: ProjPoint, t2: ProjPoint, t3: ProjPoint) -> bool:
    """[t1, t2, t3]: a<b<c or b<c<a or c<a<b in the extended order."""
    c12, c23, c31 = extended_cmp(t1, t2), extended_cmp(t2, t3), extended_cmp(t3, t1)
    if c12 == 0 or c23 == 0 or c31 == 0:
        raise DomainError("cyclic order needs pairwise distinct points")
    # exactly one of the three consecutive comparisons goes "down" in a cyclic triple
    return (c12 < 0) + (c23 < 0) + (c31 < 0) == 2


def cyclic_chain(ts: Sequence[ProjPoint]) -> bool:
    """[t1, ..., tk]: cyclic3 for every index-increasing triple."""
    if len(ts) < 3:
        raise DomainError("a cyclic chain needs at least three points")
    for a, b in combinations(ts, 2):
        if extended_cmp(a, b) == 0:
            raise DomainError("cyclic chain needs pairwise distinct points")
    return all(cyclic3(a, b, c) for a, b, c in combinations(ts, 3))


def projective_roots(p, d: int) -> list[tuple[ProjPoint, int]]:
    """Real roots of H^d(p) with multiplicities; oo carries d - deg(p)."""
    if isinstance(p, Polynomial):
        if p.is_zero():
            raise DomainError("zero polynomial")
        coeffs = univariate_coeffs(p, p.level or 1)
    else:
        coeffs = [to_rational(c) for c in p]
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs = coeffs[:-1]
    if len(coeffs) == 1 and coeffs[0] == 0:
        raise DomainError("zero polynomial")
    deg = len(coeffs) - 1
    if d < deg:
        raise DomainError(f"reference degree {d} below the degree {deg}")
    out: list[tuple[ProjPoint, int]] = []
    if deg > 0:
        for factor, mult in _yun(coeffs):
            for root in isolate(factor):
                out.append((ProjPoint(root.value if root.exact else root), mult))
        out.sort(key=cmp_to_key(lambda a, b: extended_cmp(a[0], b[0])))
    if d > deg:
        out.append((INF, d - deg))
    return out


def _yun(coeffs):
    _, factors = dup_sqf_list([QQ(c.numerator, c.denominator) for c in reversed(coeffs)], QQ)
    return [([Fraction(int(x.numerator), int(x.denominator)) for x in reversed(f)], k)
            for f, k in factors]

