"""Real root isolation over Q and exact comparison of real algebraic numbers.

Isolation is Descartes' rule of signs with bisection (Collins-Akritas) on
integer polynomials: the interval (-B, B) for a power-of-two Cauchy bound B
is mapped onto (0, 1), and each subinterval is tested by counting sign
variations of (x+1)^n q(1/(x+1)).  Every step is integer arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from sympy.polys.domains import ZZ
from sympy.polys.euclidtools import dup_gcd
from sympy.polys.sqfreetools import dup_sqf_part

from .exact import DomainError, RatInterval, to_rational
from .poly import Polynomial, univariate_coeffs

LESS, EQUAL, GREATER = -1, 0, 1


# integer univariate helpers (coefficients low -> high) ------------------------

def _trim(c: list) -> list:
    while len(c) > 1 and c[-1] == 0:
        c.pop()
    return c


def _primitive_int(coeffs: Sequence) -> tuple:
    fr = [to_rational(c) for c in coeffs]
    den = 1
    for c in fr:
        den = den * c.denominator // math.gcd(den, c.denominator)
    ints = _trim([int(c * den) for c in fr])
    g = 0
    for c in ints:
        g = math.gcd(g, c)
    if g == 0:
        raise DomainError("zero polynomial")
    if ints[-1] < 0:
        g = -g
    return tuple(c // g for c in ints)


def _sqf_int(c: tuple) -> tuple:
    if len(c) <= 2:
        return c
    part = dup_sqf_part([ZZ(x) for x in reversed(c)], ZZ)
    return _primitive_int([int(x) for x in reversed(part)])


def _eval_sign(c: Sequence[int], r: Fraction) -> int:
    """Sign of the integer polynomial at the rational ``r`` (homogeneous Horner)."""
    p, q = r.numerator, r.denominator
    n = len(c) - 1
    acc = c[n]
    qpow = 1
    for i in range(n - 1, -1, -1):
        qpow *= q
        acc = acc * p + c[i] * qpow
    return (acc > 0) - (acc < 0)


def _taylor_shift(c: list, t: int) -> list:
    """Coefficients of q(x + t)."""
    c = list(c)
    n = len(c) - 1
    if t == 0:
        return c
    for i in range(n):
        for j in range(n - 1, i - 1, -1):
            c[j] += t * c[j + 1]
    return c


def _scale(c: list, s: int) -> list:
    """Coefficients of q(s x)."""
    out = []
    pw = 1
    for a in c:
        out.append(a * pw)
        pw *= s
    return out


def _halve(c: list) -> list:
    """Coefficients of 2^n q(x / 2)."""
    n = len(c) - 1
    return [a << (n - i) for i, a in enumerate(c)]


def _sign_variations(c: Sequence[int]) -> int:
    count = 0
    last = 0
    for a in c:
        if a:
            s = 1 if a > 0 else -1
            if last and s != last:
                count += 1
            last = s
    return count


def _descartes01(c: list) -> int:
    """Upper bound (exact when 0 or 1) on the roots of q in (0, 1)."""
    return _sign_variations(_taylor_shift(list(reversed(c)), 1))


def _deflate_half(c: list) -> list:
    """Divide q by (2x - 1) exactly."""
    # q(x) = (2x - 1) r(x); solve from the top coefficient down
    n = len(c) - 1
    r = [0] * n
    rem = c[n]
    for i in range(n - 1, -1, -1):
        if rem % 2:
            raise DomainError("inexact deflation")
        r[i] = rem // 2
        rem = c[i] + r[i]
    if rem != 0:
        raise DomainError("inexact deflation")
    return r


def cauchy_bound_pow2(c: Sequence[int]) -> int:
    lead = abs(c[-1])
    m = max((abs(a) for a in c[:-1]), default=0)
    bound = 1 + -(-m // lead)
    return 1 << max(bound - 1, 0).bit_length()


# algebraic values ------------------------------------------------------------

@dataclass(frozen=True)
class AlgebraicValue:
    """Root ``index`` (1-based) of the squarefree integer polynomial ``coeffs``.

    For non-exact values the root is the unique root in the open (lo, hi) and
    the polynomial is nonzero with opposite signs at both endpoints.
    """

    coeffs: tuple
    lo: Fraction
    hi: Fraction
    exact: bool
    index: int

    @property
    def interval(self) -> RatInterval:
        return RatInterval(self.lo, self.hi, self.exact)

    @property
    def defining(self) -> Polynomial:
        return Polynomial(1, {(k,): a for k, a in enumerate(self.coeffs) if a})

    @property
    def value(self) -> Fraction:
        if not self.exact:
            raise DomainError("value is not a known rational")
        return self.lo

    def __repr__(self):
        if self.exact:
            return f"AlgebraicValue(={self.lo})"
        return f"AlgebraicValue(#{self.index} in ({self.lo}, {self.hi}))"


def _as_int_coeffs(p) -> tuple:
    if isinstance(p, Polynomial):
        if p.is_zero():
            raise DomainError("zero polynomial has no isolated roots")
        lvl = p.level or 1
        return _primitive_int(univariate_coeffs(p, lvl))
    return _primitive_int(p)


def isolate(p, detect_rational: bool = True, hints: Sequence = ()) -> list[AlgebraicValue]:
    """Isolate the distinct real roots of a univariate polynomial.

    ``p`` may be a univariate :class:`Polynomial` or dense coefficients (low
    to high).  It is made primitive and squarefree first.  Rational numbers in
    ``hints`` that are roots are always reported as exact points; with
    ``detect_rational`` every rational root is.
    """
    c = _sqf_int(_as_int_coeffs(p))
    hints = tuple(sorted({to_rational(h) for h in hints}))
    return list(_isolate_cached(c, detect_rational, hints))


@lru_cache(maxsize=20000)
def _isolate_cached(c: tuple, detect_rational: bool, hints: tuple) -> tuple:
    n = len(c) - 1
    if n == 0:
        return ()
    found: list = []  # (lo, hi, exact)
    work = list(c)
    for h in hints:
        if _eval_sign(c, h) == 0:
            found.append((h, h, True))
            work = _divide_linear(work, h)
    if len(work) > 1:
        B = cauchy_bound_pow2(c)
        # q(x) = p(B (2x - 1)) maps (0, 1) onto (-B, B)
        q = _scale(_taylor_shift(work, -B), 2 * B)
        stack = [(q, Fraction(-B), Fraction(2 * B))]
        while stack:
            q, a, w = stack.pop()
            if len(q) == 1:
                continue
            v = _descartes01(q)
            if v == 0:
                continue
            if v == 1:
                found.append((a, a + w, False))
                continue
            left = _halve(q)
            right = _taylor_shift(left, 1)
            mid = a + w / 2
            if right[0] == 0:
                found.append((mid, mid, True))
                left = _deflate_half(q)
                left = _halve(left)
                right = _taylor_shift(left, 1)
            stack.append((left, a, w / 2))
            stack.append((right, mid, w / 2))
    hit = [lo for lo, _, exact in found if exact and lo in hints]
    if hit:
        # intervals isolate w.r.t. the deflated polynomial only; push hint roots out
        found = [t if t[2] else _exclude(work, t[0], t[1], hit) for t in found]
    found.sort(key=lambda t: t[0])
    out = []
    for k, (lo, hi, exact) in enumerate(found, start=1):
        if not exact:
            lo, hi, exact = _clear_endpoints(c, lo, hi)
            if detect_rational and not exact:
                r = _rational_in(c, lo, hi)
                if r is not None:
                    lo = hi = r
                    exact = True
        if exact:
            out.append(AlgebraicValue(c, lo, hi, True, k))
        else:
            out.append(AlgebraicValue(c, lo, hi, False, k))
    return tuple(out)


def _exclude(work: list, lo: Fraction, hi: Fraction, points: list):
    """Bisect the single root of ``work`` in (lo, hi) until no point lies in [lo, hi]."""
    lo, hi, exact = _clear_endpoints(tuple(work), lo, hi)
    while not exact and any(lo <= x <= hi for x in points):
        mid = (lo + hi) / 2
        sm = _eval_sign(work, mid)
        if sm == 0:
            return mid, mid, True
        if _eval_sign(work, lo) != sm:
            hi = mid
        else:
            lo = mid
    return lo, hi, exact


def _divide_linear(c: list, r: Fraction) -> list:
    """Integer quotient of q by (den x - num) where q(r) = 0."""
    num, den = r.numerator, r.denominator
    n = len(c) - 1
    out = [0] * n
    rem = c[n]
    for i in range(n - 1, -1, -1):
        out[i] = rem // den
        rem = c[i] + out[i] * num
    return out


def _clear_endpoints(c: tuple, lo: Fraction, hi: Fraction):
    """Shrink (lo, hi) so that neither endpoint is a root of ``c``."""
    while _eval_sign(c, lo) == 0 or _eval_sign(c, hi) == 0:
        # the only root of c strictly inside is the isolated one; bisect
        # towards it using the cofactor that hides the endpoint roots
        red = list(c)
        for e in (lo, hi):
            if _eval_sign(red, e) == 0:
                red = _divide_linear(red, e)
        mid = (lo + hi) / 2
        sm = _eval_sign(red, mid)
        if sm == 0:
            return mid, mid, True
        if _eval_sign(red, lo) != sm:
            hi = mid
        else:
            lo = mid
    return lo, hi, False


def _rational_in(c: tuple, lo: Fraction, hi: Fraction):
    """The rational root of ``c`` in (lo, hi), if its isolated root is rational."""
    lead = abs(c[-1])
    slo = _eval_sign(c, lo)
    # a rational root has the form m / lead; shrink below grid spacing
    while (hi - lo) * lead >= 1:
        mid = (lo + hi) / 2
        sm = _eval_sign(c, mid)
        if sm == 0:
            return mid
        if sm == slo:
            lo = mid
        else:
            hi = mid
    m = math.floor(lo * lead) + 1
    cand = Fraction(m, lead)
    if lo < cand < hi and _eval_sign(c, cand) == 0:
        return cand
    return None


def refine(a: AlgebraicValue, width) -> AlgebraicValue:
    """Bisect until the isolating interval has width at most ``width``."""
    width = to_rational(width)
    if width <= 0:
        raise DomainError("width must be positive")
    if a.exact:
        return a
    lo, hi = a.lo, a.hi
    slo = _eval_sign(a.coeffs, lo)
    while hi - lo > width:
        mid = (lo + hi) / 2
        sm = _eval_sign(a.coeffs, mid)
        if sm == 0:
            return replace(a, lo=mid, hi=mid, exact=True)
        if sm == slo:
            lo = mid
        else:
            hi = mid
    return replace(a, lo=lo, hi=hi)


def _bisect_once(a: AlgebraicValue) -> AlgebraicValue:
    return refine(a, (a.hi - a.lo) / 2)


def sign_at_rational(p, r) -> int:
    r = to_rational(r)
    if isinstance(p, Polynomial):
        coeffs = univariate_coeffs(p, p.level or 1)
    else:
        coeffs = [to_rational(x) for x in p]
    total = sum(cf * r ** k for k, cf in enumerate(coeffs))
    return (total > 0) - (total < 0)


def _compare_rational(r: Fraction, b: AlgebraicValue) -> int:
    """Order of the rational ``r`` relative to ``b``."""
    if b.exact:
        return (r > b.lo) - (r < b.lo)
    if r <= b.lo:
        return LESS
    if r >= b.hi:
        return GREATER
    s = _eval_sign(b.coeffs, r)
    if s == 0:
        return EQUAL
    # b's root lies on the side of r where the sign differs from s
    return LESS if s == _eval_sign(b.coeffs, b.lo) else GREATER


@lru_cache(maxsize=50000)
def _int_gcd(a: tuple, b: tuple) -> tuple:
    g = dup_gcd([ZZ(x) for x in reversed(a)], [ZZ(x) for x in reversed(b)], ZZ)
    return tuple(int(x) for x in reversed(g))


def compare(a: AlgebraicValue, b: AlgebraicValue) -> int:
    """Exact order: LESS, EQUAL or GREATER."""
    if a.exact:
        return _compare_rational(a.lo, b)
    if b.exact:
        return -_compare_rational(b.lo, a)
    if a.coeffs == b.coeffs:
        return (a.index > b.index) - (a.index < b.index)
    g = None
    while True:
        if a.exact or b.exact:
            return compare(a, b)
        if a.hi <= b.lo:
            return LESS
        if b.hi <= a.lo:
            return GREATER
        if g is None:
            g = _int_gcd(a.coeffs, b.coeffs)
        if len(g) > 1:
            lo, hi = max(a.lo, b.lo), min(a.hi, b.hi)
            # g divides both, so it is nonzero at every endpoint; it has at
            # most one root in the overlap, which then is the common value
            if lo < hi and _eval_sign(g, lo) * _eval_sign(g, hi) < 0:
                return EQUAL
        a, b = _bisect_once(a), _bisect_once(b)


def exact_rational(a: AlgebraicValue):
    """The value as a Fraction when it is rational, else None."""
    if a.exact:
        return a.lo
    return _rational_in(a.coeffs, a.lo, a.hi)


def rational_between(a: AlgebraicValue, b: AlgebraicValue) -> tuple[AlgebraicValue, AlgebraicValue]:
    """Refine ``a < b`` until ``a.hi < b.lo`` (so any rational in between works)."""
    while a.hi >= b.lo:
        if not a.exact:
            a = _bisect_once(a)
        if not b.exact:
            b = _bisect_once(b)
        if a.exact and b.exact and a.lo >= b.lo:
            raise DomainError("values are not strictly ordered")
    return a, b
