"""Independent oracles and randomized checks of constructed cells.

Nothing here calls the sympy kernels used by the construction: resultants
are checked against a Sylvester determinant expanded over column subsets,
root counts against Sturm sequences, both in plain Fraction arithmetic.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Optional, Sequence

from .cellmodel import Cell, Section, bound_values, eval_chain
from .exact import DomainError, format_rational, to_rational
from .poly import Polynomial, coeffs, degree, univariate_coeffs
from .projline import cyclic_chain, extended_cmp
from .realroots import LESS, AlgebraicValue, compare, exact_rational, rational_between

GRID = 1 << 10


@dataclass
class VerifyReport:
    samples_tested: int = 0
    violations: list = field(default_factory=list)  # (point, poly, expected, observed)
    skipped_section_levels: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def as_dict(self, names: Optional[Sequence[str]] = None) -> dict:
        return {
            "samples_tested": self.samples_tested,
            "passed": self.passed,
            "violations": [{
                "point": [format_rational(x) for x in point],
                "poly": None if p is None else p.to_text(names),
                "expected": expected,
                "observed": observed,
            } for point, p, expected, observed in self.violations],
            "skipped_section_levels": sorted(set(self.skipped_section_levels)),
        }


def _sign(x: Fraction) -> int:
    return (x > 0) - (x < 0)


def _pick_between(rng: random.Random, lo: Optional[AlgebraicValue],
                  hi: Optional[AlgebraicValue], anchor: Fraction) -> Fraction:
    """A uniform grid rational strictly between the two values (None = infinite).

    The caller guarantees lo < hi.
    """
    k = rng.randrange(1, GRID)
    if lo is not None and hi is not None:
        lo, hi = rational_between(lo, hi)
        a, b = lo.hi, hi.lo
        return a + (b - a) * Fraction(k, GRID)
    width = max(Fraction(1), abs(anchor))
    if lo is not None:
        return lo.hi + width * Fraction(k, GRID)
    if hi is not None:
        return hi.lo - width * Fraction(k, GRID)
    return anchor + width * Fraction(2 * k - GRID, GRID)


def _draw(cell: Cell, rng: random.Random, report: VerifyReport):
    """Draw one point level by level.

    Returns ``(point, None)`` or ``(partial prefix, reason)`` when a bound is
    undefined or the sector is empty at the drawn prefix.
    """
    point: list = []
    for i, iv in enumerate(cell.intervals, start=1):
        lo, hi = bound_values(iv, point)
        if lo is False or hi is False:
            return point, "undefined-bound"
        if isinstance(iv, Section):
            x = exact_rational(lo)
            if x is None:
                report.skipped_section_levels.append(i)
                point = list(cell.sample[:i])
                continue
            point.append(x)
            continue
        if lo is not None and hi is not None and compare(lo, hi) != LESS:
            return point, "empty-sector"
        point.append(_pick_between(rng, lo, hi, cell.sample[i - 1]))
    return point, None


def verify_sign_invariance(P: Iterable[Polynomial], c: Cell, count: int = 100,
                           seed: int = 0) -> VerifyReport:
    """Sample ``count`` points of the cell and compare input signs with the sample's."""
    if count < 1:
        raise ValueError("count must be positive")
    rng = random.Random(seed)
    P = list(P)
    expected = {p: _sign(p.evaluate(c.sample)) for p in P}
    report = VerifyReport()
    for _ in range(count):
        point, reason = _draw(c, rng, report)
        report.samples_tested += 1
        if reason is not None:
            report.violations.append((tuple(point), None, None, reason))
            continue
        for p in P:
            got = _sign(p.evaluate(point))
            if got != expected[p]:
                report.violations.append((tuple(point), p, expected[p], got))
    return report


def check_certificates(c: Cell, count: int = 100, seed: int = 0) -> list:
    """Re-evaluate every stored chain at ``count`` prefixes drawn in the cell.

    Returns a list of (certificate, prefix) failures.
    """
    rng = random.Random(seed)
    failures = []
    scratch = VerifyReport()
    for _ in range(count):
        point, reason = _draw(c, rng, scratch)
        if reason is not None:
            failures.append((None, tuple(point)))
            continue
        for cert in c.certificates:
            prefix = point[: cert.level - 1]
            vals = eval_chain(cert.chain, prefix)
            if vals is None or not _chain_holds(vals):
                failures.append((cert, tuple(prefix)))
    return failures


def _chain_holds(vals) -> bool:
    if len(vals) == 2:
        return extended_cmp(vals[0], vals[1]) != 0
    try:
        return cyclic_chain(vals)
    except DomainError:
        return False


# Sylvester determinant ----------------------------------------------------------

def sylvester_matrix(p: Polynomial, q: Polynomial, v: int) -> list:
    m, n = degree(p, v), degree(q, v)
    cp = list(reversed(coeffs(p, v)))
    cq = list(reversed(coeffs(q, v)))
    zero = Polynomial(p.nvars)
    size = m + n
    rows = []
    for k in range(n):
        rows.append([zero] * k + cp + [zero] * (size - k - m - 1))
    for k in range(m):
        rows.append([zero] * k + cq + [zero] * (size - k - n - 1))
    return rows


def _determinant(rows: list) -> Polynomial:
    """Laplace expansion along rows, memoized over the remaining column set."""
    size = len(rows)

    @lru_cache(maxsize=None)
    def minor(r: int, cols: int) -> Polynomial:
        if r == size:
            return Polynomial.constant(rows[0][0].nvars, 1)
        total = Polynomial(rows[0][0].nvars)
        sign = 1
        for col in range(size):
            if not cols >> col & 1:
                continue
            entry = rows[r][col]
            if not entry.is_zero():
                term = entry * minor(r + 1, cols & ~(1 << col))
                total = total + term if sign > 0 else total - term
            sign = -sign
        return total

    return minor(0, (1 << size) - 1)


def oracle_resultant(p: Polynomial, q: Polynomial, v: int) -> Polynomial:
    """Determinant of the Sylvester matrix of ``p`` and ``q`` in ``x_v``."""
    if p.is_zero() or q.is_zero() or degree(p, v) < 1 or degree(q, v) < 1:
        raise DomainError("resultant needs positive degree in the eliminated variable")
    return _determinant(sylvester_matrix(p, q, v))


# Sturm sequences -------------------------------------------------------------------

def _strip(c: list) -> list:
    while c and c[-1] == 0:
        c.pop()
    return c


def _rem(a: list, b: list) -> list:
    a = list(a)
    while len(a) >= len(b) and a:
        f = a[-1] / b[-1]
        shift = len(a) - len(b)
        for k, bk in enumerate(b):
            a[shift + k] -= f * bk
        _strip(a)
    return a


def sturm_sequence(c: Sequence) -> list:
    p0 = _strip([to_rational(x) for x in c])
    p1 = _strip([k * p0[k] for k in range(1, len(p0))])
    seq = [p0, p1]
    while seq[-1]:
        r = _rem(seq[-2], seq[-1])
        if not r:
            break
        seq.append([-x for x in r])
    return [s for s in seq if s]


def _variations(seq, x: Fraction) -> int:
    signs = []
    for c in seq:
        val = sum(a * x ** k for k, a in enumerate(c))
        if val:
            signs.append(val > 0)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def oracle_root_count(p, lo, hi) -> int:
    """Number of distinct real roots in (lo, hi) by Sturm's theorem."""
    c = univariate_coeffs(p, p.level or 1) if isinstance(p, Polynomial) else list(p)
    lo, hi = to_rational(lo), to_rational(hi)
    seq = sturm_sequence(c)
    if len(seq[0]) <= 1:
        return 0
    val = lambda x: sum(a * x ** k for k, a in enumerate(seq[0]))
    if val(lo) == 0 or val(hi) == 0:
        raise DomainError("interval endpoint is a root; perturb the endpoints")
    return _variations(seq, lo) - _variations(seq, hi)


def cauchy_bound(c: Sequence) -> Fraction:
    c = _strip([to_rational(x) for x in c])
    return 1 + max((abs(a / c[-1]) for a in c[:-1]), default=Fraction(0))


# trace comparison -------------------------------------------------------------------

@dataclass(frozen=True)
class TraceComparison:
    subset: bool
    witnesses: tuple = ()


def compare_traces(classical: Cell, pd: Cell) -> TraceComparison:
    """Is every normalized PD trace polynomial also in the classical trace?"""
    base = classical.trace_polys()
    extra = sorted((p for p in pd.trace_polys() if p not in base), key=str)
    return TraceComparison(not extra, tuple(extra))
