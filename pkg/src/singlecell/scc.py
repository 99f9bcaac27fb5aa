"""Levelwise single cell construction, classical delineability.

The engine walks levels n, n-1, ..., 1.  At level i it normalizes the
collected polynomials, isolates their roots over the sample prefix, picks
the symbolic interval around s_i and projects: a non-nullified coefficient,
the discriminant and the leading coefficient of every polynomial, plus one
resultant per pair of the chosen root ordering.  The projective variant in
:mod:`singlecell.scc_projective` overrides the projection step only.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
from typing import Iterable, Optional, Sequence

from .cellmodel import (Cell, CounterSet, IndexedRoot, Section, Sector, TraceEntry,
                        SymbolicInterval)
from .exact import DomainError, to_rational
from .poly import (Polynomial, ProjectionTag, VarOrder, canonical, coeffs, degree,
                   derivative, discriminant, eval_prefix, gcd, ldcf, normalize_basis,
                   poly_key, resultant, squarefree_factors)
from .realroots import EQUAL, LESS, AlgebraicValue, compare, isolate

CLASSICAL = ("bc", "ldb")


class NullificationFailure(Exception):
    """p(s_1..s_{i-1}, x_i) is the zero polynomial."""

    def __init__(self, poly: Polynomial, level: int, names: Optional[Sequence[str]] = None):
        self.poly = poly
        self.level = level
        text = poly.to_text(names)
        super().__init__(f"nullified: {text} vanishes identically over the sample at level {level}")


@dataclass(frozen=True)
class RootGroup:
    """Roots of several polynomials sharing one value at the sample."""

    value: AlgebraicValue
    members: tuple  # IndexedRoots, representative first

    @property
    def rep(self) -> IndexedRoot:
        return self.members[0]


@dataclass(frozen=True)
class Location:
    """Where s_i sits among the sorted groups."""

    section: Optional[int] = None
    lower: Optional[int] = None
    upper: Optional[int] = None

    @property
    def is_section(self) -> bool:
        return self.section is not None


@dataclass(frozen=True)
class OrderingRelation:
    pairs: tuple  # (IndexedRoot, IndexedRoot, "<" or "=")

    def resultant_pairs(self) -> list:
        """Distinct unordered polynomial pairs, in first-use order."""
        seen = []
        keys = set()
        for a, b, _ in self.pairs:
            if a.poly == b.poly:
                continue
            key = frozenset((a.poly, b.poly))
            if key not in keys:
                keys.add(key)
                seen.append(tuple(sorted((a.poly, b.poly), key=poly_key)))
        return seen

    def degree_cost(self, level: int) -> int:
        return sum(degree(p, level) * degree(q, level) for p, q in self.resultant_pairs())


# roots and intervals ----------------------------------------------------------------

def _member_key(level: int):
    return lambda ir: (degree(ir.poly, level), poly_key(ir.poly), ir.index)


def collect_roots(polys: Iterable[Polynomial], prefix: Sequence[Fraction], level: int,
                  s_i: Fraction, stats: Optional[CounterSet] = None) -> list:
    """Sorted root groups of the polynomials over ``prefix``."""
    items = []
    for p in polys:
        q = eval_prefix(p, prefix)
        if q.is_zero():
            raise NullificationFailure(p, level)
        if q.is_constant():
            continue
        roots = isolate(q, detect_rational=False, hints=(s_i,))
        if stats is not None:
            stats.roots_computed += len(roots)
        items.extend((r, IndexedRoot(p, r.index)) for r in roots)
    items.sort(key=cmp_to_key(lambda a, b: compare(a[0], b[0])))
    groups: list = []
    for value, ir in items:
        if groups and compare(groups[-1][0], value) == EQUAL:
            groups[-1][1].append(ir)
        else:
            groups.append((value, [ir]))
    key = _member_key(level)
    return [RootGroup(v, tuple(sorted(ms, key=key))) for v, ms in groups]


def _exact(x: Fraction) -> AlgebraicValue:
    return AlgebraicValue((-x.numerator, x.denominator), x, x, True, 1)


def locate(groups: Sequence[RootGroup], s_i) -> Location:
    x = _exact(to_rational(s_i))
    lower = upper = None
    for g, grp in enumerate(groups):
        c = compare(grp.value, x)
        if c == EQUAL:
            return Location(section=g)
        if c == LESS:
            lower = g
        elif upper is None:
            upper = g
    return Location(lower=lower, upper=upper)


def interval_of(groups: Sequence[RootGroup], loc: Location) -> SymbolicInterval:
    if loc.is_section:
        return Section(groups[loc.section].rep)
    return Sector(None if loc.lower is None else groups[loc.lower].rep,
                  None if loc.upper is None else groups[loc.upper].rep)


def compute_interval(groups: Sequence[RootGroup], s_i) -> SymbolicInterval:
    """Section through s_i if it is a root, otherwise the sector around it."""
    return interval_of(groups, locate(groups, s_i))


# orderings -----------------------------------------------------------------------------

def ordering_bc(groups: Sequence[RootGroup], loc: Location) -> OrderingRelation:
    """Pair every root directly with the bound on its side."""
    pairs = []
    if loc.is_section:
        b = loc.section
        rep = groups[b].rep
        for g, grp in enumerate(groups):
            for m in grp.members:
                if g < b:
                    pairs.append((m, rep, "<"))
                elif g > b:
                    pairs.append((rep, m, "<"))
                elif m != rep:
                    pairs.append((m, rep, "="))
        return OrderingRelation(tuple(pairs))
    lo, hi = loc.lower, loc.upper
    if lo is not None:
        rep = groups[lo].rep
        for g in range(lo, -1, -1):
            for m in groups[g].members:
                if g < lo:
                    pairs.append((m, rep, "<"))
                elif m != rep:
                    pairs.append((m, rep, "="))
    if hi is not None:
        rep = groups[hi].rep
        for g in range(hi, len(groups)):
            for m in groups[g].members:
                if g > hi:
                    pairs.append((rep, m, "<"))
                elif m != rep:
                    pairs.append((m, rep, "="))
    if lo is not None and hi is not None:
        pairs.append((groups[lo].rep, groups[hi].rep, "<"))
    return OrderingRelation(tuple(pairs))


def ordering_ldb(groups: Sequence[RootGroup], loc: Location, level: int) -> OrderingRelation:
    """Greedy outward chaining that keeps resultant degree products small.

    Each root is anchored to the bound or to an already anchored root on
    its side, choosing the partner with the smallest deg*deg (zero for the
    same polynomial or an already chosen pair); ties go to the nearer root.
    If the result costs more than the direct pairing, the direct pairing is
    used instead.
    """
    chosen: set = set()
    pairs: list = []

    def cost(a: IndexedRoot, b: IndexedRoot) -> int:
        if a.poly == b.poly or frozenset((a.poly, b.poly)) in chosen:
            return 0
        return degree(a.poly, level) * degree(b.poly, level)

    def side(bound: int, order: Sequence[int], below: bool):
        anchored = [(groups[bound].rep, bound)]
        for g in order:
            for m in groups[g].members:
                if g == bound and m == groups[bound].rep:
                    continue
                best = None
                for rank, (c, cg) in enumerate(reversed(anchored)):
                    key = (cost(m, c), abs(cg - g), rank)
                    if best is None or key < best[0]:
                        best = (key, c, cg)
                _, c, cg = best
                if cg == g:
                    pairs.append((m, c, "="))
                elif below:
                    pairs.append((m, c, "<"))
                else:
                    pairs.append((c, m, "<"))
                if m.poly != c.poly:
                    chosen.add(frozenset((m.poly, c.poly)))
                anchored.append((m, g))

    if loc.is_section:
        b = loc.section
        side(b, [b] + list(range(b - 1, -1, -1)), True)
        side(b, list(range(b + 1, len(groups))), False)
    else:
        if loc.lower is not None:
            side(loc.lower, list(range(loc.lower, -1, -1)), True)
        if loc.upper is not None:
            side(loc.upper, list(range(loc.upper, len(groups))), False)
        if loc.lower is not None and loc.upper is not None:
            pairs.append((groups[loc.lower].rep, groups[loc.upper].rep, "<"))
    rel = OrderingRelation(tuple(pairs))
    base = ordering_bc(groups, loc)
    if rel.degree_cost(level) > base.degree_cost(level):
        return base
    return rel


def ordering(heuristic: str, groups, loc, level) -> OrderingRelation:
    if heuristic == "bc":
        return ordering_bc(groups, loc)
    if heuristic == "ldb":
        return ordering_ldb(groups, loc, level)
    raise ValueError(f"unknown base heuristic {heuristic!r}")


# projection helpers ------------------------------------------------------------

def _value_at(c: Polynomial, prefix) -> Fraction:
    return eval_prefix(c, prefix).constant_value()


def nonnull_coeff(p: Polynomial, s: Sequence, level: int) -> Optional[Polynomial]:
    """A coefficient of ``p`` in x_level that is nonzero over the sample prefix.

    None when some coefficient is a nonzero constant.  Otherwise the leading
    coefficient if it does not vanish, else the nonvanishing coefficient of
    least total degree (ties: higher power of x_level first).
    """
    prefix = [to_rational(x) for x in s[: level - 1]]
    cs = coeffs(p, level)
    if any(c.is_constant() and not c.is_zero() for c in cs):
        return None
    if _value_at(cs[-1], prefix) != 0:
        return cs[-1]
    best = None
    for k in range(len(cs) - 1, -1, -1):
        c = cs[k]
        if c.is_zero() or _value_at(c, prefix) == 0:
            continue
        if best is None or c.total_degree() < best.total_degree():
            best = c
    if best is None:
        raise NullificationFailure(p, level)
    return best


def fallback_derivatives(p: Polynomial, point: Sequence, level: int) -> list:
    """Partial derivatives of least order that do not vanish at ``point``."""
    frontier = [p]
    seen = {p}
    for _ in range(p.total_degree()):
        nxt = []
        for q in frontier:
            for v in range(1, level + 1):
                d = derivative(q, v)
                if d.is_zero() or d in seen:
                    continue
                seen.add(d)
                nxt.append(d)
        hits = [d for d in nxt if d.evaluate(point[:level]) != 0]
        if hits:
            return sorted({canonical(d) for d in hits}, key=poly_key)
        frontier = nxt
    return []


# the engine ------------------------------------------------------------------------

class Construction:
    """State of one cell construction (per call, never shared)."""

    projective = False

    def __init__(self, P: Iterable[Polynomial], s: Sequence, heuristic: str,
                 var_order: Optional[VarOrder] = None, derivative_fallback: bool = False):
        self.s = tuple(to_rational(x) for x in s)
        self.n = len(self.s)
        self.order = var_order or VarOrder.default(self.n)
        if len(self.order) != self.n:
            raise DomainError("sample length differs from the variable count")
        self.heuristic = heuristic
        self.fallback = derivative_fallback
        self.stats = CounterSet()
        self.trace: list = []
        self.certificates: list = []
        self.statuses: dict = {}
        self.levels: dict = {i: set() for i in range(1, self.n + 1)}
        self.known: set = set()
        self.origin: dict = {}  # poly -> TraceEntry tag or None for input pieces
        self._counted: dict = {}
        for p in P:
            if p.nvars != self.n:
                raise DomainError("polynomial variable count differs from the sample")
            for f in squarefree_factors(p):
                self._register(f, None)

    # bookkeeping

    def _register(self, f: Polynomial, tag: Optional[ProjectionTag]) -> None:
        if f in self.known:
            return
        self.known.add(f)
        self.origin[f] = tag
        self.levels[f.level].add(f)
        self.stats.max_total_degree = max(self.stats.max_total_degree, f.total_degree())
        if tag is not None:
            self.trace.append(TraceEntry(f, tag))

    _COUNTER = {"res": "resultants_added", "disc": "discriminants_added",
                "ldcf": "ldcfs_added", "coeff-nonnull": "coeffs_added",
                "derivative-fallback": "coeffs_added"}

    def add(self, q: Polynomial, kind: str, parents: tuple, level: int) -> None:
        if q.is_constant():
            return
        key = canonical(q)
        done = self._counted.setdefault(kind, set())
        if key not in done:
            done.add(key)
            field = self._COUNTER[kind]
            setattr(self.stats, field, getattr(self.stats, field) + 1)
        tag = ProjectionTag(kind, tuple(parents), level)
        for f in squarefree_factors(q):
            self._register(f, tag)

    def _normalized_level(self, i: int) -> list:
        raw = self.levels[i]
        if i == 1:
            return sorted(raw, key=poly_key)
        basis = normalize_basis(raw)
        keep = []
        for b in basis:
            if b not in self.known:
                # a coprime refinement piece: inherit the origin of a multiple
                parent = next(f for f in sorted(raw, key=poly_key) if gcd(f, b) == b)
                self._register(b, self.origin[parent])
            if b.level == i:
                keep.append(b)
        self.levels[i] = set(keep)
        return keep

    def _check_nullification(self, i: int, Pi: list) -> list:
        prefix = self.s[: i - 1]
        while True:
            bad = [p for p in Pi if eval_prefix(p, prefix).is_zero()]
            if not bad:
                return Pi
            p = bad[0]
            if not self.fallback:
                raise NullificationFailure(p, i, self.order.names)
            self.levels[i].discard(p)
            for c in coeffs(p, i):
                self.add(c, "derivative-fallback", (p,), i)
            for d in fallback_derivatives(p, self.s, i):
                self.add(d, "derivative-fallback", (p,), i)
            Pi = self._normalized_level(i)

    # main loop

    def run(self) -> Cell:
        intervals: list = [None] * self.n
        for i in range(self.n, 0, -1):
            Pi = self._normalized_level(i)
            if i > 1:
                Pi = self._check_nullification(i, Pi)
            prefix = self.s[: i - 1]
            groups = collect_roots(Pi, prefix, i, self.s[i - 1], self.stats)
            loc = locate(groups, self.s[i - 1])
            intervals[i - 1] = interval_of(groups, loc)
            if i > 1:
                self.project(i, Pi, groups, loc)
        inputs = sorted((f for f, t in self.origin.items() if t is None), key=poly_key)
        return Cell(
            var_order=self.order,
            sample=self.s,
            intervals=tuple(intervals),
            trace=tuple(self.trace),
            stats=self.stats,
            heuristic=self.heuristic,
            certificates=tuple(self.certificates),
            inputs=tuple(inputs),
        )

    def project_delineability(self, i: int, Pi: list) -> None:
        for p in Pi:
            c = nonnull_coeff(p, self.s, i)
            if c is not None:
                self.add(c, "coeff-nonnull", (p,), i)
        for p in Pi:
            self.add(discriminant(p, i), "disc", (p,), i)

    def project(self, i: int, Pi: list, groups, loc) -> None:
        self.project_delineability(i, Pi)
        for p in Pi:
            self.add(ldcf(p, i), "ldcf", (p,), i)
        rel = ordering(self.heuristic, groups, loc, i)
        for p, q in rel.resultant_pairs():
            self.add(resultant(p, q, i), "res", (p, q), i)


def construct_cell(P: Iterable[Polynomial], s: Sequence, h: str = "bc",
                   var_order: Optional[VarOrder] = None,
                   derivative_fallback: bool = False) -> Cell:
    """Classical single cell construction with heuristic ``bc`` or ``ldb``.

    Raises :class:`NullificationFailure` when a polynomial vanishes over the
    sample prefix and the derivative fallback is off.
    """
    h = h.lower()
    if h not in CLASSICAL:
        raise ValueError(f"classical construction needs bc or ldb, not {h!r}")
    return Construction(P, s, h, var_order, derivative_fallback).run()
