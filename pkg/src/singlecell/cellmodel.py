"""Symbolic cell descriptions: indexed roots, per-level intervals, cells.

A cell stores one interval per level (index 0 is level 1).  Bounds are
indexed roots root(x_i, p, j), evaluated at rational prefixes by
substitution and root isolation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from fractions import Fraction
from typing import Optional, Sequence, Union

from .exact import format_rational, parse_rational, to_rational
from .poly import Polynomial, ProjectionTag, VarOrder, degree, eval_prefix, parse_polynomial
from .projline import INF, ProjPoint, extended_cmp
from .realroots import (EQUAL, GREATER, LESS, AlgebraicValue, compare, exact_rational, isolate,
                        refine)


@dataclass(frozen=True)
class IndexedRoot:
    poly: Polynomial
    index: int

    @property
    def level(self) -> int:
        return self.poly.level


@dataclass(frozen=True)
class Section:
    bound: IndexedRoot


@dataclass(frozen=True)
class Sector:
    lower: Optional[IndexedRoot] = None  # None means -oo
    upper: Optional[IndexedRoot] = None  # None means +oo


SymbolicInterval = Union[Section, Sector]


@dataclass
class CounterSet:
    resultants_added: int = 0
    discriminants_added: int = 0
    ldcfs_added: int = 0
    coeffs_added: int = 0
    ldcfs_omitted: int = 0
    pd_blocked_unbounded: int = 0
    pd_blocked_no_pairing: int = 0
    roots_computed: int = 0
    max_total_degree: int = 0

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def omission_ratio(self) -> Optional[Fraction]:
        total = self.ldcfs_omitted + self.pd_blocked_unbounded + self.pd_blocked_no_pairing
        return Fraction(self.ldcfs_omitted, total) if total else None


@dataclass(frozen=True)
class TraceEntry:
    poly: Polynomial
    tag: ProjectionTag


@dataclass(frozen=True)
class ChainLink:
    """One element of a cyclic certificate.

    Bounds (``anchor is None``) are evaluated as ordinary indexed roots.
    Other elements are the ``rank``-th distinct projective root of ``poly``
    met when walking upward (through oo) from the element at ``anchor``.
    """

    poly: Polynomial
    index: int
    anchor: Optional[int] = None
    rank: int = 0


@dataclass(frozen=True)
class Certificate:
    poly: Polynomial  # the polynomial whose leading coefficient was omitted
    level: int
    chain: tuple


@dataclass
class Cell:
    var_order: VarOrder
    sample: tuple
    intervals: tuple
    trace: tuple = ()
    stats: CounterSet = field(default_factory=CounterSet)
    heuristic: str = "bc"
    certificates: tuple = ()
    inputs: tuple = ()
    verification: Optional[dict] = None

    @property
    def n(self) -> int:
        return len(self.var_order)

    def trace_polys(self) -> set:
        return {e.poly for e in self.trace}


# evaluation -------------------------------------------------------------------

def _univariate_roots(q: Polynomial, hint=None) -> Optional[list]:
    if q.is_zero():
        return None
    if q.is_constant():
        return []
    return isolate(q, detect_rational=False, hints=() if hint is None else (hint,))


def eval_indexed_root(ir: IndexedRoot, prefix: Sequence, hint=None) -> Optional[AlgebraicValue]:
    """Value of root(x_i, p, j) at ``prefix``; None where undefined.

    ``hint`` is an optional rational that is reported exactly if it is a root.
    """
    i = ir.level
    prefix = [to_rational(x) for x in prefix[: i - 1]]
    roots = _univariate_roots(eval_prefix(ir.poly, prefix), hint)
    if roots is None or len(roots) < ir.index:
        return None
    return roots[ir.index - 1]


def _rat_alg(x: Fraction) -> AlgebraicValue:
    return AlgebraicValue((-x.numerator, x.denominator), x, x, True, 1)


def bound_values(iv: SymbolicInterval, prefix: Sequence, hint=None):
    """(lower, upper) values at ``prefix``; infinities as None, undefined as False."""
    if isinstance(iv, Section):
        v = eval_indexed_root(iv.bound, prefix, hint)
        return (v, v) if v is not None else (False, False)
    lo = hi = None
    if iv.lower is not None:
        lo = eval_indexed_root(iv.lower, prefix, hint)
        if lo is None:
            lo = False
    if iv.upper is not None:
        hi = eval_indexed_root(iv.upper, prefix, hint)
        if hi is None:
            hi = False
    return lo, hi


def contains(c: Cell, point: Sequence) -> bool:
    point = [to_rational(x) for x in point]
    if len(point) != c.n:
        return False
    for i, iv in enumerate(c.intervals, start=1):
        x = _rat_alg(point[i - 1])
        lo, hi = bound_values(iv, point[: i - 1], point[i - 1])
        if lo is False or hi is False:
            return False
        if isinstance(iv, Section):
            if compare(x, lo) != EQUAL:
                return False
            continue
        if lo is not None and compare(lo, x) != LESS:
            return False
        if hi is not None and compare(x, hi) != LESS:
            return False
    return True


def eval_chain(chain: Sequence[ChainLink], prefix: Sequence) -> Optional[list]:
    """Projective values of a certificate chain at ``prefix``; None if undefined."""
    values: list = []
    for link in chain:
        if link.anchor is None:
            v = eval_indexed_root(IndexedRoot(link.poly, link.index), prefix)
            if v is None:
                return None
            values.append(ProjPoint(v))
            continue
        pts = projective_root_points(link.poly, prefix)
        if pts is None:
            return None
        after = cyclic_after(values[link.anchor], pts)
        if len(after) < link.rank:
            return None
        values.append(after[link.rank - 1])
    return values


def projective_root_points(p: Polynomial, prefix: Sequence) -> Optional[list]:
    """Distinct projective roots of p(prefix, x_i) w.r.t. deg_{x_i}(p), ascending, oo last."""
    i = p.level
    q = eval_prefix(p, [to_rational(x) for x in prefix[: i - 1]])
    roots = _univariate_roots(q)
    if roots is None:
        return None
    pts = [ProjPoint(r) for r in roots]
    if q.is_constant() or degree(q, i) < degree(p, i):
        pts.append(INF)
    return pts


def cyclic_after(anchor: ProjPoint, pts: Sequence[ProjPoint]) -> list:
    """``pts`` reordered as met when walking upward from ``anchor`` through oo."""
    above = [t for t in pts if extended_cmp(t, anchor) > 0]
    below = [t for t in pts if extended_cmp(t, anchor) < 0]
    return above + below


def cyclic_rank(anchor: ProjPoint, target: ProjPoint, pts: Sequence[ProjPoint]) -> int:
    order = cyclic_after(anchor, pts)
    for k, t in enumerate(order, start=1):
        if extended_cmp(t, target) == 0:
            return k
    raise ValueError("target is not among the points")


# serialization -----------------------------------------------------------------

def _ir_doc(ir: IndexedRoot, names) -> dict:
    return {"poly": ir.poly.to_text(names), "index": ir.index}


def _interval_doc(iv: SymbolicInterval, names) -> dict:
    if isinstance(iv, Section):
        return {"section": _ir_doc(iv.bound, names)}
    return {"sector": {
        "lower": "-inf" if iv.lower is None else _ir_doc(iv.lower, names),
        "upper": "+inf" if iv.upper is None else _ir_doc(iv.upper, names),
    }}


def _value_text(v, infinite: str) -> str:
    if v is None:
        return infinite
    if v is False:
        return "undefined"
    x = exact_rational(v)
    if x is not None:
        return format_rational(x)
    v = refine(v, Fraction(1, 10 ** 12))
    return f"~{float((v.lo + v.hi) / 2):.10g}"


def sample_bounds(c: Cell) -> list:
    """Per level, the bound values at the sample prefix as text (exact where rational)."""
    out = []
    for i, iv in enumerate(c.intervals, start=1):
        lo, hi = bound_values(iv, c.sample[: i - 1], c.sample[i - 1])
        out.append([_value_text(lo, "-inf"), _value_text(hi, "+inf")])
    return out


def describe(c: Cell) -> dict:
    names = c.var_order.names
    doc = {
        "vars": list(names),
        "heuristic": c.heuristic,
        "sample": [format_rational(x) for x in c.sample],
        "intervals": [_interval_doc(iv, names) for iv in c.intervals],
        "bounds_at_sample": sample_bounds(c),
        "inputs": [p.to_text(names) for p in c.inputs],
        "trace": [{
            "poly": e.poly.to_text(names),
            "tag": e.tag.kind,
            "parents": [q.to_text(names) for q in e.tag.parents],
            "variable": names[e.tag.variable - 1],
        } for e in c.trace],
        "stats": c.stats.as_dict(),
    }
    if c.certificates:
        doc["certificates"] = [{
            "poly": cert.poly.to_text(names),
            "level": cert.level,
            "chain": [{"poly": l.poly.to_text(names), "index": l.index,
                       "anchor": l.anchor, "rank": l.rank} for l in cert.chain],
        } for cert in c.certificates]
    if c.verification is not None:
        doc["verification"] = c.verification
    return doc


def parse_cell(doc) -> Cell:
    if isinstance(doc, str):
        doc = json.loads(doc)
    order = VarOrder(tuple(doc["vars"]))

    def poly(text):
        return parse_polynomial(text, order)

    def ir(d):
        return IndexedRoot(poly(d["poly"]), int(d["index"]))

    intervals = []
    for d in doc["intervals"]:
        if "section" in d:
            intervals.append(Section(ir(d["section"])))
        else:
            s = d["sector"]
            intervals.append(Sector(
                None if s["lower"] == "-inf" else ir(s["lower"]),
                None if s["upper"] == "+inf" else ir(s["upper"]),
            ))
    trace = tuple(
        TraceEntry(poly(e["poly"]), ProjectionTag(
            e["tag"], tuple(poly(p) for p in e["parents"]), order.level_of(e["variable"])))
        for e in doc.get("trace", ())
    )
    certs = tuple(
        Certificate(poly(c["poly"]), int(c["level"]), tuple(
            ChainLink(poly(l["poly"]), int(l["index"]), l["anchor"], int(l["rank"]))
            for l in c["chain"]))
        for c in doc.get("certificates", ())
    )
    return Cell(
        var_order=order,
        sample=tuple(parse_rational(x) for x in doc["sample"]),
        intervals=tuple(intervals),
        trace=trace,
        stats=CounterSet(**doc.get("stats", {})),
        heuristic=doc.get("heuristic", "bc"),
        certificates=certs,
        inputs=tuple(poly(p) for p in doc.get("inputs", ())),
        verification=doc.get("verification"),
    )
