"""Single cell construction with projective delineability.

Only the polynomials defining the cell bounds (and those without roots
over the sample) keep their leading coefficients unconditionally.  Every
other polynomial keeps only its discriminant; its leading coefficient is
dropped when the resultants of the classical ordering already pin each of
its roots away from both bounds on the projective line, either directly or
through a four-element cyclic chain [lower, upper, other, root].
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .cellmodel import (Cell, Certificate, ChainLink, CounterSet, IndexedRoot,
                        cyclic_rank, projective_root_points)
from .poly import Polynomial, degree, eval_prefix, ldcf, poly_key, resultant
from .projline import INF, ProjPoint
from .scc import (Construction, Location, OrderingRelation, RootGroup, nonnull_coeff,
                  ordering)

PD_HEURISTICS = {"bc-pd": "bc", "ldb-pd": "ldb"}

OMITTED = "omitted"
BLOCKED_UNBOUNDED = "blocked-unbounded"
BLOCKED_NO_PAIRING = "blocked-no-pairing"
NEEDED_BOUND = "ldcf-needed-bound"
NEEDED_NO_ROOTS = "ldcf-needed-no-roots"
STATUSES = (OMITTED, BLOCKED_UNBOUNDED, BLOCKED_NO_PAIRING, NEEDED_BOUND, NEEDED_NO_ROOTS)


@dataclass(frozen=True)
class NApproxRelation:
    """Symmetric pairs over roots and INF, tagged "!=" or "="."""

    pairs: tuple

    def ldcf_polys(self) -> list:
        out = []
        for a, b, _ in self.pairs:
            for x, y in ((a, b), (b, a)):
                if y is INF and x is not INF and x.poly not in out:
                    out.append(x.poly)
        return out


@dataclass(frozen=True)
class Chain:
    """A cyclic chain at the sample: IndexedRoots plus anchor positions."""

    roots: tuple
    anchors: tuple  # None for the bounds, else index of the anchor root


class _Analysis:
    def __init__(self, groups: Sequence[RootGroup], loc: Location,
                 classical: OrderingRelation, level: int):
        self.groups = groups
        self.loc = loc
        self.level = level
        self.C = {frozenset(pq) for pq in classical.resultant_pairs()}
        self.pos = {}
        for g, grp in enumerate(groups):
            for m in grp.members:
                self.pos[m] = g

    def linked(self, a: IndexedRoot, b: IndexedRoot) -> bool:
        """a and b stay distinct over the cell (same polynomial or classical resultant)."""
        return a.poly == b.poly or frozenset((a.poly, b.poly)) in self.C

    def equal_to_rep(self, m: IndexedRoot, g: int) -> bool:
        """m equals the group representative on the cell via classical resultants."""
        rep = self.groups[g].rep
        if m == rep:
            return True
        members = self.groups[g].members
        reached = {m}
        frontier = [m]
        while frontier:
            x = frontier.pop()
            for y in members:
                if y not in reached and x.poly != y.poly and frozenset((x.poly, y.poly)) in self.C:
                    if y == rep:
                        return True
                    reached.add(y)
                    frontier.append(y)
        return False

    def partner(self, theta: IndexedRoot, bound: IndexedRoot, side: range) -> Optional[IndexedRoot]:
        """Root on the opposite side linked to both ``theta`` and ``bound``."""
        best = None
        for g in side:
            for m in self.groups[g].members:
                if not (self.linked(m, theta) and self.linked(m, bound)):
                    continue
                key = (m.poly != theta.poly, degree(m.poly, self.level), abs(g - self.pos[theta]),
                       poly_key(m.poly), m.index)
                if best is None or key < best[0]:
                    best = (key, m)
        return None if best is None else best[1]


def build_napprox(groups: Sequence[RootGroup], loc: Location, classical: OrderingRelation,
                  polys: Sequence[Polynomial], level: int, prefix: Sequence):
    """Transfer the classical ordering to the projective line.

    Returns ``(relation, statuses, chains)``: the symmetric relation, one
    status per polynomial and, for each omitted polynomial, the cyclic chains
    (at the sample) that justify the omission.
    """
    an = _Analysis(groups, loc, classical, level)
    pairs = [(a, b, "!=" if rel == "<" else "=") for a, b, rel in classical.pairs]
    statuses: dict = {}
    chains: dict = {}
    roots_of: dict = {p: [] for p in polys}
    for grp in groups:
        for m in grp.members:
            roots_of.setdefault(m.poly, []).append(m)

    bound_groups = [g for g in (loc.section, loc.lower, loc.upper) if g is not None]
    bound_polys = {groups[g].rep.poly for g in bound_groups}
    unbounded = not loc.is_section and (loc.lower is None or loc.upper is None)

    for p in sorted(polys, key=poly_key):
        roots = roots_of.get(p, [])
        if not roots:
            statuses[p] = NEEDED_NO_ROOTS
            continue
        if unbounded and any(an.pos[r] not in bound_groups for r in roots):
            statuses[p] = BLOCKED_UNBOUNDED
            pairs.extend((r, INF, "!=") for r in roots if an.pos[r] not in bound_groups)
            continue
        if p in bound_polys:
            statuses[p] = NEEDED_BOUND
            continue
        if eval_prefix(ldcf(p, level), prefix).constant_value() == 0:
            # a projective root sits at infinity over the sample
            statuses[p] = BLOCKED_NO_PAIRING
            pairs.extend((r, INF, "!=") for r in roots)
            continue
        ok, extra, proof = _cover(an, roots)
        if ok:
            statuses[p] = OMITTED
            pairs.extend(extra)
            chains[p] = proof
        else:
            statuses[p] = BLOCKED_NO_PAIRING
            pairs.extend((r, INF, "!=") for r in roots)
    return NApproxRelation(tuple(pairs)), statuses, chains


def _cover(an: _Analysis, roots: Sequence[IndexedRoot]):
    """Check every root of one polynomial against the cell bounds."""
    loc, groups = an.loc, an.groups
    extra: list = []
    proof: list = []
    for theta in roots:
        g = an.pos[theta]
        if loc.is_section:
            b = loc.section
            rep = groups[b].rep
            if g == b:
                if not an.equal_to_rep(theta, g):
                    return False, [], []
                continue
            if not an.linked(theta, rep):
                return False, [], []
            proof.append(Chain((rep, theta), (None, 0)))
            continue
        lo, hi = loc.lower, loc.upper
        if g in (lo, hi):
            # only possible in a bounded sector here; equality must persist
            if not an.equal_to_rep(theta, g):
                return False, [], []
            continue
        low, up = groups[lo].rep, groups[hi].rep
        if g < lo:
            near, far, opposite = low, up, range(hi + 1, len(groups))
        else:
            near, far, opposite = up, low, range(lo - 1, -1, -1)
        if not an.linked(theta, near):
            return False, [], []
        if an.linked(theta, far):
            proof.append(Chain((low, up, theta), (None, None, 0 if g < lo else 1)))
            continue
        other = an.partner(theta, far, opposite)
        if other is None:
            return False, [], []
        extra.append((theta, other, "!="))
        if g < lo:
            proof.append(Chain((low, up, other, theta), (None, None, 1, 0)))
        else:
            proof.append(Chain((low, up, theta, other), (None, None, 1, 0)))
    return True, extra, proof


class ProjectiveConstruction(Construction):
    projective = True

    def __init__(self, P, s, heuristic, var_order=None, derivative_fallback=False):
        super().__init__(P, s, heuristic, var_order, derivative_fallback)
        self.base = PD_HEURISTICS[heuristic]

    def project(self, i: int, Pi: list, groups, loc) -> None:
        self.project_delineability(i, Pi)
        prefix = self.s[: i - 1]
        for g in (loc.section, loc.lower, loc.upper):
            if g is not None:
                p = groups[g].rep.poly
                self.add(ldcf(p, i), "ldcf", (p,), i)
        classical = ordering(self.base, groups, loc, i)
        for p, q in classical.resultant_pairs():
            self.add(resultant(p, q, i), "res", (p, q), i)
        rel, statuses, chains = build_napprox(groups, loc, classical, Pi, i, prefix)
        for p in rel.ldcf_polys():
            self.add(ldcf(p, i), "ldcf", (p,), i)
        for p in sorted(statuses, key=poly_key):
            st = statuses[p]
            self.statuses[(p, i)] = st
            if st == NEEDED_NO_ROOTS:
                self.add(ldcf(p, i), "ldcf", (p,), i)
            lc = ldcf(p, i)
            if lc.is_constant():
                continue
            if st == BLOCKED_UNBOUNDED:
                self.stats.pd_blocked_unbounded += 1
            elif st == BLOCKED_NO_PAIRING:
                self.stats.pd_blocked_no_pairing += 1
            elif st == OMITTED and nonnull_coeff(p, self.s, i) != lc:
                self.stats.ldcfs_omitted += 1
                for ch in chains[p]:
                    self.certificates.append(self._certificate(p, i, ch))

    def _certificate(self, p: Polynomial, i: int, ch: Chain) -> Certificate:
        prefix = self.s[: i - 1]
        values: list = []
        links = []
        for ir, anchor in zip(ch.roots, ch.anchors):
            pts = projective_root_points(ir.poly, prefix)
            here = next(t for t in pts if t is not INF and t.value.index == ir.index)
            if anchor is None:
                links.append(ChainLink(ir.poly, ir.index))
            else:
                rank = cyclic_rank(values[anchor], here, pts)
                links.append(ChainLink(ir.poly, ir.index, anchor, rank))
            values.append(here)
        return Certificate(p, i, tuple(links))


def construct_cell_pd(P, s, h: str = "bc-pd", var_order=None,
                      derivative_fallback: bool = False) -> Cell:
    """Projective-delineability construction with heuristic ``bc-pd`` or ``ldb-pd``."""
    h = h.lower()
    if h not in PD_HEURISTICS:
        raise ValueError(f"projective construction needs bc-pd or ldb-pd, not {h!r}")
    return ProjectiveConstruction(P, s, h, var_order, derivative_fallback).run()


def pd_stats(c: Cell) -> dict:
    """Omission counters and the omitted / (omitted + blocked) ratio."""
    st: CounterSet = c.stats
    return {
        "ldcfs_omitted": st.ldcfs_omitted,
        "pd_blocked_unbounded": st.pd_blocked_unbounded,
        "pd_blocked_no_pairing": st.pd_blocked_no_pairing,
        "omission_ratio": st.omission_ratio(),
    }
