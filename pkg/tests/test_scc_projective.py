from fractions import Fraction

import pytest

from singlecell.cellmodel import IndexedRoot, Section, Sector, bound_values, contains
from singlecell.instance import corpus_instance
from singlecell.poly import canonical, normalize_basis
from singlecell.projline import INF
from singlecell.realroots import exact_rational
from singlecell.scc import (NullificationFailure, collect_roots, construct_cell, locate,
                            ordering_bc)
from singlecell.scc_projective import (BLOCKED_NO_PAIRING, BLOCKED_UNBOUNDED, NEEDED_BOUND, NEEDED_NO_ROOTS,
                                       OMITTED, ProjectiveConstruction, build_napprox,
                                       construct_cell_pd, pd_stats)
from singlecell.verify import check_certificates, compare_traces, verify_sign_invariance

from conftest import EX1_SAMPLE, P

F = Fraction


def values(c, level):
    lo, hi = bound_values(c.intervals[level - 1], c.sample[: level - 1])
    return tuple(None if v is None else exact_rational(v) for v in (lo, hi))


@pytest.mark.parametrize("h,base", [("bc-pd", "bc"), ("ldb-pd", "ldb")])
def test_example1_projective(ex1, h, base):
    pc = ProjectiveConstruction(ex1, EX1_SAMPLE, h)
    c = pc.run()
    classical = construct_cell(ex1, EX1_SAMPLE, base)
    assert c.intervals[1] == classical.intervals[1]
    trace = c.trace_polys()
    for text in ("x1^2 - 1", "5*x1^2 - 2*x1 - 3", "16*x1^4 - 16*x1^2 + 9"):
        assert P(text) in trace
    assert P("x1") not in trace
    assert pc.statuses[(canonical(ex1[3]), 2)] == OMITTED
    assert c.stats.ldcfs_omitted == 1
    assert c.stats.pd_blocked_unbounded == 0
    assert values(c, 1) == (F(-3, 5), 1)
    assert c.intervals[0] == Sector(IndexedRoot(P("5*x1^2 - 2*x1 - 3"), 1),
                                    IndexedRoot(P("x1^2 - 1"), 2))
    assert compare_traces(classical, c).subset
    assert pd_stats(c)["omission_ratio"] == 1


def test_example1_certificate(ex1):
    c = construct_cell_pd(ex1, EX1_SAMPLE, "bc-pd")
    (cert,) = c.certificates
    p2, p3, p4 = (canonical(ex1[k]) for k in (1, 2, 3))
    assert cert.poly == p4 and cert.level == 2
    assert [(l.poly, l.index) for l in cert.chain][:2] == [(p2, 1), (p3, 1)]
    assert [l.poly for l in cert.chain] == [p2, p3, p2, p4]
    assert check_certificates(c, 100, seed=7) == []


def test_example1_napprox(ex1):
    basis = normalize_basis(ex1)
    groups = collect_roots(basis, [F(1, 4)], 2, F(-7, 10))
    loc = locate(groups, F(-7, 10))
    classical = ordering_bc(groups, loc)
    rel, statuses, chains = build_napprox(groups, loc, classical, basis, 2, [F(1, 4)])
    p2, p4 = canonical(ex1[1]), canonical(ex1[3])
    assert (IndexedRoot(p4, 1), IndexedRoot(p2, 2), "!=") in rel.pairs
    assert statuses[p4] == OMITTED
    # p1 has no opposite-side partner; its infinity pair costs only a constant ldcf
    assert rel.ldcf_polys() == [canonical(ex1[0])]
    assert statuses[canonical(ex1[0])] == BLOCKED_NO_PAIRING
    lower, upper = groups[loc.lower].rep, groups[loc.upper].rep
    assert (lower, upper, "!=") in rel.pairs


def test_half_bounded_same_trace_as_classical():
    ps = [P("x2^2 - x1")]
    pc = ProjectiveConstruction(ps, (1, 5), "bc-pd")
    c = pc.run()
    assert c.intervals[1] == Sector(IndexedRoot(ps[0], 2), None)
    assert pc.statuses[(ps[0], 2)] == BLOCKED_UNBOUNDED
    assert c.trace_polys() == construct_cell(ps, (1, 5), "bc").trace_polys()
    assert c.stats.ldcfs_omitted == 0


def test_half_bounded_counts_blocked():
    ps = [P("x2 - 10"), P("x1*x2 + 1")]
    pc = ProjectiveConstruction(ps, (1, 20), "bc-pd")
    c = pc.run()
    assert pc.statuses[(ps[0], 2)] == NEEDED_BOUND
    assert pc.statuses[(ps[1], 2)] == BLOCKED_UNBOUNDED
    assert c.stats.pd_blocked_unbounded == 1 and c.stats.ldcfs_omitted == 0
    assert P("x1") in c.trace_polys()
    assert pd_stats(c)["omission_ratio"] == 0


def test_root_free_polynomial_only_contributes_disc():
    ps = [P("x2^2 + x1^2 + 1")]
    pc = ProjectiveConstruction(ps, (0, 0), "bc-pd")
    c = pc.run()
    assert pc.statuses[(ps[0], 2)] == NEEDED_NO_ROOTS
    assert c.trace_polys() == {P("x1^2 + 1")}


def test_all_linear_counters_zero():
    c = construct_cell_pd([P("x2 - x1"), P("x2 + x1 - 3"), P("x1 - 5")], (0, 1), "bc-pd")
    st = c.stats
    assert (st.ldcfs_omitted, st.pd_blocked_unbounded, st.pd_blocked_no_pairing) == (0, 0, 0)
    assert pd_stats(c)["omission_ratio"] is None


def test_section_needs_no_infinity_pairs():
    ps = [normalize_basis([P("x2 - x1")])[0], canonical(P("x1*x2^2 - 1")), canonical(P("x1*x2 + 3"))]
    groups = collect_roots(ps, [F(1)], 2, F(1))
    loc = locate(groups, F(1))
    assert loc.is_section
    rel, statuses, _ = build_napprox(groups, loc, ordering_bc(groups, loc), ps, 2, [F(1)])
    assert all(INF not in (a, b) for a, b, _ in rel.pairs)
    assert set(statuses.values()) <= {OMITTED, NEEDED_BOUND}


def test_pd_rejects_classical_heuristic(ex1):
    with pytest.raises(ValueError):
        construct_cell_pd(ex1, EX1_SAMPLE, "bc")


def test_pd_nullification():
    with pytest.raises(NullificationFailure):
        construct_cell_pd([P("x1*x2")], (0, 5), "ldb-pd")


@pytest.mark.parametrize("seed", range(1, 41))
def test_corpus_pd_properties(seed):
    inst = corpus_instance(seed)
    args = (inst.polynomials, inst.sample)
    for h, base in (("bc-pd", "bc"), ("ldb-pd", "ldb")):
        try:
            c = construct_cell_pd(*args, h, inst.var_order)
            k = construct_cell(*args, base, inst.var_order)
        except NullificationFailure:
            pytest.skip("nullified instance")
        assert contains(c, c.sample)
        assert compare_traces(k, c).subset
        for e in c.trace:
            if e.tag.kind == "res":
                assert e.tag.parents[0] != e.tag.parents[1]
        omitted = c.stats.ldcfs_omitted
        assert omitted == 0 or c.certificates
        assert check_certificates(c, 25, seed) == []
        assert verify_sign_invariance(inst.polynomials, c, 25, seed).passed
