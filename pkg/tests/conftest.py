from fractions import Fraction

import pytest
from hypothesis import strategies as st

from singlecell.poly import Polynomial, VarOrder, parse_polynomial

XY = VarOrder(("x", "y"))


def P(text, names=("x1", "x2")):
    return parse_polynomial(text, VarOrder(tuple(names)))


EX1_TEXTS = ["0.5*x1 + 0.5 - x2", "x1^2 + x2^2 - 1", "0.5*x1 - 0.5 - x2", "-x1*x2 - 0.75"]
EX1_SAMPLE = (Fraction(1, 4), Fraction(-7, 10))


@pytest.fixture
def ex1():
    return [P(t) for t in EX1_TEXTS]


def polys(nvars=2, max_deg=3, max_terms=4, coeff=9, min_level=0):
    """Random sparse integer polynomials."""
    exps = st.tuples(*[st.integers(0, max_deg)] * nvars).filter(lambda e: sum(e) <= max_deg)
    terms = st.dictionaries(exps, st.integers(-coeff, coeff).filter(bool),
                            min_size=1, max_size=max_terms)
    return terms.map(lambda t: Polynomial(nvars, t)).filter(lambda p: p.level >= min_level)


def univariate(max_deg=5, coeff=20):
    return st.lists(st.integers(-coeff, coeff), min_size=2, max_size=max_deg + 1).filter(
        lambda c: c[-1] != 0 and any(c[1:]))


def from_coeffs(c):
    return Polynomial(1, {(k,): a for k, a in enumerate(c) if a})


# acceptance summary: one line per criterion, shown even when output is captured
ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
