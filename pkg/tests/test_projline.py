from fractions import Fraction
from itertools import permutations

import pytest
from hypothesis import given, strategies as st

from singlecell.exact import DomainError
from singlecell.projline import INF, cyclic3, cyclic_chain, extended_cmp, finite, projective_roots
from singlecell.realroots import isolate

from conftest import from_coeffs, univariate

F = Fraction
GRID = [finite(x) for x in (-3, -2, -1, 0, F(1, 2), 1, 2, 3)] + [INF]


def pts(*xs):
    return [INF if x == "inf" else finite(x) for x in xs]


def test_cyclic3_examples():
    assert cyclic3(*pts(1, 2, 3))
    assert not cyclic3(*pts(1, 3, 2))
    assert cyclic3(*pts(3, "inf", 1))


def test_cyclic3_requires_distinct():
    with pytest.raises(DomainError):
        cyclic3(*pts(1, 1, 2))
    with pytest.raises(DomainError):
        cyclic3(INF, INF, finite(0))


def test_cyclic_chain_examples():
    assert cyclic_chain(pts(1, 2, 3, "inf"))
    assert not cyclic_chain(pts(1, 3, 2, "inf"))
    assert cyclic_chain(pts(-3, -1, 0, "inf"))
    assert cyclic_chain(pts(0, "inf", -3, -1))
    with pytest.raises(DomainError):
        cyclic_chain(pts(1, 2, 1))


def test_cyclic_with_algebraic_values():
    sqrt2 = finite(isolate([-2, 0, 1])[1])
    assert cyclic3(finite(1), sqrt2, finite(F(3, 2)))
    assert cyclic3(sqrt2, INF, finite(-1))


def test_totality_rotation_restriction_on_grid():
    for x, y, z in permutations(GRID, 3):
        assert cyclic3(x, y, z) != cyclic3(x, z, y)
        assert cyclic3(x, y, z) == cyclic3(y, z, x) == cyclic3(z, x, y)
        if not INF in (x, y, z) and extended_cmp(x, y) < 0 and extended_cmp(x, z) < 0:
            assert cyclic3(x, y, z) == (extended_cmp(y, z) < 0)


def test_chain_distinct_ends():
    for t in permutations(GRID[:5] + [INF], 4):
        if cyclic_chain(t):
            assert extended_cmp(t[0], t[2]) != 0
            assert cyclic_chain(t[1:] + t[:1])


def test_projective_roots_examples():
    assert projective_roots([-1, 2], 2) == [(finite(F(1, 2)), 1), (INF, 1)]
    assert projective_roots([-1, 0, 1], 2) == [(finite(-1), 1), (finite(1), 1)]
    assert projective_roots([3], 2) == [(INF, 2)]


def test_projective_roots_multiplicity_and_errors():
    assert projective_roots([1, 2, 1], 3) == [(finite(-1), 2), (INF, 1)]
    with pytest.raises(DomainError):
        projective_roots([-1, 0, 1], 1)
    with pytest.raises(DomainError):
        projective_roots([0], 2)


@given(univariate(5, 10), st.integers(0, 4))
def test_projective_infinity_multiplicity(c, extra):
    deg = len(c) - 1
    d = deg + extra
    roots = projective_roots(c, d)
    inf = [m for t, m in roots if t is INF]
    assert inf == ([extra] if extra else [])
    assert sum(m for _, m in roots) <= d
