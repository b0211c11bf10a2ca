import itertools
import math

import pytest
import sympy
from hypothesis import HealthCheck, assume, given, settings, strategies as st

from k3lattice import enumerator
from k3lattice.enumerator import (
    AnchorNotPositive,
    ClassQuery,
    FinitenessNotCertified,
    between,
    enumerate_classes,
    eq,
    ge,
    le,
    nef_pairing_bound,
    oracle_enumerate,
    roots_violating_nef,
)
from k3lattice.geometry import PolarizationError, PolarizedLattice
from k3lattice.lattice import DivisorClass, IntLattice, gram_determinant

ORACLE_BOX = 5


@st.composite
def hyperbolic_lattices(draw):
    n = draw(st.integers(2, 3))
    gram = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            value = draw(st.integers(-10, 10))
            if i == j:
                value -= value % 2
            gram[i][j] = gram[j][i] = value
    assume(gram_determinant(gram) != 0)
    lattice = IntLattice(gram)
    assume(lattice.is_hyperbolic())
    return lattice


def positive_classes(lattice, reach=2):
    out = []
    for coords in itertools.product(range(-reach, reach + 1), repeat=lattice.rank):
        x = DivisorClass(coords)
        if lattice.square(x) > 0:
            out.append(x)
    return out


def test_no_root_orthogonal_to_D(family):
    P = family(1, 5, 2)
    result = enumerate_classes(P, ClassQuery(-2, (eq(P.ample, 0),)))
    assert result.is_empty()
    assert result.anchor == P.ample


def test_negative_definite_without_anchor():
    lattice = IntLattice([[-2, 0], [0, -2]])
    result = enumerate_classes(lattice, ClassQuery(-2))
    assert set(result.solutions) == {
        DivisorClass((1, 0)),
        DivisorClass((-1, 0)),
        DivisorClass((0, 1)),
        DivisorClass((0, -1)),
    }
    assert result.anchor is None
    assert result.completeness_bound.radius >= 1


def test_unbounded_query_is_refused():
    lattice = IntLattice([[2, 0], [0, -2]])
    with pytest.raises(FinitenessNotCertified):
        enumerate_classes(lattice, ClassQuery(-2))
    with pytest.raises(FinitenessNotCertified):
        enumerate_classes(lattice, ClassQuery(-2, (ge(DivisorClass((1, 0)), 1),)))


def test_empty_interval():
    lattice = IntLattice([[4, 5], [5, 2]])
    D = DivisorClass((1, 0))
    result = enumerate_classes(lattice, ClassQuery(-2, (between(D, 3, 1),)))
    assert result.is_empty()
    result = enumerate_classes(lattice, ClassQuery(-2, (ge(D, 4), le(D, 2))))
    assert result.is_empty()


def test_primitive_and_exclude():
    lattice = IntLattice([[-2, 0], [0, -2]])
    result = enumerate_classes(lattice, ClassQuery(-8, primitive_only=False))
    assert DivisorClass((2, 0)) in result.solutions
    result = enumerate_classes(lattice, ClassQuery(-8, primitive_only=True))
    assert DivisorClass((2, 0)) not in result.solutions
    assert DivisorClass((0, -2)) not in result.solutions
    result = enumerate_classes(lattice, ClassQuery(-2, exclude=(DivisorClass((1, 0)),)))
    assert len(result.solutions) == 3


def test_symmetric_query_has_symmetric_solutions(family):
    P = family(-1, 1, 5)
    result = enumerate_classes(P, ClassQuery(-2, (between(P.ample, -6, 6),)))
    solutions = set(result.solutions)
    assert solutions
    assert solutions == {-x for x in solutions}


def test_oracle_on_table_lattice(family):
    P = family(-1, 2, 1)
    query = ClassQuery(-2, (between(P.ample, -3, 3),))
    result = enumerate_classes(P, query)
    assert result.completeness_bound.fits_in(8)
    assert set(result.solutions) == set(oracle_enumerate(P, query, 8).solutions)


def test_nef_test_finds_the_curve(family):
    P = family(-1, 1, 3)
    D, L = P.parse("D"), P.parse("L")
    # (D + L).L = 1 - 2 < 0
    result = roots_violating_nef(P, D + L)
    assert L in result.solutions
    assert result.pairing_bound == nef_pairing_bound(P, D + L)
    assert roots_violating_nef(P, D - L).is_empty()
    with pytest.raises(AnchorNotPositive):
        roots_violating_nef(P, L)


@given(st.data())
@settings(
    max_examples=1000,
    deadline=None,
    suppress_health_check=[HealthCheck.filter_too_much, HealthCheck.too_slow],
)
def test_enumerator_agrees_with_oracle(data):
    lattice = data.draw(hyperbolic_lattices())
    candidates = positive_classes(lattice)
    assume(candidates)
    anchor = data.draw(st.sampled_from(candidates))
    square = data.draw(st.sampled_from([-4, -2, 0, 2, 4]))
    low = data.draw(st.integers(-3, 3))
    width = data.draw(st.integers(0, 2))
    constraints = [between(anchor, low, low + width)]
    if data.draw(st.booleans()):
        other = DivisorClass(tuple(data.draw(st.integers(-2, 2)) for _ in range(lattice.rank)))
        constraints.append(data.draw(st.sampled_from([ge(other, 0), le(other, 1), eq(other, 1)])))
    query = ClassQuery(square, tuple(constraints), primitive_only=data.draw(st.booleans()))

    result = enumerate_classes(lattice, query)
    oracle = oracle_enumerate(lattice, query, ORACLE_BOX)
    for x in result.solutions:
        assert query.satisfied_by(lattice, x)
    # the enumerator is complete, so every solution in the box is found
    assert set(oracle.solutions) <= set(result.solutions)
    if result.completeness_bound.fits_in(ORACLE_BOX):
        assert set(result.solutions) == set(oracle.solutions)
        for x in result.solutions:
            assert all(lo <= c <= hi for c, lo, hi in zip(
                x.coords, result.completeness_bound.lower, result.completeness_bound.upper
            ))


@given(st.data())
@settings(
    max_examples=200,
    deadline=None,
    suppress_health_check=[HealthCheck.filter_too_much, HealthCheck.too_slow],
)
def test_nef_bound_is_sound(data):
    lattice = data.draw(hyperbolic_lattices())
    candidates = positive_classes(lattice, reach=1)
    assume(candidates)
    ample = data.draw(st.sampled_from(candidates))
    try:
        P = PolarizedLattice(lattice, ample)
    except PolarizationError:
        assume(False)
    delta = DivisorClass(tuple(data.draw(st.integers(-3, 3)) for _ in range(lattice.rank)))
    assume(lattice.square(delta) > 0 and lattice.pair(delta, ample) > 0)

    bound = nef_pairing_bound(P, delta)
    query = ClassQuery(-2, (ge(ample, 1), le(delta, -1)))
    for C in oracle_enumerate(P, query, 4).solutions:
        assert -bound <= lattice.pair(C, delta) <= -1
    violating = roots_violating_nef(P, delta)
    assert set(oracle_enumerate(P, query, 4).solutions) <= set(violating.solutions)


@pytest.mark.parametrize("w", [(-4, 6), (0, 5), (0, -5), (5, 0), (3, 0, -2), (2, 4, 6), (-1, 2, 1)])
def test_kernel_basis(w):
    g, u = enumerator._kernel_basis(w)
    assert g == math.gcd(*w)
    assert abs(sympy.Matrix(u).det()) == 1
    image = [sum(w[i] * u[i][j] for i in range(len(w))) for j in range(len(w))]
    assert image == [g] + [0] * (len(w) - 1)


def test_roots_at_pairing_one():
    lattice = IntLattice([[2, 1], [1, -2]])
    # x = (a, 1 - 2a) and x^2 = -2 force 5a(1 - a) = 0
    result = enumerate_classes(lattice, ClassQuery(-2, (eq(DivisorClass((1, 0)), 1),)))
    assert set(result.solutions) == {DivisorClass((0, 1)), DivisorClass((1, -1))}
    assert set(result.solutions) == set(oracle_enumerate(lattice, result.query, 6).solutions)


def test_caches_are_bounded():
    for cached in (enumerator._kernel_basis, enumerator._complement, enumerator._slice):
        assert cached.cache_info().maxsize is not None
