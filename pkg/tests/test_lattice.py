import numpy as np
import pytest
from hypothesis import HealthCheck, assume, given, settings, strategies as st

from k3lattice.lattice import (
    DimensionMismatch,
    DivisorClass,
    IntLattice,
    LatticeError,
    Obstruction,
    divisibility_obstruction,
    gram_determinant,
    signature,
)


@st.composite
def symmetric_grams(draw, even=True):
    n = draw(st.integers(2, 3))
    gram = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            value = draw(st.integers(-10, 10))
            if i == j and even:
                value -= value % 2
            gram[i][j] = gram[j][i] = value
    return gram


@st.composite
def unimodular_matrices(draw, n):
    u = np.array([[int(i == j) for j in range(n)] for i in range(n)], dtype=object)
    for _ in range(draw(st.integers(0, 6))):
        i = draw(st.integers(0, n - 1))
        j = draw(st.integers(0, n - 1).filter(lambda x: x != i))
        c = draw(st.integers(-3, 3))
        u[:, j] = u[:, j] + c * u[:, i]
    return u.tolist()


def test_families_from_the_table():
    assert IntLattice([[4, 5], [5, 2]]).disc == -17
    assert IntLattice([[2, 4, 2], [4, 2, 1], [2, 1, -2]]).disc == 30
    assert IntLattice([[2, 2], [2, -2]]).disc == -8
    assert IntLattice([[4, 5], [5, 2]]).signature() == (1, 1)
    assert signature(IntLattice([[2, 4, 2], [4, 2, 1], [2, 1, -2]])) == (1, 2)


@pytest.mark.parametrize(
    "gram, expected",
    [
        ([[2, 0], [0, -2]], (1, 1)),
        ([[0, 1], [1, 0]], (1, 1)),
        ([[-2, 0], [0, -2]], (0, 2)),
        ([[0, 1, 0], [1, 0, 0], [0, 0, -2]], (1, 2)),
        ([[-2, 1, 0], [1, -2, 1], [0, 1, -2]], (0, 3)),
    ],
)
def test_signature(gram, expected):
    assert IntLattice(gram, check_even=False).signature() == expected


def test_pairing_and_parse():
    lattice = IntLattice([[4, 5], [5, 2]], labels=["D", "L"])
    D, L = lattice.basis_class("D"), lattice.basis_class("L")
    assert lattice.pair(D, L) == 5
    assert lattice.square(2 * D + L) == 38
    assert lattice.parse("2D - L") == DivisorClass((2, -1))
    assert lattice.parse("-D + 3*L") == DivisorClass((-1, 3))
    assert lattice.describe(DivisorClass((2, -1))) == "2D - L"
    assert lattice.describe(DivisorClass((0, 0))) == "0"
    assert lattice.element({"L": 2, "D": -1}) == DivisorClass((-1, 2))


@pytest.mark.parametrize("text", ["", "2D -", "D L", "X", "D + + L"])
def test_parse_rejects(text):
    lattice = IntLattice([[4, 5], [5, 2]], labels=["D", "L"])
    with pytest.raises(LatticeError):
        lattice.parse(text)


@pytest.mark.parametrize(
    "gram",
    [
        [[3, 0], [0, -2]],
        [[2, 1], [0, -2]],
        [[2, 2], [2, 2]],
        [[2, 0, 0], [0, -2]],
    ],
)
def test_invalid_gram(gram):
    with pytest.raises(LatticeError):
        IntLattice(gram)


def test_dimension_mismatch():
    lattice = IntLattice([[4, 5], [5, 2]])
    with pytest.raises(DimensionMismatch):
        lattice.pair(DivisorClass((1, 0)), DivisorClass((1, 0, 0)))
    with pytest.raises(DimensionMismatch):
        DivisorClass((1, 0)) + DivisorClass((1, 0, 0))
    with pytest.raises(DimensionMismatch):
        lattice.divisibility_obstruction([[2, 1, 1], [1, -2, 1], [1, 1, -2]])


def test_divisibility_obstruction():
    lattice = IntLattice([[2, 4, 2], [4, 2, 1], [2, 1, -2]])
    # disc(D, R1, R2) = 12 against disc 30
    assert lattice.divisibility_obstruction([[2, 1, 1], [1, -2, 1], [1, 1, -2]]) == Obstruction.RULED_OUT
    assert divisibility_obstruction(lattice, lattice.gram) == Obstruction.NOT_RULED_OUT
    # singular prescriptions are never ruled out
    assert lattice.divisibility_obstruction([[0, 0, 0], [0, -2, 1], [0, 1, -2]]) == Obstruction.NOT_RULED_OUT

    rank2 = IntLattice([[4, 5], [5, 2]])
    # index 2 sublattice spanned by 2D, L has discriminant 4 disc
    assert rank2.divisibility_obstruction([[16, 10], [10, 2]]) == Obstruction.NOT_RULED_OUT
    assert rank2.divisibility_obstruction([[0, 1], [1, 4]]) == Obstruction.RULED_OUT
    # -34 is divisible by -17 but the quotient 2 is no square
    assert rank2.divisibility_obstruction([[2, 6], [6, 1]]) == Obstruction.RULED_OUT
    assert gram_determinant([[4, 5], [5, 2]]) == -17


def test_big_integers_stay_exact():
    big = 2 ** 80
    lattice = IntLattice([[2 * big, 1], [1, -2]])
    assert lattice.disc == -4 * big - 1
    assert lattice.square(DivisorClass((big, 1))) == 2 * big ** 3 + 2 * big - 2


@given(st.data())
@settings(max_examples=200, deadline=None, suppress_health_check=[HealthCheck.filter_too_much])
def test_discriminant_and_signature_are_unimodular_invariants(data):
    gram = data.draw(symmetric_grams())
    assume(gram_determinant(gram) != 0)
    lattice = IntLattice(gram)
    u = data.draw(unimodular_matrices(lattice.rank))
    other = lattice.change_basis(u)
    assert other.disc == lattice.disc
    assert other.signature() == lattice.signature()


@given(st.data())
@settings(max_examples=200, deadline=None, suppress_health_check=[HealthCheck.filter_too_much])
def test_sublattice_discriminant_is_index_squared_times_disc(data):
    gram = data.draw(symmetric_grams())
    assume(gram_determinant(gram) != 0)
    lattice = IntLattice(gram)
    n = lattice.rank
    m = data.draw(st.lists(st.lists(st.integers(-3, 3), min_size=n, max_size=n), min_size=n, max_size=n))
    index = gram_determinant(m)
    assume(index != 0)
    vs = [DivisorClass(row) for row in m]
    assert lattice.sublattice_discriminant(vs) == index ** 2 * lattice.disc
    assert lattice.divisibility_obstruction(lattice.gram_of(vs).tolist()) == Obstruction.NOT_RULED_OUT
