"""Exact integral lattices given by a Gram matrix.

Everything here is integer or rational arithmetic; Gram matrices are numpy
arrays of dtype object so entries stay arbitrary-precision Python ints.
"""
import math
import re
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import numpy as np
import sympy


class LatticeError(Exception):
    pass


class DimensionMismatch(LatticeError):
    pass


class Obstruction(Enum):
    RULED_OUT = "RuledOut"
    NOT_RULED_OUT = "NotRuledOut"


def as_object_matrix(rows):
    """Convert nested rows to a numpy matrix of Python ints.

    Args:
        rows (sequence): square nested sequence of integers

    Returns:
        array: object array holding exact ints
    """
    matrix = np.array([[int(entry) for entry in row] for row in rows], dtype=object)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise LatticeError("Gram matrix must be square, got shape %s" % (matrix.shape,))
    return matrix


def gram_determinant(rows):
    """Fraction-free (Bareiss) determinant of an integer matrix."""
    matrix = as_object_matrix(rows)
    if matrix.shape[0] == 0:
        return 1
    return int(sympy.Matrix(matrix.tolist()).det(method="bareiss"))


def _congruence_signs(rows):
    # symmetric Gaussian elimination over Q; only the signs of the pivots matter
    a = [[Fraction(entry) for entry in row] for row in rows]
    n = len(a)
    signs = []
    size = n
    while size:
        pivot = next((i for i in range(size) if a[i][i] != 0), None)
        if pivot is None:
            pair = next(
                ((i, j) for i in range(size) for j in range(i + 1, size) if a[i][j] != 0),
                None,
            )
            if pair is None:
                raise LatticeError("degenerate Gram matrix has no signature")
            i, j = pair
            # e_i -> e_i + e_j makes the (i, i) entry 2 a_ij
            for t in range(size):
                a[i][t] += a[j][t]
            for t in range(size):
                a[t][i] += a[t][j]
            pivot = i
        last = size - 1
        a[pivot], a[last] = a[last], a[pivot]
        for row in a:
            row[pivot], row[last] = row[last], row[pivot]
        p = a[last][last]
        signs.append(1 if p > 0 else -1)
        for i in range(last):
            factor = a[i][last] / p
            if factor:
                for t in range(last):
                    a[i][t] -= factor * a[last][t]
        size = last
    return signs


@dataclass(frozen=True)
class DivisorClass:
    """Integer coordinate vector on the basis of its lattice."""

    coords: tuple

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(int(c) for c in self.coords))

    def __len__(self):
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __add__(self, other):
        _check_same_rank(self, other)
        return DivisorClass(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other):
        _check_same_rank(self, other)
        return DivisorClass(tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self):
        return DivisorClass(tuple(-a for a in self.coords))

    def __mul__(self, scalar):
        return DivisorClass(tuple(int(scalar) * a for a in self.coords))

    __rmul__ = __mul__

    def is_zero(self):
        return not any(self.coords)

    def content(self):
        """gcd of the coordinates (0 for the zero class)."""
        return math.gcd(*self.coords) if self.coords else 0

    def divided(self, n):
        if n == 0 or any(c % n for c in self.coords):
            raise LatticeError("class %s is not divisible by %d" % (self.coords, n))
        return DivisorClass(tuple(c // n for c in self.coords))

    def array(self):
        return np.array(self.coords, dtype=object)


def _check_same_rank(a, b):
    if len(a.coords) != len(b.coords):
        raise DimensionMismatch(
            "classes of length %d and %d cannot be combined" % (len(a.coords), len(b.coords))
        )


_TERM = re.compile(r"\s*([+-]?)\s*(\d*)\s*\*?\s*([A-Za-z_][A-Za-z_0-9]*)\s*")


class IntLattice:
    """Even nondegenerate integral lattice.

    The Gram matrix is stored as a read-only object array; instances are
    immutable and hashable through their Gram entries and labels.
    """

    def __init__(self, gram, labels=None, check_even=True):
        """Init.

        Args:
            gram (sequence): symmetric integer matrix
            labels (sequence, optional): basis names. Defaults to e0, e1, ...
            check_even (bool, optional): require even diagonal. Defaults to True.
        """
        matrix = as_object_matrix(gram)
        rank = matrix.shape[0]
        if rank < 1:
            raise LatticeError("lattice must have positive rank")
        if any(matrix[i, j] != matrix[j, i] for i in range(rank) for j in range(i)):
            raise LatticeError("Gram matrix is not symmetric")
        if check_even and any(matrix[i, i] % 2 for i in range(rank)):
            raise LatticeError("lattice is not even: diagonal %s" % [matrix[i, i] for i in range(rank)])

        if labels is None:
            labels = ["e%d" % i for i in range(rank)]
        labels = tuple(str(label) for label in labels)
        if len(labels) != rank:
            raise LatticeError("%d labels given for a rank %d lattice" % (len(labels), rank))
        if len(set(labels)) != rank:
            raise LatticeError("basis labels must be distinct: %s" % (labels,))

        matrix.flags.writeable = False
        self._matrix = matrix
        self.labels = labels
        self.rank = rank
        self.gram = tuple(tuple(int(x) for x in row) for row in matrix.tolist())

        self.disc = gram_determinant(self.gram)
        if self.disc == 0:
            raise LatticeError("Gram matrix is degenerate")

        self._signature = None

    def __eq__(self, other):
        return isinstance(other, IntLattice) and (self.gram, self.labels) == (other.gram, other.labels)

    def __hash__(self):
        return hash((self.gram, self.labels))

    def __repr__(self):
        return "IntLattice(labels=%s, gram=%s)" % (list(self.labels), [list(r) for r in self.gram])

    @property
    def matrix(self):
        return self._matrix

    def _coords(self, x):
        coords = x.coords if isinstance(x, DivisorClass) else tuple(x)
        if len(coords) != self.rank:
            raise DimensionMismatch(
                "class of length %d in a rank %d lattice" % (len(coords), self.rank)
            )
        return np.array(coords, dtype=object)

    def pair(self, a, b):
        """Intersection number a.b = a^T G b."""
        return int(np.dot(np.dot(self._coords(a), self._matrix), self._coords(b)))

    def square(self, a):
        return self.pair(a, a)

    def dual_form(self, a):
        """Coefficients w with a.x = w.x for every x (the row G a)."""
        return tuple(int(v) for v in np.dot(self._matrix, self._coords(a)))

    def discriminant(self):
        return self.disc

    def signature(self):
        """(positive, negative) index of inertia.

        Uses the signs of the leading principal minors when none vanishes and
        exact congruence diagonalization over Q otherwise.
        """
        if self._signature is None:
            minors = [1] + [gram_determinant(self._matrix[:i, :i]) for i in range(1, self.rank + 1)]
            if all(minors):
                negative = sum(1 for a, b in zip(minors, minors[1:]) if (a > 0) != (b > 0))
            else:
                negative = _congruence_signs(self.gram).count(-1)
            self._signature = (self.rank - negative, negative)
        return self._signature

    def is_hyperbolic(self):
        return self.signature() == (1, self.rank - 1)

    def is_negative_definite(self):
        return self.signature() == (0, self.rank)

    def gram_of(self, vs):
        """Gram matrix of a tuple of classes."""
        if not vs:
            raise LatticeError("need at least one class")
        basis = np.array([self._coords(v) for v in vs], dtype=object)
        return np.dot(np.dot(basis, self._matrix), basis.T)

    def sublattice_discriminant(self, vs):
        return gram_determinant(self.gram_of(vs))

    def divisibility_obstruction(self, prescribed):
        """Decide whether a prescribed Gram matrix cannot be a full-rank sublattice.

        A full-rank sublattice of index n has discriminant n^2 disc(L), so a
        nondegenerate prescribed Gram whose determinant is not a square multiple
        of disc(L) is impossible. Nothing is ever asserted to exist.

        Args:
            prescribed (sequence): rank x rank symmetric matrix of pairings

        Returns:
            Obstruction: RULED_OUT or NOT_RULED_OUT
        """
        matrix = as_object_matrix(prescribed)
        if matrix.shape[0] != self.rank:
            raise DimensionMismatch(
                "prescribed Gram of size %d for a rank %d lattice" % (matrix.shape[0], self.rank)
            )
        value = gram_determinant(matrix)
        if value == 0:
            return Obstruction.NOT_RULED_OUT
        if value % self.disc:
            return Obstruction.RULED_OUT
        quotient = value // self.disc
        if quotient < 0 or math.isqrt(quotient) ** 2 != quotient:
            return Obstruction.RULED_OUT
        return Obstruction.NOT_RULED_OUT

    def basis_class(self, label):
        index = self.index_of(label)
        return DivisorClass(tuple(int(i == index) for i in range(self.rank)))

    def index_of(self, label):
        if label not in self.labels:
            raise LatticeError("unknown basis label '%s', use one of %s" % (label, list(self.labels)))
        return self.labels.index(label)

    def element(self, coefficients):
        """Class from a {label: coefficient} mapping."""
        coords = [0] * self.rank
        for label, value in coefficients.items():
            coords[self.index_of(label)] += int(value)
        return DivisorClass(tuple(coords))

    def parse(self, text):
        """Parse a linear expression such as "2D - L + R"."""
        compact = text.replace(" ", "")
        if not compact:
            raise LatticeError("empty class expression")
        coords = [0] * self.rank
        position = 0
        for match in _TERM.finditer(compact):
            if match.start() != position or not match.group(0):
                break
            sign, count, label = match.groups()
            if position and not sign:
                break
            value = int(count) if count else 1
            coords[self.index_of(label)] += -value if sign == "-" else value
            position = match.end()
        if position != len(compact):
            raise LatticeError("cannot parse class expression '%s'" % text)
        return DivisorClass(tuple(coords))

    def describe(self, x):
        """Render a class as a linear expression in the basis labels."""
        terms = []
        for label, value in zip(self.labels, x.coords):
            if value == 0:
                continue
            magnitude = "" if abs(value) == 1 else str(abs(value))
            sign = "-" if value < 0 else "+"
            terms.append((sign, magnitude + label))
        if not terms:
            return "0"
        first_sign, first = terms[0]
        text = ("-" if first_sign == "-" else "") + first
        for sign, term in terms[1:]:
            text += " %s %s" % (sign, term)
        return text

    def change_basis(self, unimodular):
        """Lattice with Gram U^T G U for an integer matrix U."""
        u = as_object_matrix(unimodular)
        return IntLattice(np.dot(np.dot(u.T, self._matrix), u).tolist(), check_even=False)


def signature(lattice):
    return lattice.signature()


def divisibility_obstruction(lattice, prescribed):
    return lattice.divisibility_obstruction(prescribed)
