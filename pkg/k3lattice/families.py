"""The Picard lattices Gamma_{jkh} and the rows of the decomposition table.

Rank 2 has basis (D, L) and Gram [[2h, k], [k, 2j]]; rank 3 has basis
(D, L, R) and Gram [[2h, k, 2], [k, 4j - 2, j], [2, j, -2]]. In both cases D is
the ample class.
"""
import math
from dataclasses import dataclass
from enum import Enum

import sympy

from .certificate import Certificate, NodeKind
from .enumerator import ClassQuery, enumerate_classes, eq
from .geometry import PolarizationError, PolarizedLattice
from .lattice import IntLattice


class FamilyOutOfRange(Exception):
    pass


class FamilyValidationError(Exception):
    pass


class Shape(Enum):
    RANK2 = "Rank2"
    RANK3 = "Rank3"


h_sym, j_sym, k_sym = sympy.symbols("h j k", integer=True)


@dataclass(frozen=True)
class LatticeFamilyParams:
    shape: Shape
    j: int
    k: int
    h: int

    @classmethod
    def infer(cls, j, k, h, rank=None):
        """Parameters with the shape the published ranges give (j, k, h).

        Args:
            j (int): j
            k (int): k
            h (int): h
            rank (int, optional): force rank 2 or 3. Defaults to None.
        """
        if rank is None:
            rank = 3 if (j == 0 and k in (1, 2)) or (j, k, h) == (1, 4, 1) else 2
        if rank not in (2, 3):
            raise FamilyOutOfRange("rank must be 2 or 3, got %s" % rank)
        return cls(Shape.RANK2 if rank == 2 else Shape.RANK3, int(j), int(k), int(h))

    @property
    def rank(self):
        return 2 if self.shape == Shape.RANK2 else 3

    @property
    def labels(self):
        return ("D", "L") if self.shape == Shape.RANK2 else ("D", "L", "R")

    def gram(self):
        j, k, h = self.j, self.k, self.h
        if self.shape == Shape.RANK2:
            return [[2 * h, k], [k, 2 * j]]
        return [[2 * h, k, 2], [k, 4 * j - 2, j], [2, j, -2]]

    def in_table_range(self):
        j, k, h = self.j, self.k, self.h
        if self.shape == Shape.RANK2:
            return (
                (j in (1, 2) and k >= j + 4 and h == 2)
                or (j == -1 and k in (1, 2) and h >= 5 - 2 * k)
                or (j, k, h) == (1, 5, 3)
            )
        return (j == 0 and k in (1, 2) and h >= 5 - 2 * k) or (j, k, h) == (1, 4, 1)

    def to_dict(self):
        return {"shape": self.shape.value, "j": self.j, "k": self.k, "h": self.h}

    def __str__(self):
        return "Gamma(j=%d, k=%d, h=%d, %s)" % (self.j, self.k, self.h, self.shape.value)


def unbounded_h_min(params):
    """Smallest h of the published range when that range is unbounded in h."""
    if params.j in (-1, 0) and params.k in (1, 2):
        return 5 - 2 * params.k
    return None


def _positive_for_all(expr, h_min):
    """expr(h) > 0 for every integer h >= h_min.

    Sufficient test: after h = h_min + t every coefficient in t is
    nonnegative and the constant term is positive.
    """
    t = sympy.Symbol("t", nonnegative=True)
    poly = sympy.Poly(sympy.expand(expr.subs(h_sym, h_min + t)), t)
    coefficients = poly.all_coeffs()
    return all(c >= 0 for c in coefficients) and coefficients[-1] > 0


def _rank2_replay(P, params, cert):
    # d = aD + bL with d.D = 0 spans with D a full-rank sublattice of Gram diag(2h, -2)
    prescribed = [[2 * params.h, 0], [0, -2]]
    step = cert.divisibility("disc Gamma divides disc(D, d) = -4h", P.lattice, prescribed)
    if not step.ok:
        # inconclusive, not a contradiction
        step.ok, step.decided = True, False
    return step.decided


def _rank3_replay(P, params, cert):
    j, k, h = params.j, params.k, params.h
    alpha, beta = sympy.symbols("alpha beta", integer=True)
    gram = sympy.Matrix(params.gram())
    # d.D = 0 solved for gamma
    gamma = -h * alpha - sympy.Rational(k, 2) * beta
    d = sympy.Matrix([alpha, beta, gamma])
    equation = sympy.expand((d.T * gram * d)[0, 0] + 2)
    quadratic = sympy.Poly(-equation, alpha)
    if quadratic.degree() != 2:
        cert.add(NodeKind.QUADRATIC_ARGUMENT, "d^2 = -2 is not quadratic in alpha", decided=False)
        return None
    a2, a1, a0 = quadratic.all_coeffs()
    derived = sympy.expand((a1 ** 2 - 4 * a2 * a0) / 4)
    printed = sympy.expand(
        h * (h * (k + j) ** 2 - 2 * (h + 1) * (j * k + sympy.Rational(k * k, 2) + 2 - 4 * j)) * beta ** 2
        + 4 * h * (h + 1)
    )
    cert.add(
        NodeKind.SYMBOLIC_CHECK,
        "discriminant in alpha of d^2 = -2 after d.D = 0",
        derived == printed,
        derived=str(derived),
        printed=str(printed),
    )

    slope = sympy.Poly(derived, beta).coeff_monomial(beta ** 2)
    constant = sympy.Poly(derived, beta).coeff_monomial(1)
    if slope >= 0:
        cert.add(
            NodeKind.QUADRATIC_ARGUMENT,
            "beta is unbounded: the beta^2 coefficient %s is not negative" % slope,
            decided=False,
        )
        return None

    beta_max = math.isqrt(int(constant // -slope))
    solutions = []
    lead = int(a2)
    for b in range(-beta_max, beta_max + 1):
        # a1^2 - 4 a2 a0 is an integer even when k is odd
        full = 4 * derived.subs(beta, b)
        if full < 0:
            continue
        full = int(full)
        root = math.isqrt(full)
        if root * root != full:
            continue
        middle = int(a1.subs(beta, b))
        for numerator in {-middle + root, -middle - root}:
            if numerator % (2 * lead):
                continue
            a = numerator // (2 * lead)
            g = gamma.subs({alpha: a, beta: b})
            if g.is_integer:
                solutions.append((a, b, int(g)))
    ruled_out = not solutions
    cert.add(
        NodeKind.QUADRATIC_ARGUMENT,
        "no integral (alpha, beta, gamma) with |beta| <= %d solves d^2 = -2, d.D = 0" % beta_max,
        ruled_out,
        beta_bound=beta_max,
        non_square=str(constant),
        solutions=[list(s) for s in sorted(set(solutions))],
    )
    return ruled_out


def _symbolic_checks(params, cert):
    h_min = unbounded_h_min(params)
    if h_min is None:
        return
    j, k = params.j, params.k
    if params.shape == Shape.RANK2:
        disc = 4 * h_sym * j - k * k
        expr = disc ** 2 - 16 * h_sym ** 2
        cert.add(
            NodeKind.SYMBOLIC_CHECK,
            "|4hj - k^2| > 4h for all h >= %d" % h_min,
            _positive_for_all(expr, h_min),
            expression=str(sympy.expand(expr)),
        )
        return
    # -(beta^2 coefficient of the alpha-discriminant) / h
    steep = -(h_sym * (k + j) ** 2 - 2 * (h_sym + 1) * (j * k + sympy.Rational(k * k, 2) + 2 - 4 * j))
    cert.add(
        NodeKind.SYMBOLIC_CHECK,
        "alpha-discriminant is negative for beta != 0 and all h >= %d" % h_min,
        _positive_for_all(h_sym * steep - 4 * h_sym * (h_sym + 1), h_min)
        and _positive_for_all(steep, h_min),
        expression=str(sympy.expand(h_sym * steep - 4 * h_sym * (h_sym + 1))),
    )
    cert.add(
        NodeKind.SYMBOLIC_CHECK,
        "(2h)^2 < 4h(h+1) < (2h+1)^2 for all h >= %d, so 4h(h+1) is not a square" % h_min,
        _positive_for_all(4 * h_sym * (h_sym + 1) - 4 * h_sym ** 2, h_min)
        and _positive_for_all((2 * h_sym + 1) ** 2 - 4 * h_sym * (h_sym + 1), h_min),
    )


def root_exclusion(P, params):
    """Certificate that no root is orthogonal to D, by two independent methods.

    Args:
        P (PolarizedLattice): the family with ample class D
        params (LatticeFamilyParams): its parameters

    Returns:
        Certificate: enumeration node plus the divisibility (rank 2) or
        quadratic (rank 3) replay, and closed-form checks for unbounded h
    """
    cert = Certificate("Claim3.3", params)
    lattice = P.lattice
    cert.inequality("signature is (1, rank - 1)", int(lattice.is_hyperbolic()), 1, relation="==")
    result = enumerate_classes(P, ClassQuery(-2, (eq(P.ample, 0),)))
    cert.enumeration("no class d with d^2 = -2 and D.d = 0", lattice, result)
    if params.shape == Shape.RANK2:
        replay = _rank2_replay(P, params, cert)
    else:
        replay = _rank3_replay(P, params, cert)
    if params.in_table_range():
        _symbolic_checks(params, cert)
    return cert, result.is_empty(), replay


def build_family(params, explore=False):
    """Construct Gamma_{jkh} polarized by D.

    Args:
        params (LatticeFamilyParams): family parameters
        explore (bool, optional): allow parameters outside the published
            ranges. Defaults to False.

    Returns:
        tuple: (PolarizedLattice, Certificate of the root exclusion)
    """
    if not explore and not params.in_table_range():
        raise FamilyOutOfRange("%s is outside the published parameter ranges" % params)
    lattice = IntLattice(params.gram(), labels=params.labels)
    ample = lattice.basis_class("D")
    try:
        P = PolarizedLattice(lattice, ample)
    except PolarizationError as err:
        raise FamilyValidationError("%s: %s" % (params, err))

    cert, enumeration_empty, replay = root_exclusion(P, params)
    assert enumeration_empty, "polarization check and root enumeration disagree"
    if replay is False and params.shape == Shape.RANK3:
        raise FamilyValidationError(
            "%s: the quadratic argument finds a root the enumeration missed" % params
        )
    if params.in_table_range() and (replay is not True or cert.first_failure() is not None):
        raise FamilyValidationError(
            "%s: the root exclusion argument does not conclude (%s)" % (params, cert.first_failure())
        )
    return P, cert


@dataclass(frozen=True)
class TableRow:
    """One row of the decomposition table.

    `disc` and `genus` are sympy expressions in h, j, k; `H` and `A` are
    class expressions in the basis labels.
    """

    index: int
    i: int
    shape: Shape
    disc: object
    genus: object
    H: str
    A: tuple
    claim: str

    def matches(self, params):
        j, k, h = params.j, params.k, params.h
        if params.shape != self.shape:
            return False
        return {
            1: j in (1, 2) and k >= j + 4 and h == 2,
            2: j == 1 and k in (5, 6, 7) and h == 2,
            3: (j, k, h) == (1, 5, 3),
            4: j == -1 and k == 1 and h >= 3,
            5: j == -1 and k == 2 and h >= 1,
            6: j == 0 and k == 1 and h >= 3,
            7: j == 0 and k == 2 and h >= 1,
            8: (j, k, h) == (1, 5, 2),
            9: (j, k, h) == (1, 4, 1),
        }[self.index]

    def instances(self, h_max, k_max):
        """Concrete parameters of this row up to the caps, in canonical order."""
        out = []
        for j in (-1, 0, 1, 2):
            for k in range(1, max(k_max, 7) + 1):
                for h in range(1, max(h_max, 3) + 1):
                    params = LatticeFamilyParams.infer(j, k, h, self.shape_rank)
                    if not self.matches(params):
                        continue
                    if (unbounded_h_min(params) is not None and h > h_max) or (
                        self.index == 1 and k > k_max
                    ):
                        continue
                    out.append(params)
        return out

    @property
    def shape_rank(self):
        return 2 if self.shape == Shape.RANK2 else 3

    @property
    def free_symbol(self):
        """Parameter the row is unbounded in, None for rows with finitely many instances."""
        return {1: k_sym, 4: h_sym, 5: h_sym, 6: h_sym, 7: h_sym}.get(self.index)

    def evaluate(self, params):
        values = {h_sym: params.h, j_sym: params.j, k_sym: params.k}
        return int(self.disc.subs(values)), int(self.genus.subs(values))

    def to_dict(self):
        return {
            "index": self.index,
            "i": self.i,
            "rank": self.shape_rank,
            "disc": str(self.disc),
            "genus": str(self.genus),
            "H": self.H,
            "A": list(self.A),
            "claim": self.claim,
        }


TABLE = (
    TableRow(1, 1, Shape.RANK2, 8 * j_sym - k_sym ** 2, 2 * k_sym + j_sym + 9, "2D + L", ("D", "D", "L"), "3.12"),
    TableRow(2, 1, Shape.RANK2, 8 - k_sym ** 2, 2 * k_sym + 7, "D + 2L", ("D", "L", "L"), "3.12"),
    TableRow(3, 1, Shape.RANK2, sympy.Integer(-13), sympy.Integer(18), "D + 2L", ("D", "L", "L"), "3.12"),
    TableRow(4, 2, Shape.RANK2, -4 * h_sym - 1, 4 * h_sym - 2, "2D - L", ("2D - L", "D", "D - L"), "3.6"),
    TableRow(5, 2, Shape.RANK2, -4 * h_sym - 4, 4 * h_sym + 4, "2D + L", ("2D + L", "D", "D + L"), "3.7"),
    TableRow(6, 2, Shape.RANK3, 8 * h_sym + 10, 4 * h_sym + 1, "2D - L + R", ("2D - L + R", "D", "D - L + R"), "3.8"),
    TableRow(7, 2, Shape.RANK3, 8 * h_sym + 16, 4 * h_sym + 7, "2D + L + R", ("2D + L + R", "D + L", "D + R"), "3.9"),
    TableRow(8, 2, Shape.RANK2, sympy.Integer(-17), sympy.Integer(9), "D + L", ("D + L", "D", "L"), "3.10"),
    TableRow(9, 2, Shape.RANK3, sympy.Integer(30), sympy.Integer(7), "D + L", ("D + L", "D", "L"), "3.11"),
)


def rows_for(params):
    return [row for row in TABLE if row.matches(params)]
