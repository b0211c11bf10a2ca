"""Decompositions of iH on a K3 surface of Picard rank one.

The Picard lattice is <2g - 2> generated by H. For i >= 3 and g >= 3 the
hyperplane bundle of the i-th Veronese embedding splits as H + H + (i - 2)H
into very ample summands; for g = 2 and i >= 5 it splits as 3H + H + (i - 4)H,
where H and 2H are double covers and the pairing (A1+A2+A3).H = 2i carries
the degree conditions.
"""
from .certificate import Certificate
from .families import FamilyOutOfRange
from .geometry import DecompositionCase, PolarizedLattice, classify_linear_system, validate_decomposition
from .lattice import DivisorClass, IntLattice


def generic_lattice(g):
    """Polarized lattice <2g - 2> with ample class H."""
    if g < 2:
        raise FamilyOutOfRange("genus must be at least 2, got %d" % g)
    return PolarizedLattice(IntLattice([[2 * g - 2]], labels=("H",)), DivisorClass((1,)))


def multiple_parts(i, g):
    """Multiples (a1, a2, a3) of H with a1 + a2 + a3 = i."""
    if g >= 3 and i >= 3:
        return 1, 1, i - 2
    if g == 2 and i >= 5:
        return 3, 1, i - 4
    raise FamilyOutOfRange("no decomposition of %dH for g = %d" % (i, g))


def verify_multiple(i, g):
    """Certificate that the Gaussian map hypotheses hold for iH.

    Args:
        i (int): Veronese degree
        g (int): genus of H

    Returns:
        Certificate: the decomposition with the classification of each summand
    """
    parts = multiple_parts(i, g)
    P = generic_lattice(g)
    H = P.ample
    A = tuple(a * H for a in parts)

    cert = Certificate("%dH = %s for g = %d" % (i, " + ".join("%dH" % a for a in parts), g))
    profiles = tuple(classify_linear_system(P, part) for part in A)
    cert.sub(validate_decomposition(P, DecompositionCase(H, A, profiles, multiple=i)))
    for part, profile in zip(A, profiles):
        cert.sub(profile.evidence, "classify %s" % P.describe(part))
    if g == 2:
        cert.inequality("(A1+A2+A3).H = 2i >= 10", P.lattice.pair(A[0] + A[1] + A[2], H), 10, expected=2 * i)
    return cert
