"""K3 predicates on a polarized Picard lattice.

Every verdict is reached by finite enumeration in the lattice; whenever the
lattice cannot decide a fact the answer is Unknown rather than a guess.
"""
from dataclasses import dataclass
from enum import Enum

from .certificate import Certificate, NodeKind
from .enumerator import ClassQuery, between, enumerate_classes, eq, ge, roots_violating_nef
from .lattice import DivisorClass, IntLattice


class PolarizationError(Exception):
    pass


class PreconditionNef(Exception):
    pass


class LinearSystemError(Exception):
    pass


class DecompositionError(Exception):
    pass


class Effectivity(Enum):
    EFFECTIVE = "Effective"
    NOT_EFFECTIVE = "NotEffective"
    UNKNOWN = "Unknown"


class NefStatus(Enum):
    NEF_CERTIFIED = "NefCertified"
    NOT_NEF = "NotNef"
    UNKNOWN = "Unknown"


class Verdict(Enum):
    VERY_AMPLE = "VeryAmple"
    BIRATIONAL_CONTRACTING = "BirationalContracting"
    DOUBLE_COVER_P2 = "DoubleCoverP2"
    DOUBLE_COVER_VERONESE = "DoubleCoverVeronese"
    NOT_NEF_CERTIFIED = "NotNefCertified"
    UNKNOWN = "Unknown"


class Irreducibility(Enum):
    CERTIFIED_IRREDUCIBLE = "CertifiedIrreducible"
    DECOMPOSITION_EXISTS = "DecompositionExists"
    UNKNOWN = "Unknown"


SAINT_DONAT = "Lemma 3.5 (Saint-Donat, Mori Theorem 5, Mayer Proposition 2)"
RIEMANN_ROCH = "Riemann-Roch on a K3 surface"
GAUSSIAN_MAP = "Lemma 2.1 and Lemma 2.2"
MULTIPLES = "Saint-Donat on multiples of an ample line bundle"
VERY_AMPLE_PRODUCT = "tensor products of very ample line bundles"


class PolarizedLattice:
    """Hyperbolic even lattice together with an ample class D0.

    Construction enumerates the roots orthogonal to D0 and refuses the
    polarization if there is one.
    """

    def __init__(self, lattice, ample):
        """Init.

        Args:
            lattice (IntLattice): Picard lattice
            ample (DivisorClass): ample class D0
        """
        if not isinstance(lattice, IntLattice):
            raise PolarizationError("expected an IntLattice, got %r" % (lattice,))
        if lattice.square(ample) <= 0:
            raise PolarizationError("ample class has D0^2 = %d <= 0" % lattice.square(ample))
        if not lattice.is_hyperbolic():
            raise PolarizationError(
                "Picard lattice of signature %s is not hyperbolic" % (lattice.signature(),)
            )
        self.lattice = lattice
        self.ample = ample
        self.root_check = enumerate_classes(lattice, ClassQuery(-2, (eq(ample, 0),)))
        if not self.root_check.is_empty():
            raise PolarizationError(
                "D0 = %s is orthogonal to the root %s"
                % (lattice.describe(ample), lattice.describe(self.root_check.solutions[0]))
            )

    def __repr__(self):
        return "PolarizedLattice(%r, ample=%s)" % (self.lattice, self.lattice.describe(self.ample))

    def parse(self, text):
        return self.lattice.parse(text)

    def describe(self, x):
        return self.lattice.describe(x)

    def degree(self, x):
        return self.lattice.pair(x, self.ample)


@dataclass
class NefVerdict:
    status: NefStatus
    witness: DivisorClass = None
    result: object = None


@dataclass
class IrreducibilityVerdict:
    status: Irreducibility
    witness: tuple = ()
    candidates: int = 0


@dataclass
class LinearSystemProfile:
    verdict: Verdict
    contracted: tuple = ()
    evidence: Certificate = None
    finite: bool = None
    half: DivisorClass = None
    blocking: str = None


@dataclass
class DecompositionCase:
    """A1 + A2 + A3 = multiple * H."""

    H: DivisorClass
    A: tuple
    profiles: tuple = None
    multiple: int = 1


def genus(P, H):
    """Genus of a smooth curve in |H|, that is H^2/2 + 1."""
    square = P.lattice.square(H)
    assert square % 2 == 0, "odd square %d in an even lattice" % square
    return square // 2 + 1


def is_indivisible(P, H):
    return H.content() == 1


def is_effective(P, x):
    if x.is_zero():
        return Effectivity.NOT_EFFECTIVE
    square = P.lattice.square(x)
    if square <= -4:
        return Effectivity.UNKNOWN
    degree = P.degree(x)
    if degree > 0:
        return Effectivity.EFFECTIVE
    if degree < 0:
        return Effectivity.NOT_EFFECTIVE
    if square == -2:
        return Effectivity.NOT_EFFECTIVE
    return Effectivity.UNKNOWN


def is_nef(P, delta):
    lattice = P.lattice
    if lattice.square(delta) <= 0 or P.degree(delta) <= 0:
        return NefVerdict(NefStatus.UNKNOWN)
    result = roots_violating_nef(P, delta)
    if result.is_empty():
        return NefVerdict(NefStatus.NEF_CERTIFIED, result=result)
    return NefVerdict(NefStatus.NOT_NEF, witness=result.solutions[0], result=result)


def base_point_exceptions(P, delta):
    """All (a, F, G) with delta = aF + G, a >= 2, F^2 = 0, G^2 = -2, F.G = 1, G effective.

    Such a decomposition forces F.delta = 1, which is added to the search;
    G.D0 >= 1 bounds F.D0 by (delta.D0 - 1) / a.
    """
    lattice = P.lattice
    degree = P.degree(delta)
    if degree < 3:
        return [], None
    query = ClassQuery(0, (eq(delta, 1), between(P.ample, 1, (degree - 1) // 2)))
    isotropic = enumerate_classes(P, query)
    found = []
    for F in isotropic.solutions:
        for a in range(2, (degree - 1) // P.degree(F) + 1):
            G = delta - a * F
            if (
                lattice.square(G) == -2
                and lattice.pair(F, G) == 1
                and is_effective(P, G) == Effectivity.EFFECTIVE
            ):
                found.append((a, F, G))
    return found, isotropic


def _check_nef(P, delta, evidence, nef_assumption):
    nef = is_nef(P, delta)
    if nef.status == NefStatus.NOT_NEF:
        evidence.enumeration("effective roots C with C.delta < 0", P.lattice, nef.result, expect_empty=None)
        return nef
    if nef.status == NefStatus.NEF_CERTIFIED:
        evidence.enumeration("no effective root C with C.delta < 0 (nef)", P.lattice, nef.result)
        return nef
    if nef_assumption is None:
        raise PreconditionNef(
            "cannot certify that %s is nef; pass the argument as an assumption" % P.describe(delta)
        )
    evidence.assumption(nef_assumption)
    return nef


def _classify_veronese(P, delta, evidence):
    lattice = P.lattice
    half = delta.divided(2)
    evidence.add(NodeKind.CLASSIFICATION, "delta = 2B with B^2 = 2", half=P.describe(half))
    exceptions, isotropic = base_point_exceptions(P, half)
    if isotropic is not None:
        evidence.enumeration("no base point pattern for B", lattice, isotropic, expect_empty=None)
    if exceptions:
        return LinearSystemProfile(
            Verdict.UNKNOWN, evidence=evidence, half=half,
            blocking="B may have base points along %s" % P.describe(exceptions[0][1]),
        )
    return LinearSystemProfile(Verdict.DOUBLE_COVER_VERONESE, evidence=evidence, half=half)


def _classify_multiple(P, delta, content, nef, evidence, nef_assumption):
    # delta = nB with B primitive, n = content
    lattice = P.lattice
    B = delta.divided(content)
    evidence.add(NodeKind.CLASSIFICATION, "delta = %dB" % content, B=P.describe(B))
    if content >= 3:
        roots = enumerate_classes(P, ClassQuery(-2, (eq(B, 0), ge(P.ample, 1))))
        evidence.enumeration("effective roots orthogonal to B", lattice, roots, expect_empty=None)
        if nef.status == NefStatus.NEF_CERTIFIED and roots.is_empty():
            evidence.cite(MULTIPLES, "nB is very ample for B ample and n >= 3")
            evidence.add(NodeKind.CLASSIFICATION, "very ample")
            return LinearSystemProfile(Verdict.VERY_AMPLE, evidence=evidence)
        blocking = "B = %s is not certified ample" % P.describe(B)
    else:
        inner = classify_linear_system(P, B, nef_assumption)
        evidence.sub(inner.evidence, "classify B = %s" % P.describe(B))
        if inner.verdict == Verdict.VERY_AMPLE:
            evidence.cite(VERY_AMPLE_PRODUCT, "2B is very ample when B is")
            evidence.add(NodeKind.CLASSIFICATION, "very ample")
            return LinearSystemProfile(Verdict.VERY_AMPLE, evidence=evidence)
        blocking = "B = %s is not very ample" % P.describe(B)
    evidence.add(NodeKind.CLASSIFICATION, blocking, decided=False, content=content)
    return LinearSystemProfile(Verdict.UNKNOWN, evidence=evidence, blocking=blocking)


def classify_linear_system(P, delta, nef_assumption=None):
    """Decide the behaviour of |delta| by the Saint-Donat ladder.

    Args:
        P (PolarizedLattice): polarized lattice
        delta (DivisorClass): class with delta^2 >= 2
        nef_assumption (str, optional): quoted argument used when nefness
            cannot be certified by enumeration. Defaults to None.

    Returns:
        LinearSystemProfile: verdict with its evidence certificate
    """
    lattice = P.lattice
    square = lattice.square(delta)
    if square < 2:
        raise LinearSystemError("%s has square %d < 2" % (P.describe(delta), square))

    evidence = Certificate("classify %s" % P.describe(delta))
    evidence.cite(SAINT_DONAT, "very ampleness and base point freeness criteria")

    nef = _check_nef(P, delta, evidence, nef_assumption)
    if nef.status == NefStatus.NOT_NEF:
        return LinearSystemProfile(
            Verdict.NOT_NEF_CERTIFIED, evidence=evidence,
            blocking="effective root %s pairs negatively" % P.describe(nef.witness),
        )

    content = delta.content()
    if content > 1:
        if content == 2 and lattice.square(delta.divided(2)) == 2:
            return _classify_veronese(P, delta, evidence)
        return _classify_multiple(P, delta, content, nef, evidence, nef_assumption)

    exceptions, isotropic = base_point_exceptions(P, delta)
    if isotropic is not None:
        evidence.enumeration(
            "isotropic F with F.delta = 1 of small degree", lattice, isotropic, expect_empty=None
        )
    if exceptions:
        a, F, G = exceptions[0]
        blocking = "delta = %dF + G with F = %s, G = %s" % (a, P.describe(F), P.describe(G))
        evidence.add(NodeKind.CLASSIFICATION, blocking, decided=False)
        return LinearSystemProfile(Verdict.UNKNOWN, evidence=evidence, blocking=blocking)

    roots = enumerate_classes(P, ClassQuery(-2, (eq(delta, 0), ge(P.ample, 1))))

    if square == 2:
        evidence.enumeration("effective roots orthogonal to delta", lattice, roots, expect_empty=None)
        finite = roots.is_empty()
        evidence.add(NodeKind.CLASSIFICATION, "2:1 morphism onto P2", finite=finite)
        return LinearSystemProfile(Verdict.DOUBLE_COVER_P2, evidence=evidence, finite=finite)

    isotropic = enumerate_classes(P, ClassQuery(0, (between(delta, 1, 2), ge(P.ample, 1))))
    evidence.enumeration("isotropic F with F.delta in {1, 2}", lattice, isotropic, expect_empty=None)
    evidence.enumeration("effective roots orthogonal to delta", lattice, roots, expect_empty=None)

    if isotropic.is_empty() and roots.is_empty():
        profile = LinearSystemProfile(Verdict.VERY_AMPLE, evidence=evidence)
        evidence.add(NodeKind.CLASSIFICATION, "very ample")
    elif any(lattice.pair(F, delta) == 2 for F in isotropic.solutions):
        F = next(F for F in isotropic.solutions if lattice.pair(F, delta) == 2)
        blocking = "isotropic class %s with F.delta = 2" % P.describe(F)
        evidence.add(NodeKind.CLASSIFICATION, blocking, decided=False)
        return LinearSystemProfile(Verdict.UNKNOWN, evidence=evidence, blocking=blocking)
    else:
        for Z in roots.solutions:
            check = certify_irreducible(P, Z)
            if check.status != Irreducibility.CERTIFIED_IRREDUCIBLE:
                blocking = "contracted root %s may be reducible" % P.describe(Z)
                evidence.add(NodeKind.CLASSIFICATION, blocking, decided=False)
                return LinearSystemProfile(Verdict.UNKNOWN, evidence=evidence, blocking=blocking)
        evidence.add(
            NodeKind.CLASSIFICATION, "birational morphism",
            contracted=[P.describe(Z) for Z in roots.solutions],
        )
        profile = LinearSystemProfile(
            Verdict.BIRATIONAL_CONTRACTING, contracted=roots.solutions, evidence=evidence
        )

    # very ample => base point free => nef
    if profile.verdict == Verdict.VERY_AMPLE:
        assert not exceptions and nef.status != NefStatus.NOT_NEF
        assert roots.is_empty()
    return profile


def certify_irreducible(P, C):
    """Look for a splitting of C into curve candidates.

    A candidate is a class x with x^2 >= -2 and x.D0 >= 1; the Hodge index
    theorem bounds x^2 D0^2 <= (x.D0)^2, so each degree has finitely many.

    Returns:
        IrreducibilityVerdict: CertifiedIrreducible when no multiset of two or
        more candidates sums to C, otherwise one witness decomposition
    """
    if is_effective(P, C) != Effectivity.EFFECTIVE:
        raise LinearSystemError("%s is not certified effective" % P.describe(C))
    lattice = P.lattice
    degree = P.degree(C)
    d2 = lattice.square(P.ample)

    by_degree = {}
    for d in range(1, degree):
        classes = []
        for s in range(-2, d * d // d2 + 1, 2):
            classes.extend(enumerate_classes(P, ClassQuery(s, (eq(P.ample, d),))).solutions)
        by_degree[d] = tuple(sorted(classes, key=lambda x: x.coords))
    candidates = [x for d in range(1, degree) for x in by_degree[d]]
    members = set(candidates)

    memo = {}

    def as_sum(rest):
        # parts summing to `rest`, or None
        if rest in memo:
            return memo[rest]
        memo[rest] = None
        if rest in members:
            memo[rest] = (rest,)
            return memo[rest]
        rest_degree = P.degree(rest)
        for x in candidates:
            if P.degree(x) >= rest_degree:
                break
            tail = as_sum(rest - x)
            if tail is not None:
                memo[rest] = (x,) + tail
                return memo[rest]
        return None

    for x in candidates:
        tail = as_sum(C - x)
        if tail is not None:
            return IrreducibilityVerdict(
                Irreducibility.DECOMPOSITION_EXISTS, (x,) + tail, len(candidates)
            )
    return IrreducibilityVerdict(Irreducibility.CERTIFIED_IRREDUCIBLE, (), len(candidates))


def _hypothesis(P, total, A, profile, cert, index):
    lattice = P.lattice
    name = "A%d = %s" % (index, P.describe(A))
    verdict = profile.verdict
    if verdict == Verdict.VERY_AMPLE:
        cert.add(NodeKind.CLASSIFICATION, "%s is very ample" % name, verdict=verdict.value)
    elif verdict == Verdict.BIRATIONAL_CONTRACTING:
        ok = len(profile.contracted) <= 1
        cert.add(
            NodeKind.CLASSIFICATION, "%s is an isomorphism off at most one curve" % name, ok,
            verdict=verdict.value, contracted=[P.describe(Z) for Z in profile.contracted],
        )
        for Z in profile.contracted:
            cert.inequality("(A1+A2+A3).Z >= 3 for Z = %s" % P.describe(Z), lattice.pair(total, Z), 3)
    elif verdict == Verdict.DOUBLE_COVER_P2:
        cert.add(
            NodeKind.CLASSIFICATION, "%s is a finite 2:1 morphism onto P2" % name, bool(profile.finite),
            verdict=verdict.value,
        )
        cert.inequality("(A1+A2+A3).A%d >= 9" % index, lattice.pair(total, A), 9)
    elif verdict == Verdict.DOUBLE_COVER_VERONESE:
        cert.add(NodeKind.CLASSIFICATION, "%s is 2:1 onto the Veronese surface" % name, verdict=verdict.value)
        cert.inequality(
            "(A1+A2+A3).B%d >= 9 for B = %s" % (index, P.describe(profile.half)),
            lattice.pair(total, profile.half), 9,
        )
    elif verdict == Verdict.UNKNOWN:
        cert.add(
            NodeKind.CLASSIFICATION, "%s could not be classified: %s" % (name, profile.blocking),
            decided=False, verdict=verdict.value,
        )
    else:
        cert.add(
            NodeKind.CLASSIFICATION, "%s is not nef: %s" % (name, profile.blocking), False,
            verdict=verdict.value,
        )


def validate_decomposition(P, case):
    """Check the Gaussian map hypotheses for A1 + A2 + A3.

    Args:
        P (PolarizedLattice): polarized lattice
        case (DecompositionCase): H, the triple A and optionally its profiles

    Returns:
        Certificate: Verified when every hypothesis holds; the first violated
        hypothesis otherwise
    """
    lattice = P.lattice
    total = case.A[0] + case.A[1] + case.A[2]
    if total != case.multiple * case.H:
        raise DecompositionError(
            "A1 + A2 + A3 = %s differs from %d(%s)"
            % (P.describe(total), case.multiple, P.describe(case.H))
        )
    profiles = case.profiles
    if profiles is None:
        profiles = tuple(classify_linear_system(P, A) for A in case.A)

    cert = Certificate(
        "decomposition %s = %s" % (
            P.describe(total), " + ".join("(%s)" % P.describe(A) for A in case.A)
        )
    )
    cert.cite(GAUSSIAN_MAP, "surjectivity of the Gaussian map follows from the hypotheses below")
    cert.add(
        NodeKind.SYMBOLIC_CHECK, "A1 + A2 + A3 = %d H" % case.multiple,
        total=P.describe(total), H=P.describe(case.H),
    )
    for index, A in enumerate(case.A, start=1):
        square = lattice.square(A)
        cert.inequality("A%d^2 >= 2" % index, square, 2)

    first = profiles[0]
    if first.verdict == Verdict.UNKNOWN:
        cert.add(
            NodeKind.CLASSIFICATION, "A1 could not be classified: %s" % first.blocking,
            decided=False, verdict=first.verdict.value,
        )
    else:
        cert.add(
            NodeKind.CLASSIFICATION, "A1 = %s is very ample" % P.describe(case.A[0]),
            first.verdict == Verdict.VERY_AMPLE, verdict=first.verdict.value,
        )
    for index in (2, 3):
        _hypothesis(P, total, case.A[index - 1], profiles[index - 1], cert, index)
    return cert

