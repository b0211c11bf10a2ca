"""Replays of the very ampleness claims behind the decomposition table.

Each claim is a function filling a Certificate with lattice checks:
classifications by enumeration, every divisibility value the hand proof
quotes (as a prescribed Gram matrix), the printed inequality values, and
ExternalAssumption nodes for the few geometric steps the lattice cannot
decide.
"""
import functools

import sympy

from .certificate import Certificate, NodeKind, Status
from .families import FamilyOutOfRange, Shape, build_family, h_sym, j_sym, k_sym, rows_for
from .families import root_exclusion as find_roots
from .geometry import (
    RIEMANN_ROCH,
    DecompositionCase,
    Effectivity,
    Irreducibility,
    NefStatus,
    Verdict,
    base_point_exceptions,
    certify_irreducible,
    classify_linear_system,
    is_effective,
    is_nef,
    validate_decomposition,
)
from .lattice import Obstruction


class UnknownClaim(Exception):
    pass


_REGISTRY = {}


def claim(claim_id, applies):
    def register(fn):
        _REGISTRY[claim_id] = (applies, fn)
        return fn

    return register


def claim_ids():
    return ["3.3"] + sorted(_REGISTRY, key=lambda c: int(c.split(".")[1]))


def normalize_claim_id(text):
    cid = str(text).strip()
    for prefix in ("Claim", "claim"):
        if cid.startswith(prefix):
            cid = cid[len(prefix):].strip()
    if cid != "3.3" and cid not in _REGISTRY:
        raise UnknownClaim("unknown claim '%s', use one of %s" % (text, claim_ids()))
    return cid


def claim_applies(claim_id, params):
    cid = normalize_claim_id(claim_id)
    if cid == "3.3":
        return params.in_table_range()
    return _REGISTRY[cid][0](params)


@functools.lru_cache(maxsize=512)
def profile_of(P, delta):
    return classify_linear_system(P, delta)


def _classify(P, cert, text, expected, finite=None):
    """Classify |text| and require a verdict in `expected`."""
    delta = P.parse(text)
    profile = profile_of(P, delta)
    expected = expected if isinstance(expected, tuple) else (expected,)
    ok = profile.verdict in expected
    if finite is not None and profile.verdict == Verdict.DOUBLE_COVER_P2:
        ok = ok and profile.finite == finite
    cert.sub(profile.evidence, "linear system |%s|" % text)
    data = {"verdict": profile.verdict.value, "expected": [v.value for v in expected]}
    if profile.finite is not None:
        data["finite"] = profile.finite
    if profile.contracted:
        data["contracted"] = [P.describe(Z) for Z in profile.contracted]
    if profile.blocking:
        data["blocking"] = profile.blocking
    cert.add(
        NodeKind.CLASSIFICATION, "|%s| is %s" % (text, "/".join(v.value for v in expected)),
        ok, decided=profile.verdict != Verdict.UNKNOWN, **data
    )
    return profile


def _contracts_only(P, cert, profile, text, curve):
    contracted = tuple(profile.contracted)
    cert.add(
        NodeKind.CLASSIFICATION,
        "|%s| contracts only %s" % (text, curve),
        contracted == (P.parse(curve),),
        contracted=[P.describe(Z) for Z in contracted],
    )


def _effective(P, cert, text):
    x = P.parse(text)
    status = is_effective(P, x)
    cert.add(
        NodeKind.CLASSIFICATION,
        "%s is effective: square %d, degree %d" % (text, P.lattice.square(x), P.degree(x)),
        status == Effectivity.EFFECTIVE,
        reference=RIEMANN_ROCH,
        effectivity=status.value,
    )


def _irreducible(P, cert, text, assumption=None):
    x = P.parse(text)
    verdict = certify_irreducible(P, x)
    data = {"status": verdict.status.value, "candidates": verdict.candidates}
    if verdict.status == Irreducibility.CERTIFIED_IRREDUCIBLE:
        cert.add(NodeKind.CLASSIFICATION, "%s splits into no curve candidates" % text, **data)
        return verdict
    data["witness"] = [P.describe(part) for part in verdict.witness]
    cert.add(
        NodeKind.CLASSIFICATION,
        "%s has a candidate splitting" % text,
        assumption is not None,
        **data
    )
    if assumption is not None:
        cert.assumption(assumption, consequence="%s is irreducible" % text)
    return verdict


def _base_point_free(P, cert, text):
    _nef(P, cert, text)
    exceptions, isotropic = base_point_exceptions(P, P.parse(text))
    if isotropic is not None:
        cert.enumeration("isotropic F with F.%s = 1 of small degree" % text, P.lattice, isotropic, expect_empty=None)
    cert.add(
        NodeKind.CLASSIFICATION, "|%s| has no base points" % text, not exceptions,
        exceptions=[[a, P.describe(F), P.describe(G)] for a, F, G in exceptions],
    )


def _nef(P, cert, text):
    verdict = is_nef(P, P.parse(text))
    if verdict.result is not None:
        cert.enumeration("%s is nef: no effective root pairs negatively" % text, P.lattice, verdict.result)
    else:
        cert.add(NodeKind.CLASSIFICATION, "%s is nef" % text, decided=False)
    return verdict.status == NefStatus.NEF_CERTIFIED


def _pair(P, a, b):
    return P.lattice.pair(P.parse(a), P.parse(b))


def _ruled_out(P, cert, statement, *grams):
    for gram in grams:
        cert.divisibility(statement, P.lattice, gram)


@claim("3.6", lambda p: p.shape == Shape.RANK2 and (p.j, p.k) == (-1, 1) and p.h >= 3)
def claim_3_6(P, params, cert):
    h = params.h
    _classify(P, cert, "D", Verdict.VERY_AMPLE)
    _ruled_out(P, cert, "no F with F^2 = 0, F.D = 1, 2", [[0, 1], [1, 2 * h]], [[0, 2], [2, 2 * h]])
    _effective(P, cert, "L")
    _irreducible(P, cert, "L")
    cert.inequality("(D - L).L = 3", _pair(P, "D - L", "L"), 0, expected=3)
    _nef(P, cert, "D - L")
    cert.inequality("(D - L)^2 = 2h - 4", _pair(P, "D - L", "D - L"), 2, expected=2 * h - 4)
    if h >= 4:
        _classify(P, cert, "D - L", Verdict.VERY_AMPLE)
    else:
        _classify(P, cert, "D - L", Verdict.DOUBLE_COVER_P2, finite=True)
    _ruled_out(
        P, cert, "no F1 with F1^2 = 0, F1.(D - L) = 1, 2 or F1^2 = -2, F1.(D - L) = 0",
        [[0, 1], [1, 2 * h - 4]], [[0, 2], [2, 2 * h - 4]], [[-2, 0], [0, 2 * h - 4]],
    )
    if h == 3:
        cert.inequality("(A1+A2+A3).A3 = (4D - 2L).(D - L)", _pair(P, "4D - 2L", "D - L"), 9, expected=14)


@claim("3.7", lambda p: p.shape == Shape.RANK2 and (p.j, p.k) == (-1, 2) and p.h >= 1)
def claim_3_7(P, params, cert):
    h = params.h
    if h >= 2:
        _classify(P, cert, "D", Verdict.VERY_AMPLE)
    else:
        _classify(P, cert, "D", Verdict.DOUBLE_COVER_P2, finite=True)
        _ruled_out(P, cert, "no base point pattern D = aF1 + G", [[0, 1], [1, -2]])
    _ruled_out(P, cert, "no F with F^2 = 0, F.D = 1, 2", [[0, 1], [1, 2 * h]], [[0, 2], [2, 2 * h]])
    _effective(P, cert, "L")
    _irreducible(P, cert, "L")
    _ruled_out(P, cert, "L = L1 + L2 with L1.L2 = 1 is impossible", [[-2, 1], [1, -2]])
    _nef(P, cert, "D + L")
    profile = _classify(P, cert, "D + L", Verdict.BIRATIONAL_CONTRACTING)
    _contracts_only(P, cert, profile, "D + L", "L")
    _ruled_out(P, cert, "no F2 with F2^2 = 0, F2.(D + L) = 2", [[0, 2], [2, 2 * h + 2]])
    if h == 1:
        _ruled_out(
            P, cert, "H = 2D + L is very ample: disc(F, H) = -1, -4, -28",
            [[0, 1], [1, 14]], [[0, 2], [2, 14]], [[-2, 0], [0, 14]],
        )
    cert.inequality("(A1+A2+A3).L = 2H.L", 2 * _pair(P, "2D + L", "L"), 3, expected=4)
    if h == 1:
        cert.inequality("(A1+A2+A3).A2 = 2H.D", 2 * _pair(P, "2D + L", "D"), 9, expected=12)


@claim("3.8", lambda p: p.shape == Shape.RANK3 and (p.j, p.k) == (0, 1) and p.h >= 3)
def claim_3_8(P, params, cert):
    h = params.h
    _classify(P, cert, "D", Verdict.VERY_AMPLE)
    _ruled_out(P, cert, "D has no base points: disc(L, F, G) = 2", [[-2, 0, 1], [0, 0, 1], [1, 1, -2]])
    for x in range(3):
        gram = [[2 * h, 1, 2], [1, -2, x], [2, x, 0]]
        value = -2 * h * x * x + 4 * x + 8
        statement = "no F1 with F1^2 = 0, F1.D = 2, L.F1 = %d: disc(D, L, F1) = %d" % (x, value)
        if value != 0:
            cert.divisibility(statement, P.lattice, gram)
            continue
        cert.divisibility(statement, P.lattice, gram, expect=Obstruction.NOT_RULED_OUT)
        cert.assumption(
            "One moment of reflection then shows that D = 5F1 + L + M, where M is a rational "
            "curve such that phi_D(M) = phi_D(L)",
            consequence="D = 5F1 + 2L",
        )
        rest = _pair(P, "D", "R") - 2 * _pair(P, "L", "R")
        cert.add(
            NodeKind.SYMBOLIC_CHECK,
            "2 = D.R = 5F1.R + 2L.R has no integral solution",
            rest % 5 != 0,
            lhs=rest,
            modulus=5,
        )
    _nef(P, cert, "D - L")
    _effective(P, cert, "R")
    _irreducible(P, cert, "R")
    _ruled_out(
        P, cert, "R = R1 + R2 is impossible: disc(D, R1, R2) = 6h + 6",
        [[2 * h, 1, 1], [1, -2, 1], [1, 1, -2]],
    )
    cert.inequality("(D - L + R).R = 0", _pair(P, "D - L + R", "R"), 0, expected=0, relation="==")
    _nef(P, cert, "D - L + R")
    cert.inequality("(D - L + R)^2 = 2h - 2", _pair(P, "D - L + R", "D - L + R"), 4, expected=2 * h - 2)
    profile = _classify(P, cert, "D - L + R", Verdict.BIRATIONAL_CONTRACTING)
    _contracts_only(P, cert, profile, "D - L + R", "R")
    _ruled_out(
        P, cert, "no F2 other than R: disc(D - L, R, F2) = 8h - 8, -8h + 16, 8",
        [[2 * h - 4, 2, 0], [2, -2, 0], [0, 0, -2]],
        [[2 * h - 4, 2, 0], [2, -2, 2], [0, 2, 0]],
        [[2 * h - 4, 2, 2], [2, -2, 0], [2, 0, 0]],
    )
    cert.inequality("(A1+A2+A3).R = 2H.R", 2 * _pair(P, "2D - L + R", "R"), 3, expected=4)


@claim("3.9", lambda p: p.shape == Shape.RANK3 and (p.j, p.k) == (0, 2) and p.h >= 1)
def claim_3_9(P, params, cert):
    h = params.h
    for curve in ("L", "R"):
        _effective(P, cert, curve)
        _irreducible(P, cert, curve)
    _ruled_out(
        P, cert, "L = L1 + L2 is impossible: disc(D, L1, L2) = 2, 6h + 6",
        [[2 * h, 1, 1], [1, -2, 0], [1, 0, 0]],
        [[2 * h, 1, 1], [1, -2, 1], [1, 1, -2]],
    )
    cert.inequality("H.L = 2", _pair(P, "2D + L + R", "L"), 0, expected=2)
    cert.inequality("H.R = 2", _pair(P, "2D + L + R", "R"), 0, expected=2)
    _nef(P, cert, "2D + L + R")
    _classify(P, cert, "2D + L + R", Verdict.VERY_AMPLE)
    _ruled_out(P, cert, "no F with D.F = 1, L.F = R.F = 0: disc(D, L, F) = 2", [[2 * h, 2, 1], [2, -2, 0], [1, 0, 0]])
    _base_point_free(P, cert, "D")
    _ruled_out(
        P, cert, "D has no base points: disc(F1, L, G) = 2, 4",
        [[0, 0, 1], [0, -2, 2], [1, 2, -2]],
        [[0, 1, 1], [1, -2, 0], [1, 0, -2]],
    )
    for curve in ("L", "R"):
        text = "D + %s" % curve
        _nef(P, cert, text)
        profile = _classify(P, cert, text, Verdict.BIRATIONAL_CONTRACTING)
        _contracts_only(P, cert, profile, text, curve)
    _ruled_out(P, cert, "no F2 with F2.D = 2, F2.L = 0: disc(D, L, F2) = 8", [[2 * h, 2, 2], [2, -2, 0], [2, 0, 0]])
    cert.inequality("(A1+A2+A3).L = 2H.L", 2 * _pair(P, "2D + L + R", "L"), 3, expected=4)
    cert.inequality("(A1+A2+A3).R = 2H.R", 2 * _pair(P, "2D + L + R", "R"), 3, expected=4)


@claim("3.10", lambda p: p.shape == Shape.RANK2 and (p.j, p.k, p.h) == (1, 5, 2))
def claim_3_10(P, params, cert):
    _classify(P, cert, "D", Verdict.VERY_AMPLE)
    _classify(P, cert, "L", Verdict.DOUBLE_COVER_P2, finite=True)
    _ruled_out(P, cert, "no F with F^2 = -2, F.L = 0: disc(L, F) = -4", [[2, 0], [0, -2]])
    cert.inequality("(A1+A2+A3).A3 = 2(D + L).L", 2 * _pair(P, "D + L", "L"), 9, expected=14)


@claim("3.11", lambda p: p.shape == Shape.RANK3 and (p.j, p.k, p.h) == (1, 4, 1))
def claim_3_11(P, params, cert):
    _classify(P, cert, "D", Verdict.DOUBLE_COVER_P2, finite=True)
    cert.inequality(
        "D = aF + G would give D^2 = aF.D + G.D >= 3", 3, _pair(P, "D", "D"), relation=">"
    )
    _effective(P, cert, "R")
    _irreducible(P, cert, "R")
    _ruled_out(P, cert, "R = R1 + R2 is impossible: disc(D, R1, R2) = 12", [[2, 1, 1], [1, -2, 1], [1, 1, -2]])
    _effective(P, cert, "L - R")
    _ruled_out(P, cert, "L - R is connected: disc(D, B1, B2) = 12", [[2, 1, 1], [1, -2, 0], [1, 0, -2]])
    _ruled_out(
        P, cert, "no component L1 of |L| with D.L1 = 1 or R.L1 = 0: disc(D, L1, R) = 18, 20, 24",
        [[2, 1, 2], [1, -2, 0], [2, 0, -2]],
        [[2, 1, 2], [1, -2, 1], [2, 1, -2]],
        [[2, 2, 2], [2, -2, 0], [2, 0, -2]],
    )
    _irreducible(P, cert, "L", assumption="The linear system cut out on L1 by |D| has dimension 2")
    _nef(P, cert, "L")
    _nef(P, cert, "D + L")
    _classify(P, cert, "D + L", Verdict.VERY_AMPLE)
    _ruled_out(
        P, cert, "no F with F^2 = 0, F.H = 1, 2: disc(D, F, L) = -2, 4, -8",
        [[2, 1, 4], [1, 0, 0], [4, 0, 2]],
        [[2, 1, 4], [1, 0, 1], [4, 1, 2]],
        [[2, 2, 4], [2, 0, 0], [4, 0, 2]],
    )
    _classify(P, cert, "L", Verdict.DOUBLE_COVER_P2, finite=True)
    disc = P.lattice.disc
    residues = [x for x in range(disc) if (10 - 2 * x * x) % disc == 0]
    cert.add(
        NodeKind.SYMBOLIC_CHECK,
        "disc(R, L, F2) = 10 - 2x^2 is never divisible by %d" % disc,
        not residues,
        modulus=disc,
        residues=residues,
    )
    cert.inequality("(A1+A2+A3).A2 = 2H.D", 2 * _pair(P, "D + L", "D"), 9, expected=12)
    cert.inequality("(A1+A2+A3).A3 = 2H.L", 2 * _pair(P, "D + L", "L"), 9, expected=12)


def _in_claim_3_12(p):
    if p.shape != Shape.RANK2:
        return False
    return (p.j in (1, 2) and p.k >= p.j + 4 and p.h == 2) or (p.j, p.k, p.h) == (1, 5, 3)


_IRREDUCIBLE_L = {
    2: "it is shown in [Mo] that L can be assumed to be irreducible base point free",
    3: "a general element L in |D - L'| is smooth since D - L' is base point free and connected",
}


def _symbolic_pairing(text_a, text_b):
    gram = sympy.Matrix([[2 * h_sym, k_sym], [k_sym, 2 * j_sym]])
    coefficients = {"2D + L": (2, 1), "D + 2L": (1, 2), "L": (0, 1)}
    a = sympy.Matrix(coefficients[text_a])
    b = sympy.Matrix(coefficients[text_b])
    return sympy.expand((a.T * gram * b)[0, 0])


@claim("3.12", _in_claim_3_12)
def claim_3_12(P, params, cert):
    j, k, h = params.j, params.k, params.h
    _classify(P, cert, "D", Verdict.VERY_AMPLE)
    _ruled_out(P, cert, "no F with F^2 = 0, F.D = 1, 2: disc(F, D) = -1, -4", [[0, 1], [1, 2 * h]], [[0, 2], [2, 2 * h]])
    if h == 2:
        cert.inequality("k^2 - 8j >= 13", k * k - 8 * j, 13)
    else:
        _effective(P, cert, "D - L")
        cert.inequality("(D - L).D = 1", _pair(P, "D - L", "D"), 1, expected=1, relation="==")
    _irreducible(P, cert, "L", assumption=_IRREDUCIBLE_L[h])
    if j == 1:
        _classify(P, cert, "L", Verdict.DOUBLE_COVER_P2, finite=True)
        _ruled_out(P, cert, "no F1 with F1^2 = -2, F1.L = 0: disc(L, F1) = -4", [[2, 0], [0, -2]])
    else:
        _classify(P, cert, "L", Verdict.VERY_AMPLE)
        _ruled_out(
            P, cert, "no F2 with F2^2 = 0, F2.L = 1, 2 or F2^2 = -2, F2.L = 0: disc(F2, L) = -1, -4, -8",
            [[0, 1], [1, 4]], [[0, 2], [2, 4]], [[-2, 0], [0, 4]],
        )
    values = {h_sym: h, j_sym: j, k_sym: k}
    for row in [r for r in rows_for(params) if r.claim == "3.12"]:
        formula = {1: 2 * k_sym + 2 * j_sym, 2: k_sym + 4 * j_sym, 3: k_sym + 4 * j_sym}[row.index]
        symbolic = _symbolic_pairing(row.H, "L")
        cert.add(
            NodeKind.SYMBOLIC_CHECK,
            "(%s).L = %s" % (row.H, formula),
            sympy.expand(symbolic - formula) == 0,
            expression=str(symbolic),
        )
        cert.inequality(
            "(A1+A2+A3).L = (%s).L" % row.H, _pair(P, row.H, "L"), 9, expected=int(formula.subs(values))
        )


def decomposition_certificate(P, row):
    """H very ample and the Gaussian map hypotheses for one table row."""
    cert = Certificate("Table row %d: H = %s, A = %s" % (row.index, row.H, ", ".join(row.A)))
    _classify(P, cert, row.H, Verdict.VERY_AMPLE)
    H = P.parse(row.H)
    A = tuple(P.parse(text) for text in row.A)
    case = DecompositionCase(H, A, tuple(profile_of(P, a) for a in A), multiple=row.i)
    cert.sub(validate_decomposition(P, case))
    return cert


def _settle(cert):
    """An undecided certificate without an assumption covering it fails."""
    if cert.status == Status.UNKNOWN:
        cert.add(
            NodeKind.CLASSIFICATION,
            "undecided step without a registered assumption: %s" % cert.first_failure(),
            False,
        )
    return cert


def replay_claim(claim_id, P, params, root_exclusion=None):
    """Run a registered claim on an already built family."""
    cid = normalize_claim_id(claim_id)
    if cid == "3.3":
        if root_exclusion is None:
            root_exclusion = find_roots(P, params)[0]
        return _settle(root_exclusion)
    cert = Certificate("Claim%s" % cid, params)
    _REGISTRY[cid][1](P, params, cert)
    for row in rows_for(params):
        if row.claim == cid:
            cert.sub(decomposition_certificate(P, row))
    return _settle(cert)


def verify_claim(claim_id, params, explore=False):
    """Replay one claim on the family with the given parameters.

    Args:
        claim_id (str): "3.3" or one of "3.6" to "3.12" (a "Claim" prefix is accepted)
        params (LatticeFamilyParams): family parameters
        explore (bool, optional): allow parameters outside the claim's range.
            Defaults to False.

    Returns:
        Certificate: the replay
    """
    cid = normalize_claim_id(claim_id)
    if not explore and not claim_applies(cid, params):
        raise FamilyOutOfRange("Claim %s does not cover %s" % (cid, params))
    P, root_exclusion = build_family(params, explore=explore)
    return replay_claim(cid, P, params, root_exclusion)
