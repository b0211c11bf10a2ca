import pytest

from k3lattice.certificate import NodeKind, Status
from k3lattice.geometry import (
    DecompositionCase,
    DecompositionError,
    Effectivity,
    Irreducibility,
    LinearSystemError,
    NefStatus,
    PolarizationError,
    PolarizedLattice,
    Verdict,
    certify_irreducible,
    classify_linear_system,
    genus,
    is_effective,
    is_indivisible,
    is_nef,
    validate_decomposition,
)
from k3lattice.lattice import DivisorClass, IntLattice


@pytest.mark.parametrize("h", [4, 5, 7])
def test_d_minus_l_very_ample(family, h):
    P = family(-1, 1, h)
    profile = classify_linear_system(P, P.parse("D - L"))
    assert profile.verdict == Verdict.VERY_AMPLE
    assert profile.evidence.status == Status.VERIFIED


def test_d_minus_l_double_cover_at_h3(family):
    P = family(-1, 1, 3)
    profile = classify_linear_system(P, P.parse("D - L"))
    assert profile.verdict == Verdict.DOUBLE_COVER_P2
    assert profile.finite


@pytest.mark.parametrize("h", [1, 2, 3, 6])
def test_d_plus_l_contracts_only_l(family, h):
    P = family(-1, 2, h)
    profile = classify_linear_system(P, P.parse("D + L"))
    assert profile.verdict == Verdict.BIRATIONAL_CONTRACTING
    assert tuple(profile.contracted) == (P.parse("L"),)


@pytest.mark.parametrize("h", [1, 2, 4])
def test_h_very_ample_rank3(family, h):
    P = family(0, 2, h)
    assert classify_linear_system(P, P.parse("2D + L + R")).verdict == Verdict.VERY_AMPLE


def test_h_very_ample_exceptional_rank3(family):
    P = family(1, 4, 1)
    assert classify_linear_system(P, P.parse("D + L")).verdict == Verdict.VERY_AMPLE


def test_classify_needs_positive_square(family):
    P = family(-1, 1, 3)
    with pytest.raises(LinearSystemError):
        classify_linear_system(P, P.parse("L"))


def test_not_nef(family):
    P = family(-1, 1, 3)
    profile = classify_linear_system(P, P.parse("D + L"))
    assert profile.verdict == Verdict.NOT_NEF_CERTIFIED
    verdict = is_nef(P, P.parse("D + L"))
    assert verdict.status == NefStatus.NOT_NEF
    assert verdict.witness == P.parse("L")
    assert is_nef(P, P.parse("L")).status == NefStatus.UNKNOWN


def test_veronese(family):
    P = family(1, 4, 1)
    # 2D with D^2 = 2
    profile = classify_linear_system(P, P.parse("2D"))
    assert profile.verdict == Verdict.DOUBLE_COVER_VERONESE
    assert profile.half == P.parse("D")


def test_genus_and_indivisibility(family):
    P = family(1, 5, 2)
    H = P.parse("2D + L")
    assert genus(P, H) == 20
    assert is_indivisible(P, H)
    assert not is_indivisible(P, P.parse("2D + 2L"))
    P = family(0, 1, 3, rank=3)
    assert genus(P, P.parse("2D - L + R")) == 13


def test_is_effective(family):
    P = family(-1, 1, 3)
    L = P.parse("L")
    assert is_effective(P, L) == Effectivity.EFFECTIVE
    assert is_effective(P, -L) == Effectivity.NOT_EFFECTIVE
    assert is_effective(P, L - L) == Effectivity.NOT_EFFECTIVE
    assert is_effective(P, 2 * L) == Effectivity.UNKNOWN
    assert is_effective(P, P.parse("D")) == Effectivity.EFFECTIVE


def test_certify_irreducible(family):
    P = family(-1, 1, 3)
    assert certify_irreducible(P, P.parse("L")).status == Irreducibility.CERTIFIED_IRREDUCIBLE
    with pytest.raises(LinearSystemError):
        certify_irreducible(P, -P.parse("L"))

    P = family(1, 4, 1)
    L = P.parse("L")
    verdict = certify_irreducible(P, L)
    assert verdict.status == Irreducibility.DECOMPOSITION_EXISTS
    total = verdict.witness[0]
    for part in verdict.witness[1:]:
        total = total + part
    assert total == L
    assert len(verdict.witness) >= 2


def test_polarization_must_avoid_roots():
    lattice = IntLattice([[2, 0], [0, -2]])
    with pytest.raises(PolarizationError):
        PolarizedLattice(lattice, DivisorClass((1, 0)))
    with pytest.raises(PolarizationError):
        PolarizedLattice(lattice, DivisorClass((0, 1)))
    with pytest.raises(PolarizationError):
        PolarizedLattice(IntLattice([[-2, 0], [0, -2]]), DivisorClass((1, 0)))


def test_validate_decomposition_table_row(family):
    P = family(1, 5, 2)
    case = DecompositionCase(P.parse("D + L"), (P.parse("D + L"), P.parse("D"), P.parse("L")), multiple=2)
    cert = validate_decomposition(P, case)
    assert cert.status == Status.VERIFIED
    inequalities = [step for _, step in cert.walk() if step.kind == NodeKind.INEQUALITY_CHECKED]
    assert any(step.data["lhs"] == 14 and step.data["rhs"] == 9 for step in inequalities)
    assert any(step.kind == NodeKind.THEOREM_CITATION for _, step in cert.walk())


def test_validate_decomposition_rejects_wrong_sum(family):
    P = family(1, 5, 2)
    case = DecompositionCase(P.parse("D + L"), (P.parse("D"), P.parse("D"), P.parse("L")), multiple=2)
    with pytest.raises(DecompositionError):
        validate_decomposition(P, case)


def test_validate_decomposition_fails_on_small_square(family):
    P = family(-1, 1, 3)
    # A1 = D - L has square 2 and is no very ample class
    case = DecompositionCase(
        P.parse("2D - L"), (P.parse("D - L"), P.parse("D"), P.parse("2D - L")), multiple=2
    )
    cert = validate_decomposition(P, case)
    assert cert.status == Status.FAILED
    assert cert.first_failure() == "A1 = D - L is very ample"


@pytest.mark.parametrize("i", [1, 2, 3])
@pytest.mark.parametrize(
    "j, k, h, H, g",
    [
        (1, 5, 2, "2D + L", 20),
        (1, 6, 2, "D + 2L", 19),
        (-1, 1, 3, "2D - L", 10),
        (0, 1, 3, "2D - L + R", 13),
        (0, 2, 1, "2D + L + R", 11),
        (1, 4, 1, "D + L", 7),
    ],
)
def test_genus_of_multiples(family, i, j, k, h, H, g):
    P = family(j, k, h)
    assert genus(P, P.parse(H)) == g
    assert genus(P, i * P.parse(H)) == i * i * (g - 1) + 1


def test_multiples_of_a_contracting_class(family):
    P = family(-1, 2, 1)
    # (D + L).L = 0, so D + L is nef but not ample
    profile = classify_linear_system(P, 3 * P.parse("D + L"))
    assert profile.verdict == Verdict.UNKNOWN
    assert profile.blocking == "B = D + L is not certified ample"
    profile = classify_linear_system(P, 2 * P.parse("D + L"))
    assert profile.verdict == Verdict.UNKNOWN
    assert profile.blocking == "B = D + L is not very ample"
