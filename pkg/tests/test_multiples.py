import pytest

from k3lattice.certificate import NodeKind, Status
from k3lattice.families import FamilyOutOfRange
from k3lattice.geometry import MULTIPLES, Verdict, classify_linear_system
from k3lattice.multiples import generic_lattice, multiple_parts, verify_multiple


def verdicts(cert):
    decomposition = cert.steps[0].child
    return [step.data["verdict"] for step in decomposition.steps if "verdict" in step.data]


def test_multiple_parts():
    assert multiple_parts(3, 3) == (1, 1, 1)
    assert multiple_parts(8, 5) == (1, 1, 6)
    assert multiple_parts(5, 2) == (3, 1, 1)
    assert multiple_parts(9, 2) == (3, 1, 5)
    for i, g in [(4, 2), (2, 3), (3, 1)]:
        with pytest.raises(FamilyOutOfRange):
            multiple_parts(i, g)


@pytest.mark.parametrize("i, g", [(3, 3), (4, 3), (5, 3), (3, 10), (7, 4)])
def test_three_very_ample_summands(i, g):
    cert = verify_multiple(i, g)
    assert cert.status == Status.VERIFIED, cert.first_failure()
    assert verdicts(cert) == ["VeryAmple"] * 3


@pytest.mark.parametrize(
    "i, third",
    [(5, "DoubleCoverP2"), (6, "DoubleCoverVeronese"), (7, "VeryAmple"), (10, "VeryAmple")],
)
def test_genus_two(i, third):
    cert = verify_multiple(i, 2)
    assert cert.status == Status.VERIFIED, cert.first_failure()
    assert verdicts(cert) == ["VeryAmple", "DoubleCoverP2", third]
    data = [step.data for step in cert.steps if step.kind == NodeKind.INEQUALITY_CHECKED][0]
    assert (data["lhs"], data["expected"]) == (2 * i, 2 * i)
    cited = [step.data["reference"] for _, step in cert.walk() if step.kind == NodeKind.THEOREM_CITATION]
    assert MULTIPLES in cited


def test_multiples_of_an_ample_class():
    P = generic_lattice(2)
    H = P.ample
    assert classify_linear_system(P, H).verdict == Verdict.DOUBLE_COVER_P2
    assert classify_linear_system(P, 2 * H).verdict == Verdict.DOUBLE_COVER_VERONESE
    assert classify_linear_system(P, 3 * H).verdict == Verdict.VERY_AMPLE
    P = generic_lattice(3)
    H = P.ample
    assert classify_linear_system(P, H).verdict == Verdict.VERY_AMPLE
    assert classify_linear_system(P, 2 * H).verdict == Verdict.VERY_AMPLE
