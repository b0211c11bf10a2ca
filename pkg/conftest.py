import pytest

from k3lattice.families import LatticeFamilyParams, build_family


@pytest.fixture
def family():
    """Build Gamma_{jkh} polarized by D, with the published shape for (j, k, h)."""

    def build(j, k, h, rank=None, explore=False):
        P, _ = build_family(LatticeFamilyParams.infer(j, k, h, rank), explore=explore)
        return P

    return build
