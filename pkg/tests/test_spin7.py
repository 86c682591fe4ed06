import pytest

from holonomy_forge import spin7
from holonomy_forge.spin7 import ComplexFrame, FrameName, Holonomy


@pytest.fixture(scope="module")
def group_report():
    return spin7.check_quaternion_group()


def test_quaternion_group(group_report):
    r = group_report
    assert r.ok and r.order == 8 and r.nonabelian
    assert all(v for _, v in r.relations) and len(r.relations) == 4
    assert r.free_elements == 7 and r.omega_preserving == 8
    assert spin7.build_group_G().order == 8


def test_z_frame(group_report):
    rep = spin7.frame_report(ComplexFrame.standard(FrameName.Z), group_report.group)
    assert rep.ok and rep.discrepancy.is_zero()
    assert rep.complex_multiplication == ("alpha",) and rep.quaternionic == ("beta",)
    assert "alpha" in rep.complex_linear_subgroup and "beta" not in rep.complex_linear_subgroup


def test_w_frame_swaps_roles(group_report):
    rep = spin7.frame_report(ComplexFrame.standard("w_frame"), group_report.group)
    assert rep.ok
    assert rep.complex_multiplication == ("beta",) and rep.quaternionic == ("alpha",)
    assert "beta" in rep.complex_linear_subgroup and "alpha" not in rep.complex_linear_subgroup


def test_frames_are_orthogonal():
    for name in FrameName:
        assert ComplexFrame.standard(name).is_orthogonal()


@pytest.mark.parametrize("i,j", [(0, 1), (2, 5), (6, 7)])
def test_swapped_rows_break_the_identity(i, j):
    bad = spin7.swap_rows(ComplexFrame.standard("z_frame"), i, j)
    with pytest.raises(spin7.FrameIdentityFails) as exc:
        spin7.frame_report(bad)
    assert not exc.value.discrepancy.is_zero()


def test_ale_metadata(group_report):
    z = spin7.ale_construction(spin7.frame_report(ComplexFrame.standard("z_frame"), group_report.group))
    w = spin7.ale_construction(spin7.frame_report(ComplexFrame.standard("w_frame"), group_report.group))
    assert (z.complex_generator, w.complex_generator) == ("alpha", "beta")
    assert z.holonomy == w.holonomy == "Z2_ltimes_SU4"


def test_holonomy_outcomes():
    assert spin7.holonomy_outcome([1, 1, 1]).label is Holonomy.Z2_LTIMES_SU4
    assert spin7.holonomy_outcome([1, 2, 1]).label is Holonomy.SPIN7
    for k in range(1, 6):
        counts = spin7.enumerate_outcomes(k)
        assert counts == {Holonomy.Z2_LTIMES_SU4: 1, Holonomy.SPIN7: 2**k - 1}
    with pytest.raises(ValueError):
        spin7.holonomy_outcome([])
    with pytest.raises(ValueError):
        spin7.holonomy_outcome([3])
