import pytest

from conftest import INTERVAL, SYM_G1, random_curve
from pellabel.applications import (
    MECHANISM_ABELIAN,
    MECHANISM_NONE,
    MECHANISM_PELL,
    conjugate_range_bounds,
    conjugate_witness,
    degeneration_family,
    is_strictly_decreasing,
    kdiff_conjugate_range,
    kdiff_unique_zero,
    torsion_report,
)
from pellabel.canonical import CurveConfig
from pellabel.inverse import Comb, solve


@pytest.mark.parametrize("g", range(2, 7))
@pytest.mark.parametrize("k", range(1, 7))
def test_kdiff_grid(g, k):
    rep = kdiff_unique_zero(g, k)
    assert rep.exists_unique_zero == ((g, k) != (2, 2))
    assert rep.zero_order == k * (2 * g - 2)
    if k == 1:
        assert rep.mechanism == MECHANISM_ABELIAN
    else:
        assert rep.required_degree == k * (g - 1)
        assert rep.mechanism == (MECHANISM_PELL if rep.exists_unique_zero else MECHANISM_NONE)


def test_kdiff_validation():
    with pytest.raises(ValueError):
        kdiff_unique_zero(1, 2)
    with pytest.raises(ValueError):
        kdiff_unique_zero(2, 0)


@pytest.mark.parametrize("g,k,r", [(2, 3, 3), (3, 2, 4)])
def test_kdiff_witness(g, k, r):
    rep = kdiff_unique_zero(g, k, build_witness=True)
    assert rep.exists_unique_zero and rep.witness is not None
    assert rep.witness.exists and rep.witness.check.r == r
    assert rep.witness.result.curve.genus == g


def test_conjugate_range():
    assert conjugate_range_bounds(2, 3) == (6, 6)
    assert conjugate_range_bounds(3, 2) == (8, 8)
    assert conjugate_range_bounds(4, 3) == (14, 18)
    assert kdiff_conjugate_range(3, 2, 8)
    assert not kdiff_conjugate_range(2, 3, 4)
    assert kdiff_conjugate_range(2, 3, 6)
    with pytest.raises(ValueError):
        kdiff_conjugate_range(2, 1, 2)


@pytest.mark.parametrize("g", range(2, 6))
@pytest.mark.parametrize("k", range(2, 5))
def test_conjugate_range_top(g, k):
    # n = 2k(g-1) is the unique-zero case, so it agrees with the gate
    assert kdiff_conjugate_range(g, k, 2 * k * (g - 1)) == ((g, k) != (2, 2))


def test_conjugate_witness():
    w = conjugate_witness(3, 2, 8)
    assert w is not None and w.exists


def test_torsion_genus1():
    rep = torsion_report(SYM_G1)
    assert rep.genus == 1 and rep.divisor_order == 2
    assert set(rep.candidate_point_orders) == {2, 4}
    assert rep.forbidden_range_check and rep.excluded_candidates == ()


def test_torsion_genus0_and_generic():
    rep = torsion_report(INTERVAL)
    assert rep.genus == 0 and rep.notes
    generic = torsion_report(CurveConfig((0.0, 1.0, 2.1, 3.0, 4.3, 5.0)), r_max=20)
    assert generic.divisor_order is None and generic.candidate_point_orders == ()


def test_torsion_never_in_forbidden_range(rng):
    for _ in range(30):
        g = int(rng.integers(1, 4))
        rep = torsion_report(random_curve(rng, g), r_max=12)
        if rep.divisor_order is not None:
            assert not 2 <= rep.divisor_order <= g


def test_torsion_on_solved_curve():
    res = solve(Comb(5, (1, 3), (0.7, 1.1)))
    rep = torsion_report(res.curve, r_max=10)
    assert rep.divisor_order == 5 and rep.candidate_point_orders == (5, 10)
    assert rep.forbidden_range_check and rep.excluded_candidates == ()


def test_degeneration_short_family():
    comb = Comb(2, (1,), (1.0,))
    fam = degeneration_family(comb, 1, 3)
    assert fam.completed and len(fam.steps) == 3
    assert [s.h[0] for s in fam.steps] == [0.5, 0.25, 0.125]
    assert all(s.check.ok for s in fam.steps)
    assert is_strictly_decreasing(fam.min_gaps)
    # first member agrees with a direct solve
    direct = solve(comb.with_h((0.5,)))
    assert fam.steps[0].result.curve.endpoints == pytest.approx(direct.curve.endpoints, abs=1e-8)


def test_degeneration_validation():
    with pytest.raises(ValueError):
        degeneration_family(Comb(2, (1,), (1.0,)), 2, 3)
    with pytest.raises(ValueError):
        degeneration_family(Comb(2, (1,), (1.0,)), 1, 0)


def test_is_strictly_decreasing():
    assert is_strictly_decreasing([3, 2, 1])
    assert not is_strictly_decreasing([3, 3, 1])
    assert is_strictly_decreasing([])
