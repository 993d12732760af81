import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import INTERVAL, SYM_G1, curves
from pellabel.canonical import CurveConfig, analyze
from pellabel.forward import (
    detect,
    enumerate_primitive_partitions,
    equioscillation_defect,
    pell_residual,
    solve_forward,
    synthesize,
    verdict_at_degree,
    verify,
)
from pellabel.polynomials import Poly

T5 = [0.0, 5.0, 0.0, -20.0, 0.0, 16.0]
U4 = [1.0, 0.0, -12.0, 0.0, 16.0]


def test_chebyshev_degree5():
    data = analyze(INTERVAL)
    sol = synthesize(INTERVAL, data, verdict_at_degree(data, 5))
    np.testing.assert_allclose(sol.P.coeffs, T5, atol=1e-9)
    # sin(5t)/sin(t) = U_4(cos t)
    np.testing.assert_allclose(sol.Q.coeffs, U4, atol=1e-9)
    assert sol.c == 1.0 and sol.residual < 1e-10
    assert sol.band_root_counts == (5,)


def test_interval_minimal_degree_is_one():
    _, verdict, sol = solve_forward(INTERVAL, r_max=10)
    assert verdict.solvable and verdict.degree == 1 and verdict.r_vector == (1,)
    np.testing.assert_allclose(sol.P.coeffs, [0.0, 1.0], atol=1e-12)


def test_symmetric_genus1_closed_form():
    data, verdict, sol = solve_forward(SYM_G1, r_max=10)
    assert (verdict.degree, verdict.r_vector, verdict.primitive) == (2, (1, 1), True)
    np.testing.assert_allclose(sol.P.coeffs, [-5 / 3, 0.0, 2 / 3], atol=1e-9)
    np.testing.assert_allclose(sol.Q.coeffs, [2 / 3], atol=1e-9)
    np.testing.assert_allclose(sol.P_monic.coeffs, [-2.5, 0.0, 1.0], atol=1e-9)
    np.testing.assert_allclose(sol.Q_monic.coeffs, [1.0], atol=1e-9)
    assert sol.c_monic == pytest.approx(2.25, abs=1e-9)
    assert sol.band_root_counts == (1, 1)


def test_non_primitive_degree():
    data = analyze(SYM_G1)
    v = verdict_at_degree(data, 4)
    assert v.solvable and v.r_vector == (2, 2) and not v.primitive
    assert not verdict_at_degree(data, 3).solvable


def test_verify_passes_and_detects_perturbation():
    data = analyze(INTERVAL)
    sol = synthesize(INTERVAL, data, verdict_at_degree(data, 3))
    cert = verify(INTERVAL, sol)
    assert cert.passed and cert.residual < 1e-10 and cert.logderiv_error < 1e-6
    c = np.array(sol.P.coeffs)
    c[0] += 1e-3
    bad = verify(INTERVAL, dataclasses.replace(sol, P=Poly(c)))
    assert not bad.passed
    assert 1e-4 < bad.residual < 1e-2 and bad.logderiv_error > 1e-6


def test_pell_residual_closed_form():
    D = Poly([4.0, 0.0, -5.0, 0.0, 1.0])
    P = Poly([-2.5, 0.0, 1.0])
    assert pell_residual(P, Poly([1.0]), D, 2.25) < 1e-15


def test_synthesize_rejects_unsolvable():
    curve = CurveConfig((0.0, 1.0, 2.0, 3.7))
    data = analyze(curve)
    v = detect(curve, data, r_max=3)
    assert not v.solvable
    with pytest.raises(ValueError):
        synthesize(curve, data, v)


def test_closest_miss_certificate():
    curve = CurveConfig((0.0, 1.0, 2.0, 3.7))
    v = detect(curve, analyze(curve), r_max=3)
    assert v.degree is None and len(v.certificate) == 2
    assert all(0.0 <= d <= 0.5 for d in v.certificate)


@pytest.mark.parametrize(
    "r,g,expected",
    [((3), 2, [(1, 1, 1)]), (4, 1, [(1, 3), (3, 1)]), (2, 2, []), (1, 0, [(1,)])],
)
def test_partitions(r, g, expected):
    assert enumerate_primitive_partitions(r, g) == expected


def test_partition_count():
    # compositions of 5 into 3 parts: C(4,2) = 6, all primitive since 5 is prime
    assert len(enumerate_primitive_partitions(5, 2)) == 6
    # compositions of 4 into 2 parts: (1,3), (2,2), (3,1); (2,2) is not primitive
    assert (2, 2) not in enumerate_primitive_partitions(4, 1)


def _bruteforce_primitive(r, g):
    import itertools

    out = []
    for cut in itertools.combinations(range(1, r), g):
        bounds = (0,) + cut + (r,)
        part = tuple(b - a for a, b in zip(bounds, bounds[1:]))
        if math.gcd(*part) == 1:
            out.append(part)
    return sorted(out)


@pytest.mark.parametrize("r,g", [(6, 2), (7, 3), (8, 1), (9, 4)])
def test_partitions_bruteforce(r, g):
    assert sorted(enumerate_primitive_partitions(r, g)) == _bruteforce_primitive(r, g)


def test_equioscillation_and_sup_bound():
    data = analyze(SYM_G1)
    sol = synthesize(SYM_G1, data, verdict_at_degree(data, 4))
    assert equioscillation_defect(SYM_G1, sol) < 1e-7
    for a, b in SYM_G1.bands:
        x = np.linspace(a, b, 2001)
        assert np.max(np.abs(sol.P(x))) <= 1 + 1e-8


@settings(max_examples=10, deadline=None)
@given(st.floats(0.1, 10.0), st.floats(-3.0, 3.0))
def test_affine_equivariance(alpha, beta):
    # a Pell solution on E gives P(( x - beta) / alpha) on alpha E + beta
    moved = SYM_G1.affine(alpha, beta)
    _, verdict, sol = solve_forward(moved, r_max=10)
    assert verdict.degree == 2 and verdict.r_vector == (1, 1)
    _, _, base = solve_forward(SYM_G1, r_max=10)
    expected = base.P.compose_affine(1.0 / alpha, -beta / alpha)
    x = np.linspace(moved.endpoints[0], moved.endpoints[-1], 101)
    np.testing.assert_allclose(sol.P(x), expected(x), atol=1e-8)


@settings(max_examples=30, deadline=None)
@given(curves(g_min=1, g_max=3))
def test_pigeonhole_on_random_curves(curve):
    v = detect(curve, analyze(curve), r_max=curve.genus)
    assert not v.solvable


def test_sampled_solution_invariants():
    # genus-2 curve with a known degree-3 solution, obtained from T_3 preimages
    data = analyze(INTERVAL)
    T3 = synthesize(INTERVAL, data, verdict_at_degree(data, 3)).P
    # P = T_3 / s on [-1, 1]: |P| <= 1 cuts |T_3| <= s into three bands
    s = 0.8
    roots = []
    for v in (-s, s):
        roots.extend(np.roots((T3 - v).coeffs[::-1]).real)
    curve = CurveConfig(tuple(sorted(roots)))
    data, verdict, sol = solve_forward(curve, r_max=6)
    assert verdict.degree == 3 and verdict.r_vector == (1, 1, 1)
    assert sol.band_root_counts == verdict.r_vector
    assert equioscillation_defect(curve, sol) < 1e-7
    np.testing.assert_allclose(sol.P.coeffs, (T3.scale(1 / s)).coeffs, atol=1e-8)
