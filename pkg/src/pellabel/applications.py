"""Arithmetic applications built on the forward and inverse solvers.

* k-differentials with a single zero: existence gates and witness curves;
* torsion-order reports for the divisor of the two points at infinity;
* degeneration families obtained by shrinking one slit of a comb.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .canonical import CurveConfig, analyze
from .forward import DEFAULT_TOL, detect
from .inverse import Comb, InverseSolveError, InverseSolveResult, RoundTrip, SweepVerdict, existence_sweep, round_trip, solve, solve_warm

MECHANISM_PELL = "pell"  # r-th power of the canonical differential, r = k(g-1)
MECHANISM_ABELIAN = "abelian"  # x^(g-1) dx / y, zero at the Weierstrass point at infinity
MECHANISM_NONE = "none"


@dataclass(frozen=True)
class KDiffReport:
    g: int
    k: int
    exists_unique_zero: bool
    required_degree: int
    zero_order: int
    conjugate_range: tuple[int, int]
    mechanism: str
    witness: Optional[SweepVerdict] = field(default=None, compare=False)

    @property
    def range_nonempty(self) -> bool:
        lo, hi = self.conjugate_range
        return lo <= hi


def conjugate_range_bounds(g: int, k: int) -> tuple[int, int]:
    """Orders ``n`` with a k-differential of divisor ``n z + n' iota(z)``, ``n >= n'``."""
    return (k + 1) * g - (k - 1), 2 * k * (g - 1)


def _check_gk(g: int, k: int, k_min: int = 1):
    if int(g) != g or int(k) != k or g < 2 or k < k_min:
        raise ValueError(f"need integers g >= 2 and k >= {k_min}, got g={g}, k={k}")


def kdiff_unique_zero(g: int, k: int, build_witness: bool = False, **options) -> KDiffReport:
    """Does genus ``g`` carry a primitive k-differential with a single zero?

    For ``k >= 2`` such a differential is the ``r``-th power of a canonical
    differential of degree ``r = k(g-1)``, which needs ``r >= g + 1``; the only
    failure is ``(g, k) = (2, 2)``.  For ``k = 1`` the abelian differential
    ``x^(g-1) dx / y`` already has its ``2g - 2`` zeros at one Weierstrass point,
    so no Pell witness is involved.  ``options`` are passed to the inverse solver.
    """
    _check_gk(g, k)
    r = k * (g - 1)
    bounds = conjugate_range_bounds(g, k)
    if k == 1:
        return KDiffReport(g, k, True, r, 2 * g - 2, bounds, MECHANISM_ABELIAN)
    exists = r >= g + 1
    witness = None
    if exists and build_witness:
        witness = existence_sweep(g, r, **options)
    return KDiffReport(g, k, exists, r, k * (2 * g - 2), bounds, MECHANISM_PELL if exists else MECHANISM_NONE, witness)


def kdiff_conjugate_range(g: int, k: int, n: int) -> bool:
    """True iff ``(k+1)g - (k-1) <= n <= 2k(g-1)``."""
    _check_gk(g, k, k_min=2)
    lo, hi = conjugate_range_bounds(g, k)
    return lo <= n <= hi


def conjugate_witness(g: int, k: int, n: int, **options) -> Optional[SweepVerdict]:
    """Witness curve for order ``n`` in the conjugate range (``None`` outside it)."""
    if not kdiff_conjugate_range(g, k, n):
        return None
    return existence_sweep(g, n - k * (g - 1), **options)


@dataclass(frozen=True)
class TorsionReport:
    genus: int
    divisor_order: Optional[int]
    candidate_point_orders: tuple[int, ...]
    forbidden_range_check: bool
    excluded_candidates: tuple[int, ...]
    notes: tuple[str, ...]


def torsion_report(curve: CurveConfig, r_max: int = 50, tol: float = DEFAULT_TOL) -> TorsionReport:
    """Order of ``inf+ - inf-`` and the resulting candidate point orders.

    A degree-``r`` solution gives ``2r z ~ 2r W`` for the image ``z`` of a point
    at infinity and a Weierstrass point ``W``; a primitive solution leaves the
    two candidates ``r`` and ``2r``, which are reported together.  Candidates in
    ``[3, 2g]`` are excluded since no point has such an order; the check passes
    when ``r > g`` and some candidate survives.
    """
    g = curve.genus
    verdict = detect(curve, analyze(curve), r_max, tol)
    if g == 0:
        notes = ("genus 0: the Jacobian is trivial and a solution exists in every degree r >= 1",)
        return TorsionReport(0, verdict.degree, (), True, (), notes)
    if not verdict.solvable:
        notes = (f"no solution of degree <= {r_max}: no torsion detected up to this bound",)
        return TorsionReport(g, None, (), True, (), notes)
    r = verdict.degree
    candidates = (r, 2 * r)
    excluded = tuple(c for c in candidates if 3 <= c <= 2 * g)
    ok = r > g and len(excluded) < len(candidates)
    notes = [f"r_vector {verdict.r_vector}"]
    if len(excluded) == 0:
        notes.append("order r versus 2r is not resolved by the periods alone")
    else:
        notes.append(f"candidates {excluded} lie in the forbidden range [3, {2 * g}]")
    if r <= g:
        notes.append(f"degree r={r} <= g={g} contradicts the pigeonhole bound")
    return TorsionReport(g, r, candidates, ok, excluded, tuple(notes))


@dataclass(frozen=True)
class DegenerationStep:
    h: tuple[float, ...]
    result: InverseSolveResult
    min_gap: float  # narrowest gap T_j = [b_{j-1}, a_j]
    min_separation: float  # narrowest distance between consecutive endpoints
    check: RoundTrip


@dataclass(frozen=True)
class DegenerationFamily:
    comb: Comb
    shrink_index: int
    steps: tuple[DegenerationStep, ...]
    completed: bool
    error: Optional[str] = None

    @property
    def min_gaps(self) -> list[float]:
        return [s.min_gap for s in self.steps]

    @property
    def results(self) -> list[InverseSolveResult]:
        return [s.result for s in self.steps]


def degeneration_family(comb: Comb, shrink_index: int, steps: int, **options) -> DegenerationFamily:
    """Solve ``comb`` with ``h[shrink_index-1]`` halved ``i`` times, ``1 <= i <= steps``.

    The shrinking slit closes a gap of the curve, so the narrowest gap width is
    recorded per member.  Each member is warm-started from the previous one and checked by a forward
    round trip.  A solver failure ends the family early; the members computed
    so far are kept and ``completed`` is false.
    """
    g = comb.genus
    if not 1 <= shrink_index <= g:
        raise ValueError(f"shrink_index must lie in [1, {g}], got {shrink_index}")
    if steps < 1:
        raise ValueError("steps must be >= 1")
    out: list[DegenerationStep] = []
    previous = None
    h0 = list(comb.h)
    for i in range(1, steps + 1):
        h = list(h0)
        h[shrink_index - 1] = h0[shrink_index - 1] * 0.5**i
        member = comb.with_h(tuple(h))
        try:
            res = solve(member, **options) if previous is None else solve_warm(member, previous, **options)
        except (InverseSolveError, ValueError) as exc:
            return DegenerationFamily(comb, shrink_index, tuple(out), False, f"step {i}: {exc}")
        check = round_trip(res, member)
        gap = min(hi - lo for lo, hi in res.curve.gaps)
        out.append(DegenerationStep(tuple(h), res, gap, res.curve.min_separation(), check))
        if not check.ok:
            return DegenerationFamily(comb, shrink_index, tuple(out), False, f"step {i}: forward round trip failed")
        previous = res
    return DegenerationFamily(comb, shrink_index, tuple(out), True)


def is_strictly_decreasing(values) -> bool:
    return all(b < a for a, b in zip(values, values[1:]))


__all__ = [
    "KDiffReport",
    "TorsionReport",
    "DegenerationStep",
    "DegenerationFamily",
    "conjugate_range_bounds",
    "kdiff_unique_zero",
    "kdiff_conjugate_range",
    "conjugate_witness",
    "torsion_report",
    "degeneration_family",
    "is_strictly_decreasing",
]
