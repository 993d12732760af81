"""Pell-Abel equations on totally real hyperelliptic curves.

Forward direction: from branch points to the canonical differential, the
minimal solvable degree and explicit polynomials ``P, Q`` with
``P**2 - D*Q**2 = c``.  Inverse direction: from a comb (degree, slit heights,
slit lengths) back to a curve.
"""
from .applications import (
    DegenerationFamily,
    KDiffReport,
    TorsionReport,
    degeneration_family,
    kdiff_conjugate_range,
    kdiff_unique_zero,
    torsion_report,
)
from .canonical import CanonicalData, CurveConfig, CurveError, analyze, canonical_polynomial
from .forward import PellSolution, PellVerdict, detect, solve_forward, synthesize, verify
from .inverse import Comb, InverseSolveError, InverseSolveResult, existence_sweep, round_trip, solve
from .polynomials import Poly

__version__ = "0.1.0"

__all__ = [
    "CanonicalData",
    "Comb",
    "CurveConfig",
    "CurveError",
    "DegenerationFamily",
    "InverseSolveError",
    "InverseSolveResult",
    "KDiffReport",
    "PellSolution",
    "PellVerdict",
    "Poly",
    "TorsionReport",
    "analyze",
    "canonical_polynomial",
    "degeneration_family",
    "detect",
    "existence_sweep",
    "kdiff_conjugate_range",
    "kdiff_unique_zero",
    "round_trip",
    "solve",
    "solve_forward",
    "synthesize",
    "torsion_report",
    "verify",
]
