"""Canonical polynomial and periods of a totally real hyperelliptic curve.

A curve is given by its ordered branch points ``a_0 < b_0 < ... < a_g < b_g``;
bands ``E_j = [a_j, b_j]`` carry ``D <= 0`` and gaps ``T_j = [b_{j-1}, a_j]``
carry ``D > 0``.  The canonical polynomial ``R`` is the monic degree-``g``
polynomial whose differential ``R dx / y`` has zero integral across every gap.
"""
from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numpy.polynomial import chebyshev as _cheb

from .polynomials import Poly, from_roots, roots_in_interval
from .quadrature import SingularInterval, integrate_endpoint_singular, integrate_half_singular

SEPARATION_FLOOR = 1e-9
CONDITION_LIMIT = 1e12


class CurveError(ValueError):
    pass


class CanonicalError(RuntimeError):
    """A structural property of the canonical differential failed numerically."""


class ConditioningWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class CurveConfig:
    endpoints: tuple[float, ...]
    separation_floor: float = field(default=SEPARATION_FLOOR, compare=False)

    def __post_init__(self):
        e = tuple(float(v) for v in self.endpoints)
        object.__setattr__(self, "endpoints", e)
        if len(e) < 2 or len(e) % 2:
            raise CurveError(f"need an even number (>= 2) of endpoints, got {len(e)}")
        if not all(np.isfinite(e)):
            raise CurveError("endpoints must be finite")
        steps = np.diff(e)
        if np.any(steps <= 0):
            raise CurveError("endpoints must be strictly increasing")
        if np.min(steps) <= self.separation_floor:
            raise CurveError(
                f"consecutive endpoints closer than {self.separation_floor:g} (min gap {np.min(steps):.3g})"
            )

    @property
    def genus(self) -> int:
        return len(self.endpoints) // 2 - 1

    @property
    def roots(self) -> np.ndarray:
        return np.asarray(self.endpoints)

    @property
    def bands(self) -> list[tuple[float, float]]:
        e = self.endpoints
        return [(e[2 * j], e[2 * j + 1]) for j in range(self.genus + 1)]

    @property
    def gaps(self) -> list[tuple[float, float]]:
        e = self.endpoints
        return [(e[2 * j - 1], e[2 * j]) for j in range(1, self.genus + 1)]

    @property
    def D(self) -> Poly:
        return from_roots(self.endpoints)

    def d_abs(self, x):
        """``|D(x)|`` as a product of distances (more accurate than Horner)."""
        x = np.asarray(x, dtype=float)
        return np.prod(np.abs(x[..., None] - self.roots), axis=-1)

    def min_separation(self) -> float:
        return float(np.min(np.diff(self.endpoints)))

    def affine(self, alpha: float, beta: float) -> "CurveConfig":
        pts = [alpha * v + beta for v in self.endpoints]
        return CurveConfig(tuple(sorted(pts)), self.separation_floor)


@dataclass(frozen=True)
class CanonicalData:
    R: Poly
    gap_roots: tuple[float, ...]
    eta_abs: tuple[float, ...]
    lam: tuple[float, ...]
    residue_defect: float
    condition: float
    gap_defect: float = 0.0  # max |int_T R/sqrt|D|| / int_T |R|/sqrt|D|

    @property
    def genus(self) -> int:
        return len(self.eta_abs) - 1


def _gap_moment_matrix(curve: CurveConfig, mid: float, half: float):
    g = curve.genus
    M = np.empty((g, g))
    v = np.empty(g)
    for j in range(1, g + 1):
        iv = SingularInterval.gap(curve.endpoints, j)
        for i in range(g):
            basis = np.zeros(i + 1)
            basis[i] = 1.0
            M[j - 1, i] = integrate_endpoint_singular(
                lambda x, b=basis: _cheb.chebval((x - mid) / half, b), iv
            )
        v[j - 1] = -integrate_endpoint_singular(lambda x: ((x - mid) / half) ** g, iv)
    return M, v


def canonical_polynomial(curve: CurveConfig, full_output: bool = False):
    """The unique monic degree-``g`` polynomial with vanishing gap periods.

    The linear system is posed in the variable ``t = (x - mid) / half`` of the
    hull ``[a_0, b_g]`` with the non-leading part in the Chebyshev basis, which
    only rescales the defining integrals.  With ``full_output`` the condition
    number of that system is returned alongside.
    """
    g = curve.genus
    if g == 0:
        return (Poly([1.0]), 1.0) if full_output else Poly([1.0])
    lo, hi = curve.endpoints[0], curve.endpoints[-1]
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    M, v = _gap_moment_matrix(curve, mid, half)
    cond = float(np.linalg.cond(M))
    if not np.isfinite(cond) or cond > CONDITION_LIMIT:
        warnings.warn(f"canonical system ill-conditioned (cond ~ {cond:.3g})", ConditioningWarning, stacklevel=2)
    u = np.linalg.solve(M, v)
    power_t = Poly(_cheb.cheb2poly(u)) + Poly([0.0] * g + [1.0])
    # R(x) = half^g * Rt((x - mid) / half) is monic in x
    R = power_t.compose_affine(1.0 / half, -mid / half).scale(half**g)
    R = Poly(np.append(R.coeffs[:g], 1.0))
    return (R, cond) if full_output else R


def residue_defect(eta_abs: Sequence[float]) -> float:
    """``min_eps |sum eps_j |eta_j| - pi|`` over all sign vectors."""
    eta = np.asarray(eta_abs, dtype=float)
    best = math.inf
    for signs in itertools.product((1.0, -1.0), repeat=len(eta)):
        best = min(best, abs(float(np.dot(signs, eta)) - math.pi))
    return best


def band_integral(curve: CurveConfig, numerator, j: int) -> float:
    return integrate_endpoint_singular(numerator, SingularInterval.band(curve.endpoints, j))


def gap_integral(curve: CurveConfig, numerator, j: int) -> float:
    return integrate_endpoint_singular(numerator, SingularInterval.gap(curve.endpoints, j))


def periods(curve: CurveConfig, R: Poly, condition: float = float("nan")) -> CanonicalData:
    """Imaginary half-periods, gap roots and flat half-periods of ``R dx / y``."""
    g = curve.genus
    e = curve.endpoints
    eta = tuple(abs(float(band_integral(curve, R, j))) for j in range(g + 1))
    roots: list[float] = []
    lam: list[float] = []
    gap_defect = 0.0
    for j in range(1, g + 1):
        lo, hi = e[2 * j - 1], e[2 * j]
        found = roots_in_interval(R, lo, hi)
        found = [c for c in found if lo < c < hi]
        if len(found) != 1:
            raise CanonicalError(f"expected exactly one root of R in gap {j}, found {len(found)}")
        c = found[0]
        roots.append(c)
        left = float(integrate_half_singular(R, lo, c, curve.roots))
        right = float(integrate_half_singular(R, hi, c, curve.roots))
        lam.append(abs(left))
        # |R| has a kink at c, so the scale comes from the two halves
        scale = abs(left) + abs(right)
        gap_defect = max(gap_defect, abs(float(gap_integral(curve, R, j))) / scale)
    return CanonicalData(
        R=R,
        gap_roots=tuple(roots),
        eta_abs=eta,
        lam=tuple(lam),
        residue_defect=residue_defect(eta),
        condition=condition,
        gap_defect=gap_defect,
    )


def analyze(curve: CurveConfig) -> CanonicalData:
    """Canonical polynomial plus all period data for ``curve``."""
    R, cond = canonical_polynomial(curve, full_output=True)
    return periods(curve, R, condition=cond)
