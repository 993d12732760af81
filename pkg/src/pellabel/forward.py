"""Solvability and explicit solutions of P^2 - D Q^2 = c on a given curve.

Detection scans degrees ``r = 1..r_max`` for which every ``r |eta_j| / pi`` is
a positive integer.  Synthesis builds the phase ``theta`` on each band from the
canonical integrand, samples ``P = cos(theta)`` and
``Q = sin(theta) / sqrt(-D)`` and fits both polynomials.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import reduce
from typing import Optional

import numpy as np

from .canonical import CanonicalData, CurveConfig
from .polynomials import Poly, divrem, fit, roots_in_interval, working_dtype
from .quadrature import integrate_half_singular

DEFAULT_RMAX = 200
DEFAULT_TOL = 1e-8
FIT_LIMIT = 1e-6
ENDPOINT_LIMIT = 1e-7


class SynthesisError(RuntimeError):
    pass


@dataclass(frozen=True)
class PellVerdict:
    solvable: bool
    degree: Optional[int]
    r_vector: Optional[tuple[int, ...]]
    primitive: bool
    certificate: tuple[float, ...]
    r_max: int
    tol: float = DEFAULT_TOL


@dataclass(frozen=True)
class PellSolution:
    """Sup-normalised solution (``max |P| = 1`` on the bands, ``c = 1``).

    ``P_monic``, ``Q_monic`` and ``c_monic`` carry the same solution rescaled to
    a monic ``P``.
    """

    degree: int
    r_vector: tuple[int, ...]
    P: Poly
    Q: Poly
    c: float
    P_monic: Poly
    Q_monic: Poly
    c_monic: float
    band_root_counts: tuple[int, ...]
    residual: float
    fit_residual: float
    division_defect: float


@dataclass(frozen=True)
class Certificate:
    passed: bool
    residual: float
    logderiv_error: float
    residual_tol: float = 1e-8
    logderiv_tol: float = 1e-6


def _gcd(values) -> int:
    return reduce(math.gcd, values, 0)


def verdict_at_degree(data: CanonicalData, r: int, tol: float = DEFAULT_TOL, r_max: Optional[int] = None) -> PellVerdict:
    """Check whether degree ``r`` itself is realised (not necessarily minimal)."""
    eta = np.asarray(data.eta_abs)
    vals = r * eta / math.pi
    near = np.rint(vals)
    dist = np.abs(vals - near)
    ok = bool(np.all(dist < tol) and np.all(near >= 1) and int(near.sum()) == r)
    r_vec = tuple(int(v) for v in near) if ok else None
    return PellVerdict(
        solvable=ok,
        degree=r if ok else None,
        r_vector=r_vec,
        primitive=bool(ok and _gcd(r_vec) == 1),
        certificate=tuple(float(d) for d in dist),
        r_max=r if r_max is None else r_max,
        tol=tol,
    )


def detect(curve: CurveConfig, data: CanonicalData, r_max: int = DEFAULT_RMAX, tol: float = DEFAULT_TOL) -> PellVerdict:
    """Smallest ``r <= r_max`` with all ``r |eta_j| / pi`` positive integers.

    When nothing is found the certificate is the closest miss over the scan.
    """
    if r_max < 1:
        raise ValueError("r_max must be >= 1")
    best = None
    for r in range(1, r_max + 1):
        v = verdict_at_degree(data, r, tol, r_max=r_max)
        if v.solvable:
            return v
        if best is None or max(v.certificate) < max(best.certificate):
            best = v
    return PellVerdict(False, None, None, False, best.certificate, r_max, tol)


def enumerate_primitive_partitions(r: int, g: int) -> list[tuple[int, ...]]:
    """Ordered ``(g+1)``-tuples of positive integers summing to ``r`` with gcd 1."""
    if r < 1 or g < 0:
        raise ValueError("need r >= 1 and g >= 0")
    out = []
    for cuts in itertools.combinations(range(1, r), g):
        bounds = (0,) + cuts + (r,)
        parts = tuple(bounds[i + 1] - bounds[i] for i in range(g + 1))
        if _gcd(parts) == 1:
            out.append(parts)
    return out


def _band_nodes(a: float, b: float, n: int) -> np.ndarray:
    k = np.arange(1, n + 1)
    return 0.5 * (a + b) - 0.5 * (b - a) * np.cos((2 * k - 1) * np.pi / (2 * n))


def band_phase(curve: CurveConfig, R: Poly, j: int, x: np.ndarray, start: float, stop: float, r: int) -> np.ndarray:
    """Phase on band ``j`` with ``theta(a_j) = start`` and ``theta(b_j) = stop``.

    Each node integrates ``r |R| / sqrt|D|`` from its nearer band endpoint.
    """
    a, b = curve.bands[j]
    absR = lambda t: np.abs(R(t))  # noqa: E731
    theta = np.empty_like(x)
    left = x <= 0.5 * (a + b)
    if np.any(left):
        theta[left] = start + r * integrate_half_singular(absR, a, x[left], curve.roots)
    if np.any(~left):
        # integral from b_j down to x is negative
        theta[~left] = stop + r * integrate_half_singular(absR, b, x[~left], curve.roots)
    return theta


def pell_residual(P: Poly, Q: Poly, D: Poly, c: float) -> float:
    """Max coefficient of ``P^2 - D Q^2 - c`` relative to that of ``P^2``."""
    dt = working_dtype()
    p = np.asarray(P.coeffs, dtype=dt)
    q = np.asarray(Q.coeffs, dtype=dt)
    d = np.asarray(D.coeffs, dtype=dt)
    p2 = np.convolve(p, p)
    dq2 = np.convolve(d, np.convolve(q, q)) if len(q) else np.zeros(1, dtype=dt)
    n = max(len(p2), len(dq2))
    diff = np.zeros(n, dtype=dt)
    diff[: len(p2)] += p2
    diff[: len(dq2)] -= dq2
    diff[0] -= dt(c)
    return float(np.max(np.abs(diff)) / np.max(np.abs(p2)))


def synthesize(curve: CurveConfig, data: CanonicalData, verdict: PellVerdict, samples_per_band: Optional[int] = None) -> PellSolution:
    """Explicit polynomials for a solvable verdict via ``P = cos(theta)``."""
    if not verdict.solvable:
        raise ValueError("synthesize needs a solvable verdict")
    r = verdict.degree
    r_vec = verdict.r_vector
    g = curve.genus
    if samples_per_band is None:
        samples_per_band = 4 * (r + 1)
    R = data.R
    xs, cs, qs = [], [], []
    q_j = 0
    for j, (a, b) in enumerate(curve.bands):
        full = r * data.eta_abs[j]
        if abs(full - math.pi * r_vec[j]) > ENDPOINT_LIMIT:
            raise SynthesisError(
                f"band {j}: phase increment {full:.12g} differs from {r_vec[j]}*pi by {abs(full - math.pi * r_vec[j]):.3g}"
            )
        x = _band_nodes(a, b, samples_per_band)
        theta = band_phase(curve, R, j, x, math.pi * q_j, math.pi * (q_j + r_vec[j]), r)
        xs.append(x)
        cs.append(np.cos(theta))
        # y = i (-1)^(g-j) sqrt(-D) on band j
        branch = -1.0 if (g - j) % 2 else 1.0
        qs.append(branch * np.sin(theta) / np.sqrt(curve.d_abs(x)))
        q_j += r_vec[j]
    x = np.concatenate(xs)
    domain = (curve.endpoints[0], curve.endpoints[-1])
    P, p_res = fit((x, np.concatenate(cs)), r, domain)
    Q, q_res = fit((x, np.concatenate(qs)), r - g - 1, domain)
    q_scale = float(np.max(np.abs(np.concatenate(qs))))
    fit_residual = max(p_res, q_res / q_scale)
    if fit_residual > FIT_LIMIT:
        raise SynthesisError(f"fit residual {fit_residual:.3g} exceeds {FIT_LIMIT:g}; verdict is likely spurious")
    if P.lead < 0:
        P = -P
    if Q.lead < 0:
        Q = -Q
    D = curve.D
    residual = pell_residual(P, Q, D, 1.0)
    quot, rem = divrem(P * P - 1.0, D)
    p2max = float(np.max(np.abs((P * P).coeffs)))
    div_defect = max(
        float(np.max(np.abs(rem.coeffs))) if not rem.is_zero() else 0.0,
        float(np.max(np.abs((quot - Q * Q).coeffs))) if not (quot - Q * Q).is_zero() else 0.0,
    ) / p2max
    counts = tuple(len(roots_in_interval(P, a, b)) for a, b in curve.bands)
    lead = P.lead
    return PellSolution(
        degree=r,
        r_vector=tuple(r_vec),
        P=P,
        Q=Q,
        c=1.0,
        P_monic=P.scale(1.0 / lead),
        Q_monic=Q.scale(1.0 / Q.lead),
        c_monic=1.0 / lead**2,
        band_root_counts=counts,
        residual=residual,
        fit_residual=fit_residual,
        division_defect=div_defect,
    )


def _phase_points(curve: CurveConfig, n: int = 20) -> list[tuple[int, float]]:
    per = -(-n // (curve.genus + 1))
    pts = []
    for j, (a, b) in enumerate(curve.bands):
        pts.extend((j, a + (b - a) * (i + 0.5) / per) for i in range(per))
    return pts[:n] if len(pts) >= n else pts


def verify(curve: CurveConfig, sol: PellSolution, R: Optional[Poly] = None, n_points: int = 20) -> Certificate:
    """Recompute the Pell residual and sample ``d theta/dx = r |R| / sqrt|D|``.

    ``theta`` is the argument of ``P + i sqrt(-D) Q`` on the bands; its
    derivative is taken by central differences.  ``R`` defaults to the
    canonical polynomial of ``curve``.
    """
    from .canonical import canonical_polynomial

    if R is None:
        R = canonical_polynomial(curve)
    residual = pell_residual(sol.P, sol.Q, curve.D, sol.c)
    worst = 0.0
    for j, x in _phase_points(curve, n_points):
        a, b = curve.bands[j]
        h = 1e-5 * (b - a)
        f = lambda t: sol.P(t) + 1j * np.sqrt(curve.d_abs(t)) * sol.Q(t)  # noqa: E731
        dtheta = np.angle(f(x + h) * np.conj(f(x - h))) / (2 * h)
        expected = sol.degree * abs(R(x)) / math.sqrt(curve.d_abs(x))
        worst = max(worst, abs(abs(dtheta) - expected) / expected)
    ok = residual < 1e-8 and worst < 1e-6
    return Certificate(passed=bool(ok), residual=residual, logderiv_error=float(worst))


def equioscillation_defect(curve: CurveConfig, sol: PellSolution) -> float:
    """Worst departure from alternation between +1 and -1 on every band.

    Each band ``E_j`` must carry exactly ``r_j + 1`` extremal points (its two
    endpoints and the critical points of ``P`` inside) with alternating sign
    and ``|P| = 1``; a miscount returns ``inf``.
    """
    dP = sol.P.deriv()
    worst = 0.0
    for (a, b), rj in zip(curve.bands, sol.r_vector):
        inner = [x for x in roots_in_interval(dP, a, b) if a < x < b] if dP.degree >= 1 else []
        ext = [a] + inner + [b]
        if len(ext) != rj + 1:
            return math.inf
        vals = np.array([sol.P(x) for x in ext])
        worst = max(worst, float(np.max(np.abs(np.abs(vals) - 1.0))))
        if np.any(np.sign(vals[1:]) == np.sign(vals[:-1])):
            return math.inf
    return worst


def solve_forward(curve: CurveConfig, r_max: int = DEFAULT_RMAX, tol: float = DEFAULT_TOL):
    """Canonical data, minimal-degree verdict and (if solvable) the solution."""
    from .canonical import analyze

    data = analyze(curve)
    verdict = detect(curve, data, r_max, tol)
    sol = synthesize(curve, data, verdict) if verdict.solvable else None
    return data, verdict, sol
