"""From a comb back to a curve: the Schwarz-Christoffel parameter problem.

A comb ``Pi_r(q_1..q_g; h_1..h_g)`` is the half-strip ``0 < Im < r*pi`` with
horizontal slits of length ``h_j`` at height ``q_j * pi``.  The curve that
realises it has ``r |eta_j| / pi = q_{j+1} - q_j`` and ``r lambda_j / pi = h_j``
with ``R = prod (x - c_k)`` canonical.  The conformal map is never evaluated;
the problem is posed on these real period constraints and solved by damped
Newton with a finite-difference Jacobian and continuation in the slit lengths.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .canonical import CurveConfig, CurveError, analyze
from .forward import detect
from .polynomials import from_roots
from .quadrature import SingularInterval, integrate_endpoint_singular, integrate_half_singular

log = logging.getLogger(__name__)

OUTER_WIDTH = 12.0  # logit clamp for gap-root coordinates
_BACKTRACK_FLOOR = 2.0**-20


class OrderingError(ValueError):
    pass


class InverseSolveError(RuntimeError):
    """Newton stagnated; ``best`` holds the best iterate found."""

    def __init__(self, msg, best=None):
        super().__init__(msg)
        self.best = best


@dataclass(frozen=True)
class Comb:
    r: int
    q: tuple[int, ...] = ()
    h: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "q", tuple(int(v) for v in self.q))
        object.__setattr__(self, "h", tuple(float(v) for v in self.h))
        if self.r < 1:
            raise ValueError("comb height r must be >= 1")
        if len(self.q) != len(self.h):
            raise ValueError("q and h must have the same length")
        bounds = (0,) + self.q + (self.r,)
        if any(b >= c for b, c in zip(bounds, bounds[1:])):
            raise ValueError(f"need 0 < q_1 < ... < q_g < r, got q={self.q} r={self.r}")
        if any(not (v > 0 and math.isfinite(v)) for v in self.h):
            raise ValueError("tooth lengths must be positive and finite")

    @property
    def genus(self) -> int:
        return len(self.q)

    @property
    def r_vector(self) -> tuple[int, ...]:
        bounds = (0,) + self.q + (self.r,)
        return tuple(b - a for a, b in zip(bounds, bounds[1:]))

    @classmethod
    def from_partition(cls, r_vector: Sequence[int], h: Sequence[float]) -> "Comb":
        q = tuple(int(v) for v in np.cumsum(r_vector)[:-1])
        return cls(int(sum(r_vector)), q, tuple(h))

    def with_h(self, h: Sequence[float]) -> "Comb":
        return Comb(self.r, self.q, tuple(h))


@dataclass(frozen=True)
class InverseSolveResult:
    curve: CurveConfig
    gap_roots: tuple[float, ...]
    iterations: int
    final_residual: float
    continuation_path: tuple[float, ...] = ()
    converged: bool = True
    comb: Optional[Comb] = field(default=None, compare=False)


def _split(unknowns: np.ndarray, g: int):
    u = np.asarray(unknowns, dtype=float)
    if u.shape != (3 * g,):
        raise ValueError(f"expected {3 * g} unknowns, got shape {u.shape}")
    endpoints = np.concatenate(([0.0], u[: 2 * g], [1.0]))
    return endpoints, u[2 * g :]


def _check_order(endpoints: np.ndarray, c: np.ndarray):
    if np.any(np.diff(endpoints) <= 0):
        raise OrderingError("endpoints are not strictly increasing")
    for j, cj in enumerate(c, start=1):
        if not endpoints[2 * j - 1] < cj < endpoints[2 * j]:
            raise OrderingError(f"c_{j} = {cj!r} is outside gap {j}")


def _residuals(endpoints: np.ndarray, c: np.ndarray, comb: Comb) -> np.ndarray:
    g = comb.genus
    e = [float(v) for v in endpoints]
    R = from_roots(c)
    r = comb.r
    rv = comb.r_vector
    out = np.empty(3 * g)
    for j in range(1, g + 1):
        lo, hi = e[2 * j - 1], e[2 * j]
        left = float(integrate_half_singular(R, lo, c[j - 1], endpoints))
        right = float(integrate_half_singular(R, hi, c[j - 1], endpoints))
        gap = float(integrate_endpoint_singular(R, SingularInterval.gap(e, j)))
        out[j - 1] = gap / (abs(left) + abs(right))
        out[2 * g + j - 1] = (r * abs(left) / math.pi) / comb.h[j - 1] - 1.0
    for j in range(g):
        eta = float(integrate_endpoint_singular(R, SingularInterval.band(e, j)))
        out[g + j] = r * abs(eta) / math.pi - rv[j]
    return out


def residual_system(unknowns, comb: Comb) -> np.ndarray:
    """Scaled constraint residuals for a candidate curve.

    ``unknowns`` is ``[b_0, a_1, b_1, ..., a_g, c_1, ..., c_g]`` with ``a_0 = 0``
    and ``b_g = 1`` fixed.  Returned, in order: ``g`` gap periods of
    ``prod(x - c_k) / sqrt|D|`` divided by the absolute gap integral; ``g``
    band defects ``r |eta_j| / pi - r_j`` for ``j < g``; ``g`` relative flat
    defects ``(r lambda_j / pi) / h_j - 1``.
    """
    g = comb.genus
    endpoints, c = _split(unknowns, g)
    _check_order(endpoints, c)
    return _residuals(endpoints, c, comb)


# Newton runs in unconstrained coordinates: log-widths of the 2g+1 segments of
# [0, 1] (first one pinned to 0) and a logit position of each c_j in its gap.
def _to_natural(z: np.ndarray, g: int):
    s = np.concatenate(([0.0], z[: 2 * g]))
    w = np.exp(s - s.max())
    w /= w.sum()
    endpoints = np.concatenate(([0.0], np.cumsum(w)))
    endpoints[-1] = 1.0
    t = np.clip(z[2 * g :], -OUTER_WIDTH * 4, OUTER_WIDTH * 4)
    frac = 1.0 / (1.0 + np.exp(-t))
    lo = endpoints[1 : 2 * g : 2]
    hi = endpoints[2 : 2 * g + 1 : 2]
    return endpoints, lo + (hi - lo) * frac


def _to_z(endpoints: np.ndarray, c: np.ndarray, g: int) -> np.ndarray:
    w = np.diff(endpoints)
    s = np.log(w / w[0])[1:]
    lo = endpoints[1 : 2 * g : 2]
    hi = endpoints[2 : 2 * g + 1 : 2]
    frac = (c - lo) / (hi - lo)
    return np.concatenate((s, np.log(frac / (1.0 - frac))))


def _g_of_z(z, comb: Comb):
    endpoints, c = _to_natural(z, comb.genus)
    if np.min(np.diff(endpoints)) <= 1e-12:
        return None
    try:
        _check_order(endpoints, c)
        return _residuals(endpoints, c, comb)
    except (OrderingError, CurveError, FloatingPointError):
        return None


def _jacobian(z, comb: Comb, f0, step: float):
    n = len(z)
    J = np.empty((len(f0), n))
    for i in range(n):
        dz = np.zeros(n)
        dz[i] = step * max(1.0, abs(z[i]))
        fp = _g_of_z(z + dz, comb)
        fm = _g_of_z(z - dz, comb)
        if fp is not None and fm is not None:
            J[:, i] = (fp - fm) / (2 * dz[i])
        elif fp is not None:
            J[:, i] = (fp - f0) / dz[i]
        elif fm is not None:
            J[:, i] = (f0 - fm) / dz[i]
        else:
            raise InverseSolveError("Jacobian column undefined: ordering collapse")
    return J


def _newton(z, comb: Comb, tol: float, max_iter: int, step: float):
    f = _g_of_z(z, comb)
    if f is None:
        raise InverseSolveError("initial iterate violates endpoint ordering")
    norm = float(np.max(np.abs(f)))
    it = 0
    while norm > tol and it < max_iter:
        it += 1
        J = _jacobian(z, comb, f, step)
        try:
            dz = np.linalg.solve(J, -f)
        except np.linalg.LinAlgError:
            dz = np.linalg.lstsq(J, -f, rcond=None)[0]
        lam = 1.0
        accepted = False
        while lam >= _BACKTRACK_FLOOR:
            cand = z + lam * dz
            fc = _g_of_z(cand, comb)
            if fc is not None:
                nc = float(np.max(np.abs(fc)))
                if nc < (1.0 - 1e-4 * lam) * norm:
                    z, f, norm = cand, fc, nc
                    accepted = True
                    break
            lam *= 0.5
        if not accepted:
            break
    return z, norm, it


def initial_guess(comb: Comb, scale: float) -> np.ndarray:
    """Natural unknowns for the comb with slit lengths ``scale * h``.

    Bands and gaps are laid out with widths ``r_j : 1``, shrunk towards the
    small-slit regime where each gap opens at the extremum of the degree-``r``
    Chebyshev polynomial sitting at phase ``q_j * pi``, with width
    ``2 pi h sqrt(x (1 - x)) / r``.  Both layouts are blended and the gap roots
    start at the gap midpoints.
    """
    g = comb.genus
    rv = np.array(comb.r_vector, dtype=float)
    widths = np.empty(2 * g + 1)
    widths[0::2] = rv
    widths[1::2] = 1.0
    flat = np.concatenate(([0.0], np.cumsum(widths) / widths.sum()))
    centers = 0.5 * (1.0 - np.cos(np.pi * np.array(comb.q, dtype=float) / comb.r))
    h = scale * np.array(comb.h)
    half = np.pi * h * np.sqrt(centers * (1.0 - centers)) / comb.r
    cheb = np.empty(2 * g + 2)
    cheb[0], cheb[-1] = 0.0, 1.0
    lo_c = np.maximum(centers - half, 0.0)
    hi_c = np.minimum(centers + half, 1.0)
    cheb[1:-1:2] = lo_c
    cheb[2:-1:2] = hi_c
    # weight on the Chebyshev layout grows as slits shrink
    mix = 1.0 / (1.0 + float(np.max(h)))
    endpoints = mix * cheb + (1.0 - mix) * flat
    endpoints = np.maximum.accumulate(endpoints)
    if np.any(np.diff(endpoints) <= 1e-9):
        endpoints = flat
    c = 0.5 * (endpoints[1 : 2 * g : 2] + endpoints[2 : 2 * g + 1 : 2])
    return np.concatenate((endpoints[1:-1], c))


def _stage_scales(s0: float, steps: int) -> list[float]:
    if steps <= 0:
        return [1.0]
    return [s0 * (1.0 / s0) ** (k / steps) for k in range(steps + 1)]


def solve(
    comb: Comb,
    max_iter: int = 40,
    tol: float = 1e-10,
    continuation_steps: int = 8,
    s0: float = 0.05,
    start: Optional[np.ndarray] = None,
    fd_step: float = 1e-6,
    max_refine: int = 6,
) -> InverseSolveResult:
    """Curve on ``[0, 1]`` whose canonical differential realises ``comb``.

    Without ``start`` the slit lengths are marched from ``s0 * h`` to ``h`` in
    ``continuation_steps`` geometric increments, each stage converged to
    ``tol`` before the next.  With ``start`` (natural unknowns of a nearby
    solution) a single warm-started stage is run.  Stages that fail are
    subdivided up to ``max_refine`` times before giving up.
    """
    g = comb.genus
    if g == 0:
        curve = CurveConfig((0.0, 1.0))
        return InverseSolveResult(curve, (), 0, 0.0, (0.0,), True, comb)

    if start is not None:
        e0, c0 = _split(np.asarray(start, dtype=float), g)
        _check_order(e0, c0)
        z = _to_z(e0, c0, g)
        scales = [1.0]
        prev_scale = 1.0
        warm = True
    else:
        scales = _stage_scales(s0, continuation_steps)
        e0, c0 = _split(initial_guess(comb, scales[0]), g)
        z = _to_z(e0, c0, g)
        prev_scale = scales[0]
        warm = False

    path: list[float] = []
    total = 0
    norm = math.inf
    pending = list(scales)
    refine = 0
    last_z = z.copy()
    while pending:
        s = pending[0]
        stage = comb.with_h(tuple(s * v for v in comb.h))
        try:
            z_new, norm, it = _newton(z, stage, tol, max_iter, fd_step)
        except InverseSolveError:
            z_new, norm, it = z, math.inf, 0
        total += it
        if norm <= tol:
            log.debug("stage s=%.4g converged in %d iterations (residual %.3g)", s, it, norm)
            path.append(norm)
            z = last_z = z_new
            prev_scale = s
            pending.pop(0)
            refine = 0
            continue
        if refine >= max_refine or (warm and prev_scale == s):
            endpoints, c = _to_natural(z_new, g)
            best = InverseSolveResult(CurveConfig(tuple(endpoints)), tuple(c), total, norm, tuple(path), False, comb)
            raise InverseSolveError(f"Newton stagnated at s={s:.4g} with residual {norm:.3g}", best=best)
        # back off: retry from the last converged stage via a geometric midpoint
        refine += 1
        z = last_z
        mid = math.sqrt(prev_scale * s)
        pending.insert(0, mid)

    endpoints, c = _to_natural(z, g)
    curve = CurveConfig(tuple(endpoints))
    return InverseSolveResult(curve, tuple(float(v) for v in c), total, norm, tuple(path), True, comb)


def natural_unknowns(result: InverseSolveResult) -> np.ndarray:
    e = np.asarray(result.curve.endpoints)
    return np.concatenate((e[1:-1], result.gap_roots))


def solve_warm(comb: Comb, previous: InverseSolveResult, **options) -> InverseSolveResult:
    """Solve ``comb`` starting from a nearby solution, with continuation in h."""
    g = comb.genus
    if g == 0:
        return solve(comb)
    h_prev = np.array(previous.comb.h if previous.comb is not None else comb.h)
    h_new = np.array(comb.h)
    steps = options.pop("continuation_steps", 2)
    z_start = natural_unknowns(previous)
    result = previous
    path: list[float] = []
    total = 0
    for k in range(1, steps + 1):
        t = k / steps
        h = h_prev * (h_new / h_prev) ** t
        result = solve(comb.with_h(tuple(h)), start=z_start, **options)
        z_start = natural_unknowns(result)
        path.extend(result.continuation_path)
        total += result.iterations
    return InverseSolveResult(result.curve, result.gap_roots, total, result.final_residual, tuple(path), True, comb)


@dataclass(frozen=True)
class RoundTrip:
    r: Optional[int]
    r_vector: Optional[tuple[int, ...]]
    h: tuple[float, ...]
    h_error: float
    ok: bool


def round_trip(result: InverseSolveResult, comb: Comb, r_max: Optional[int] = None, tol: float = 1e-8) -> RoundTrip:
    """Forward recomputation of a solved curve against its comb.

    Detection returns the minimal degree, so a non-primitive comb is compared
    through its primitive reduction ``r_vector / gcd``.
    """
    data = analyze(result.curve)
    verdict = detect(result.curve, data, r_max=r_max or comb.r, tol=tol)
    h = tuple(comb.r * lam / math.pi for lam in data.lam)
    err = max((abs(a - b) / b for a, b in zip(h, comb.h)), default=0.0)
    d = math.gcd(*comb.r_vector)
    reduced = tuple(v // d for v in comb.r_vector)
    ok = verdict.solvable and verdict.degree == comb.r // d and verdict.r_vector == reduced and err < 1e-6
    return RoundTrip(verdict.degree, verdict.r_vector, h, err, bool(ok))


@dataclass(frozen=True)
class SweepVerdict:
    g: int
    r: int
    exists: bool
    partition: Optional[tuple[int, ...]]
    reason: str
    result: Optional[InverseSolveResult] = None
    check: Optional[RoundTrip] = None


def existence_sweep(g: int, r: int, h: float = 1.0, partition: Optional[Sequence[int]] = None, **options) -> SweepVerdict:
    """Witness curve for a primitive degree-``r`` solution in genus ``g``.

    For ``r <= g`` no solver is run: ``g + 1`` positive integers cannot sum to
    ``r``.  Otherwise the partition ``(1, ..., 1, r - g)`` (or the one given)
    with all slit lengths ``h`` is solved and checked by forward detection.
    """
    if g < 0 or r < 1:
        raise ValueError("need g >= 0 and r >= 1")
    if r <= g:
        return SweepVerdict(g, r, False, None, f"{g + 1} positive integers cannot sum to r={r} <= g={g}")
    part = tuple(partition) if partition is not None else (1,) * g + (r - g,)
    if len(part) != g + 1 or sum(part) != r or min(part) < 1:
        raise ValueError(f"partition {part} is not a composition of {r} into {g + 1} parts")
    comb = Comb.from_partition(part, (h,) * g)
    result = solve(comb, **options)
    check = round_trip(result, comb)
    reason = "witness verified by forward round trip" if check.ok else "forward round trip failed"
    return SweepVerdict(g, r, check.ok, part, reason, result, check)
