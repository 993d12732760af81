"""Integrals of ``numerator / sqrt|D|`` between branch points of y^2 = D(x).

Both rules remove the inverse-square-root endpoint behaviour analytically:

* two singular endpoints: ``x = m + rho*cos(theta)`` turns the integral into a
  Gauss-Chebyshev sum over ``numerator / sqrt|W|`` where ``W`` collects the
  remaining roots of ``D``;
* one singular endpoint: ``x = lo + t**2`` followed by composite
  Gauss-Legendre on the (now regular) integrand.

A root of ``D`` just outside the interval leaves a narrow bump in the
regularised integrand; panels are then graded geometrically towards that end.

Inside bands ``D < 0`` and the square root is ``i*sqrt(-D)``; callers track the
factor ``i`` themselves, everything here works with ``|D|`` and is real.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence, Union

import numpy as np

from .polynomials import Poly, divrem, from_roots

DEFAULT_TOL = 1e-12
DEFAULT_MAX_NODES = 2**16
GRADING_THRESHOLD = 0.02

Integrand = Union[Poly, Callable[[np.ndarray], np.ndarray]]


class QuadratureWarning(RuntimeWarning):
    """Node doubling hit the cap before two successive estimates agreed."""


@dataclass(frozen=True)
class SingularInterval:
    lo: float
    hi: float
    others: tuple[float, ...]  # roots of D outside [lo, hi]
    kind: str = "band"

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError("SingularInterval needs lo < hi")
        if self.kind not in ("band", "gap", "half-gap"):
            raise ValueError(f"unknown interval kind {self.kind!r}")
        if any(self.lo <= r <= self.hi for r in self.others):
            raise ValueError("weight polynomial has a root inside the interval")

    @property
    def weight_poly(self) -> Poly:
        return from_roots(self.others)

    @classmethod
    def band(cls, endpoints: Sequence[float], j: int) -> "SingularInterval":
        """E_j = [a_j, b_j] of the ascending endpoint list."""
        e = list(endpoints)
        return cls(e[2 * j], e[2 * j + 1], tuple(e[: 2 * j] + e[2 * j + 2 :]), "band")

    @classmethod
    def gap(cls, endpoints: Sequence[float], j: int) -> "SingularInterval":
        """T_j = [b_{j-1}, a_j], j = 1..g."""
        e = list(endpoints)
        return cls(e[2 * j - 1], e[2 * j], tuple(e[: 2 * j - 1] + e[2 * j + 1 :]), "gap")


def _as_callable(f: Integrand):
    if isinstance(f, Poly):
        return f
    if np.isscalar(f):
        v = float(f)
        return lambda x: np.full_like(x, v, dtype=float)
    return f


def _inv_sqrt_abs_prod(x: np.ndarray, roots: np.ndarray) -> np.ndarray:
    if roots.size == 0:
        return np.ones_like(x)
    return 1.0 / np.sqrt(np.prod(np.abs(x[..., None] - roots), axis=-1))


def _inv_sqrt_offsets(d_lo, d_hi, gaps_lo: np.ndarray, gaps_hi: np.ndarray) -> np.ndarray:
    """``1/sqrt(prod |x - root|)`` from the offsets of ``x`` to the interval ends.

    Roots below the interval sit ``gaps_lo`` before ``lo`` and roots above sit
    ``gaps_hi`` after ``hi``, so every distance is a sum of positive terms.
    """
    prod = np.ones_like(d_lo)
    for g in gaps_lo:
        prod = prod * (g + d_lo)
    for g in gaps_hi:
        prod = prod * (g + d_hi)
    return 1.0 / np.sqrt(prod)


def _finish(value, err, n, converged, full_output, what):
    if not converged:
        warnings.warn(
            f"{what}: no convergence at {n} nodes (achieved {np.max(err):.3g})",
            QuadratureWarning,
            stacklevel=3,
        )
    if full_output:
        return value, {"n_nodes": n, "error": err, "converged": converged}
    return value


def _graded_edges(w_left: float, w_right: float) -> np.ndarray:
    """Panel edges on [0, 1], geometric towards an end whose feature width is small."""
    left = [w_left * 2.0**k for k in range(-2, 60) if w_left * 2.0**k < 0.25] if w_left < 0.25 else []
    right = [1.0 - w_right * 2.0**k for k in range(-2, 60) if w_right * 2.0**k < 0.25] if w_right < 0.25 else []
    middle = list(np.linspace(0.25 if left else 0.0, 0.75 if right else 1.0, 3))
    edges = np.unique(np.concatenate(([0.0], left, middle, right[::-1], [1.0])))
    return edges


def _graded_rule(edges: np.ndarray, order: int):
    gx, gw = _gl(order)
    h = np.diff(edges)[:, None]
    u = (edges[:-1, None] + 0.5 * h * (gx[None, :] + 1.0)).ravel()
    w = (0.5 * h * gw[None, :]).ravel()
    return u, w


def _refine(rule, n0: int, tol: float, max_nodes: int):
    """Double ``n`` until two successive rule values agree; ``rule(n)`` -> (value, scale, nodes)."""
    n = n0
    prev, _, _ = rule(n)
    while True:
        cur, scale, used = rule(2 * n)
        err = np.abs(cur - prev)
        ok = bool(np.all(err <= tol * np.maximum(np.abs(cur), scale)))
        if ok or used >= max_nodes or 2 * n >= max_nodes:
            return cur, err, used, ok
        prev, n = cur, 2 * n


def _near_width(delta: float, rho: float) -> float:
    # width in u = theta / pi of the bump that a root at distance delta beyond an
    # endpoint produces in the Chebyshev variable
    return math.sqrt(2.0 * delta / rho) / math.pi


def integrate_endpoint_singular(
    numerator: Integrand,
    iv: SingularInterval,
    n_nodes: int = 16,
    tol: float = DEFAULT_TOL,
    max_nodes: int = DEFAULT_MAX_NODES,
    full_output: bool = False,
):
    """``int_lo^hi numerator(x) / sqrt|D(x)| dx`` for a band or gap of ``D``.

    Gauss-Chebyshev with ``N`` nodes, doubled until two successive estimates
    agree to ``tol`` (relative to the larger of the value and the integral of
    the absolute integrand, so vanishing integrals converge too).  When another
    root of ``D`` sits close to an endpoint the same ``theta`` integral is
    taken instead by composite Gauss-Legendre on panels graded towards that
    end.
    """
    if iv.kind not in ("band", "gap"):
        raise ValueError("endpoint-singular rule needs a band or gap interval")
    if n_nodes < 8:
        raise ValueError("n_nodes must be at least 8")
    f = _as_callable(numerator)
    others = np.asarray(iv.others, dtype=float)
    m = 0.5 * (iv.lo + iv.hi)
    rho = 0.5 * (iv.hi - iv.lo)
    below = others[others < iv.lo]
    above = others[others > iv.hi]
    w_lo = _near_width(iv.lo - below.max(), rho) if below.size else math.inf
    w_hi = _near_width(above.min() - iv.hi, rho) if above.size else math.inf

    def integrand(theta):
        # offsets from both ends without cancellation against x
        d_lo = 2.0 * rho * np.cos(0.5 * theta) ** 2
        d_hi = 2.0 * rho * np.sin(0.5 * theta) ** 2
        x = m + rho * np.cos(theta)
        return np.asarray(f(x), dtype=float) * _inv_sqrt_offsets(d_lo, d_hi, iv.lo - below, above - iv.hi)

    if min(w_lo, w_hi) >= GRADING_THRESHOLD:

        def rule(n):
            k = np.arange(1, n + 1)
            vals = integrand((2 * k - 1) * np.pi / (2 * n))
            return np.pi / n * vals.sum(), np.pi / n * np.abs(vals).sum(), n

        start = n_nodes
    else:
        # u = theta / pi; u = 0 is x = hi, u = 1 is x = lo
        edges = _graded_edges(w_hi, w_lo)

        def rule(order):
            u, w = _graded_rule(edges, order)
            vals = integrand(np.pi * u)
            return np.pi * np.dot(w, vals), np.pi * np.dot(w, np.abs(vals)), order * (len(edges) - 1)

        start = 8
    value, err, used, ok = _refine(rule, start, tol, max_nodes)
    return _finish(float(value), float(err), used, ok, full_output, "endpoint-singular integral")


@lru_cache(maxsize=None)
def _gl(order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


def _remaining_roots(D, lo: float):
    """Roots of D other than ``lo`` (as array) or the deflated polynomial."""
    if isinstance(D, Poly):
        quot, _ = divrem(D, Poly([-lo, 1.0]))
        return np.real(np.roots(quot.coeffs[::-1])), quot
    roots = np.asarray(D, dtype=float)
    keep = np.ones(len(roots), dtype=bool)
    idx = int(np.argmin(np.abs(roots - lo)))
    keep[idx] = False
    return roots[keep], None


def integrate_half_singular(
    numerator: Integrand,
    lo: float,
    hi,
    D,
    n_nodes: int = 16,
    tol: float = DEFAULT_TOL,
    max_nodes: int = DEFAULT_MAX_NODES,
    full_output: bool = False,
):
    """``int_lo^hi numerator / sqrt|D| dx`` where only ``lo`` is a root of ``D``.

    ``D`` is a :class:`Poly` or the sequence of its roots (preferred: the
    weight is then evaluated as a product of distances).  ``hi`` may lie on
    either side of ``lo`` and may be an array, in which case all integrals are
    refined together.  The substitution ``x = lo + t**2`` regularises the
    endpoint; the regular integrand is handled by composite Gauss-Legendre,
    panels graded towards any end that has another root of ``D`` nearby, with
    the per-panel order doubled until convergence.
    """
    f = _as_callable(numerator)
    his = np.atleast_1d(np.asarray(hi, dtype=float))
    sigma = np.sign(his - lo)
    span = np.sqrt(np.abs(his - lo))
    roots, quot = _remaining_roots(D, lo)
    # feature widths in u = t / span at the singular end (u=0) and regular end (u=1)
    w0, w1 = math.inf, math.inf
    for k in range(len(his)):
        if span[k] == 0:
            continue
        behind = roots[(roots - lo) * sigma[k] < 0]
        ahead = roots[(roots - his[k]) * sigma[k] > 0]
        if behind.size:
            w0 = min(w0, math.sqrt(np.min(np.abs(behind - lo))) / span[k])
        if ahead.size:
            w1 = min(w1, float(np.min(np.abs(ahead - his[k]))) / (2.0 * span[k] ** 2))
    edges = _graded_edges(w0, w1)

    def rule(order):
        u, w = _graded_rule(edges, order)
        t = span[:, None] * u[None, :]
        x = lo + sigma[:, None] * t * t
        if quot is None:
            wx = np.empty_like(x)
            for k in range(len(his)):
                behind = roots[(roots - lo) * sigma[k] < 0]
                ahead = roots[(roots - his[k]) * sigma[k] > 0]
                # |x - lo| = t^2 and |hi - x| = span^2 (1 - u)(1 + u)
                wx[k] = _inv_sqrt_offsets(
                    t[k] ** 2, span[k] ** 2 * (1.0 - u) * (1.0 + u), np.abs(behind - lo), np.abs(ahead - his[k])
                )
        else:
            wx = 1.0 / np.sqrt(np.abs(quot(x)))
        vals = 2.0 * np.asarray(f(x), dtype=float) * wx
        wt = sigma[:, None] * span[:, None] * w[None, :]
        return (vals * wt).sum(axis=1), np.abs(vals * wt).sum(axis=1), order * (len(edges) - 1)

    value, err, used, ok = _refine(rule, max(8, n_nodes // 2), tol, max_nodes)
    if np.ndim(hi):
        return _finish(value, err, used, ok, full_output, "half-singular integral")
    return _finish(float(value[0]), float(err[0]), used, ok, full_output, "half-singular integral")
