"""Dense real polynomials in ascending-coefficient form.

Everything downstream (D, the canonical polynomial R, the Pell-Abel pair P, Q)
is a :class:`Poly`.  Coefficients are binary64; the working precision used for
residual certificates can be widened through ``PELL_ABEL_PRECISION``.
"""
from __future__ import annotations

import os
from typing import Iterable, NamedTuple, Sequence

import numpy as np
from numpy.polynomial import chebyshev as _cheb
from numpy.polynomial import polynomial as _mono

DEFLATION_THRESHOLD = 1e-300


class RootFindingError(RuntimeError):
    pass


class FitError(ValueError):
    pass


def working_dtype():
    """numpy dtype selected by ``PELL_ABEL_PRECISION`` (double or extended)."""
    mode = os.environ.get("PELL_ABEL_PRECISION", "double").strip().lower()
    if mode == "double":
        return np.float64
    if mode == "extended":
        return np.longdouble
    raise ValueError(f"PELL_ABEL_PRECISION must be 'double' or 'extended', got {mode!r}")


class Poly:
    """Real polynomial ``sum(coeffs[i] * x**i)``.

    Trailing coefficients with magnitude at most ``DEFLATION_THRESHOLD`` are
    dropped, so ``degree`` is the index of the last significant coefficient
    (``-1`` for the zero polynomial).
    """

    __slots__ = ("_c",)

    def __init__(self, coeffs: Iterable[float] = ()):
        c = np.array(list(coeffs) if not isinstance(coeffs, np.ndarray) else coeffs, dtype=float)
        c = np.atleast_1d(c)
        if np.any(~np.isfinite(c)):
            raise ValueError("polynomial coefficients must be finite")
        n = len(c)
        while n > 0 and abs(c[n - 1]) <= DEFLATION_THRESHOLD:
            n -= 1
        self._c = c[:n].copy()
        self._c.setflags(write=False)

    @classmethod
    def constant(cls, value: float) -> "Poly":
        return cls([value])

    @classmethod
    def x(cls) -> "Poly":
        return cls([0.0, 1.0])

    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    @property
    def degree(self) -> int:
        return len(self._c) - 1

    @property
    def lead(self) -> float:
        return float(self._c[-1]) if len(self._c) else 0.0

    def is_zero(self) -> bool:
        return len(self._c) == 0

    def __call__(self, x):
        """Horner evaluation; works on scalars and arrays."""
        x = np.asarray(x)
        acc = np.zeros_like(x, dtype=np.result_type(x, float))
        for a in self._c[::-1]:
            acc = acc * x + a
        return acc if acc.ndim else float(acc)

    def deriv(self) -> "Poly":
        if self.degree < 1:
            return Poly()
        return Poly(self._c[1:] * np.arange(1, len(self._c)))

    def monic(self) -> "Poly":
        if self.is_zero():
            raise ZeroDivisionError("zero polynomial has no monic form")
        return Poly(self._c / self._c[-1])

    def scale(self, s: float) -> "Poly":
        return Poly(self._c * s)

    def compose_affine(self, alpha: float, beta: float) -> "Poly":
        """Return ``x -> self(alpha * x + beta)``."""
        out = Poly()
        lin = Poly([beta, alpha])
        for a in self._c[::-1]:
            out = out * lin + Poly([a])
        return out

    def tolist(self) -> list[float]:
        return [float(v) for v in self._c]

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            return other
        if np.isscalar(other):
            return Poly([float(other)])
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        n = max(len(self._c), len(other._c))
        out = np.zeros(n)
        out[: len(self._c)] += self._c
        out[: len(other._c)] += other._c
        return Poly(out)

    __radd__ = __add__

    def __neg__(self):
        return Poly(-self._c)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.is_zero() or other.is_zero():
            return Poly()
        return Poly(np.convolve(self._c, other._c))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        out = Poly([1.0])
        for _ in range(n):
            out = out * self
        return out

    def __divmod__(self, other):
        return divrem(self, self._coerce(other))

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        return len(self._c) == len(other._c) and bool(np.all(self._c == other._c))

    def __hash__(self):
        return hash(tuple(self._c.tolist()))

    def __repr__(self):
        return f"Poly({self.tolist()!r})"


def from_roots(roots: Sequence[float]) -> Poly:
    """Monic polynomial with exactly the given real roots."""
    out = Poly([1.0])
    for r in roots:
        r = float(r)
        if not np.isfinite(r):
            raise ValueError("roots must be finite")
        out = out * Poly([-r, 1.0])
    return out


def eval_poly(p: Poly, x):
    return p(x)


def divrem(p: Poly, q: Poly) -> tuple[Poly, Poly]:
    """Long division ``p = q * quot + rem`` with ``deg rem < deg q``."""
    if q.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    rem = np.array(p.coeffs, dtype=float)
    dq = q.degree
    if p.degree < dq:
        return Poly(), Poly(rem)
    quot = np.zeros(p.degree - dq + 1)
    lead = q.coeffs[-1]
    for k in range(p.degree - dq, -1, -1):
        coef = rem[k + dq] / lead
        quot[k] = coef
        rem[k : k + dq + 1] -= coef * q.coeffs
        rem[k + dq] = 0.0
    return Poly(quot), Poly(rem[:dq])


def arith(p: Poly, q: Poly, op: str):
    if op == "add":
        return p + q
    if op == "sub":
        return p - q
    if op == "mul":
        return p * q
    if op == "divrem":
        return divrem(p, q)
    raise ValueError(f"unknown operation {op!r}")


def roots_in_interval(p, lo: float, hi: float, tol: float = 1e-13, n_grid: int | None = None) -> list[float]:
    """Simple roots of ``p`` in ``[lo, hi]`` by sign-change bracketing and bisection.

    ``p`` may be a :class:`Poly` or any vectorised callable.  The sign grid has
    ``n_grid`` cells (default ``64 * degree``); roots closer together than a grid
    cell, or of even multiplicity, are not seen.
    """
    if not lo < hi:
        raise ValueError("need lo < hi")
    if n_grid is None:
        deg = p.degree if isinstance(p, Poly) else 8
        n_grid = max(64 * max(deg, 1), 64)
    xs = np.linspace(lo, hi, n_grid + 1)
    fs = np.asarray(p(xs), dtype=float)
    if not np.all(np.isfinite(fs)):
        raise RootFindingError("non-finite values on the sign grid")
    width_tol = (hi - lo) * tol
    roots: list[float] = []
    for i in range(n_grid):
        fa, fb = fs[i], fs[i + 1]
        if fa == 0.0:
            if not roots or xs[i] != roots[-1]:
                roots.append(float(xs[i]))
            continue
        if fb == 0.0:
            if i + 1 == n_grid:
                roots.append(float(xs[i + 1]))
            continue
        if (fa > 0) == (fb > 0):
            continue
        a, b = xs[i], xs[i + 1]
        for _ in range(400):
            if b - a <= width_tol:
                break
            m = 0.5 * (a + b)
            if m <= a or m >= b:
                break  # adjacent floats: bracket is as tight as binary64 allows
            fm = float(p(m))
            if not np.isfinite(fm):
                raise RootFindingError(f"bisection hit a non-finite value at x={m!r}")
            if fm == 0.0:
                a = b = m
                break
            if (fm > 0) == (fa > 0):
                a, fa = m, fm
            else:
                b = m
        else:
            raise RootFindingError(f"bisection stalled on [{a!r}, {b!r}]")
        roots.append(float(0.5 * (a + b)))
    return roots


class FitResult(NamedTuple):
    poly: Poly
    residual: float


def fit(samples, degree: int, domain: tuple[float, float] | None = None) -> FitResult:
    """Least-squares polynomial fit through a Chebyshev basis on the sample hull.

    ``samples`` is a sequence of ``(x, y)`` pairs or a pair of arrays.  The
    returned residual is the max absolute misfit at the samples.
    """
    if isinstance(samples, tuple) and len(samples) == 2 and np.ndim(samples[0]) == 1:
        x, y = (np.asarray(v, dtype=float) for v in samples)
    else:
        arr = np.asarray(samples, dtype=float).reshape(-1, 2)
        x, y = arr[:, 0], arr[:, 1]
    if degree < 0:
        raise FitError("degree must be non-negative")
    if len(np.unique(x)) < degree + 1:
        raise FitError(f"need at least {degree + 1} distinct nodes, got {len(np.unique(x))}")
    lo, hi = domain if domain is not None else (float(x.min()), float(x.max()))
    if hi <= lo:
        lo, hi = lo - 1.0, lo + 1.0
    t = (2.0 * x - (lo + hi)) / (hi - lo)
    V = _cheb.chebvander(t, degree)
    coef, _, rank, _ = np.linalg.lstsq(V, y, rcond=None)
    if rank < degree + 1:
        raise FitError("rank-deficient fit (duplicate or collinear nodes)")
    # Chebyshev series in t -> power series in t -> substitute t = alpha*x + beta.
    power_t = Poly(_cheb.cheb2poly(coef))
    poly = power_t.compose_affine(2.0 / (hi - lo), -(lo + hi) / (hi - lo))
    resid = float(np.max(np.abs(_mono.polyval(x, poly.coeffs) - y))) if len(poly.coeffs) else float(np.max(np.abs(y)))
    return FitResult(poly, resid)
