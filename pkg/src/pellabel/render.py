"""Deterministic SVG pictures of combs, flat surfaces and solution polynomials.

Every coordinate goes through :func:`fmt` (9 significant digits) and elements
are emitted in a fixed order, so identical inputs give identical bytes.
"""
from __future__ import annotations

import math
from typing import Optional
from xml.sax.saxutils import escape

import numpy as np

from .canonical import CurveConfig
from .forward import PellSolution
from .inverse import Comb
from .polynomials import roots_in_interval

PALETTE = ("#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf")
UNIT = 60.0  # pixels per unit length
MARGIN = 50.0


def fmt(v: float) -> str:
    s = format(float(v), ".9g")
    return "0" if s == "-0" else s


class Canvas:
    """Minimal SVG builder in user coordinates with the y axis pointing up."""

    def __init__(self, xmin: float, xmax: float, ymin: float, ymax: float, unit_x: float = UNIT, unit_y: float = UNIT, title: str = ""):
        self.xmin, self.xmax, self.ymin, self.ymax = xmin, xmax, ymin, ymax
        self.ux, self.uy = unit_x, unit_y
        self.width = (xmax - xmin) * unit_x + 2 * MARGIN
        self.height = (ymax - ymin) * unit_y + 2 * MARGIN
        self.title = title
        self.items: list[str] = []
        self.defs: list[str] = []

    def X(self, x: float) -> str:
        return fmt(MARGIN + (x - self.xmin) * self.ux)

    def Y(self, y: float) -> str:
        return fmt(MARGIN + (self.ymax - y) * self.uy)

    def line(self, x0, y0, x1, y1, stroke="#000", width=1.5, dash: Optional[str] = None, extra: str = ""):
        d = f' stroke-dasharray="{dash}"' if dash else ""
        self.items.append(
            f'<line x1="{self.X(x0)}" y1="{self.Y(y0)}" x2="{self.X(x1)}" y2="{self.Y(y1)}" '
            f'stroke="{stroke}" stroke-width="{fmt(width)}"{d}{extra}/>'
        )

    def rect(self, x0, y0, x1, y1, fill="#eeeeee", stroke="none"):
        self.items.append(
            f'<rect x="{self.X(x0)}" y="{self.Y(y1)}" width="{fmt((x1 - x0) * self.ux)}" '
            f'height="{fmt((y1 - y0) * self.uy)}" fill="{fill}" stroke="{stroke}"/>'
        )

    def circle(self, x, y, r=3.0, fill="#000"):
        self.items.append(f'<circle cx="{self.X(x)}" cy="{self.Y(y)}" r="{fmt(r)}" fill="{fill}"/>')

    def text(self, x, y, s: str, size=12, anchor="middle", dx=0.0, dy=0.0, fill="#000"):
        self.items.append(
            f'<text x="{fmt(float(self.X(x)) + dx)}" y="{fmt(float(self.Y(y)) + dy)}" font-size="{fmt(size)}" '
            f'font-family="serif" text-anchor="{anchor}" fill="{fill}">{escape(s)}</text>'
        )

    def polyline(self, xs, ys, stroke="#000", width=1.5, clip: Optional[str] = None):
        pts = " ".join(f"{self.X(x)},{self.Y(y)}" for x, y in zip(xs, ys))
        c = f' clip-path="url(#{clip})"' if clip else ""
        self.items.append(f'<polyline points="{pts}" fill="none" stroke="{stroke}" stroke-width="{fmt(width)}"{c}/>')

    def clip_rect(self, name: str, x0, y0, x1, y1):
        self.defs.append(
            f'<clipPath id="{name}"><rect x="{self.X(x0)}" y="{self.Y(y1)}" '
            f'width="{fmt((x1 - x0) * self.ux)}" height="{fmt((y1 - y0) * self.uy)}"/></clipPath>'
        )

    def brace(self, x, y0, y1, label: str, side: int = -1):
        """Vertical bracket from ``y0`` to ``y1`` at ``x`` with a label on ``side``."""
        tick = 6.0 / self.ux
        self.line(x, y0, x, y1, width=1.0)
        self.line(x, y0, x - side * tick, y0, width=1.0)
        self.line(x, y1, x - side * tick, y1, width=1.0)
        self.text(x, 0.5 * (y0 + y1), label, size=11, anchor="end" if side < 0 else "start", dx=4.0 * side, dy=4.0)

    def hbrace(self, x0, x1, y, label: str, below: bool = True):
        tick = 6.0 / self.uy
        s = 1.0 if below else -1.0
        self.line(x0, y, x1, y, width=1.0)
        self.line(x0, y, x0, y + s * tick, width=1.0)
        self.line(x1, y, x1, y + s * tick, width=1.0)
        self.text(0.5 * (x0 + x1), y, label, size=11, dy=14.0 if below else -6.0)

    def svg(self) -> str:
        head = (
            '<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{fmt(self.width)}" '
            f'height="{fmt(self.height)}" viewBox="0 0 {fmt(self.width)} {fmt(self.height)}">\n'
        )
        body = []
        if self.title:
            body.append(f"<title>{escape(self.title)}</title>")
        if self.defs:
            body.append("<defs>" + "".join(self.defs) + "</defs>")
        body.extend(self.items)
        return head + "\n".join(body) + "\n</svg>\n"


def _comb_label(comb: Comb) -> str:
    q = ",".join(str(v) for v in comb.q)
    h = ",".join(fmt(v) for v in comb.h)
    return f"Pi_{comb.r}({q}; {h})"


def _pi_label(m: int) -> str:
    return "pi" if m == 1 else f"{m}pi"


def render_comb(comb: Comb) -> str:
    """Half-strip ``0 < Im < r*pi``, ``Re > 0``, with slits at heights ``q_j*pi``."""
    top = comb.r * math.pi
    width = max(comb.h, default=0.0) * 1.35 + 1.5
    left = -0.8 - 0.45 * (comb.genus + 1)
    cv = Canvas(left - 0.4, width + 0.4, -0.9, top + 0.5, title=_comb_label(comb))
    cv.rect(0.0, 0.0, width, top)
    cv.line(0.0, 0.0, 0.0, top)
    cv.line(0.0, 0.0, width, 0.0)
    cv.line(0.0, top, width, top)
    cv.line(width, 0.0, width + 0.35, 0.0, dash="3,3")
    cv.line(width, top, width + 0.35, top, dash="3,3")
    cv.brace(left, 0.0, top, _pi_label(comb.r))
    for j, (q, h) in enumerate(zip(comb.q, comb.h)):
        y = q * math.pi
        color = PALETTE[j % len(PALETTE)]
        cv.line(0.0, y, h, y, stroke=color, width=2.5)
        cv.circle(h, y, fill=color)
        cv.brace(-0.35 - 0.45 * j, 0.0, y, _pi_label(q))
        cv.text(0.5 * h, y, f"h{j + 1}={fmt(h)}", size=11, dy=-6.0, fill=color)
    cv.text(0.5 * width, -0.9, _comb_label(comb), size=13, dy=-6.0)
    return cv.svg()


def render_flat_surface(comb: Comb, quotient: bool = False) -> str:
    """Flat picture of the canonical differential scaled by ``r/pi``.

    An infinite horizontal cylinder of height ``2r`` (top and bottom edges glued)
    with a marked point at the origin and, for each ``i``, slits ``c_i+`` and
    ``c_i-`` of half-length ``h_i`` centred at heights ``+q_i`` and ``-q_i``.
    Partner slits share a color; the lower lip of ``c_i+`` is glued to the upper
    lip of ``c_i-`` and vice versa.  ``quotient`` draws the lower half, the
    picture modulo the rotation by ``pi`` about the origin.
    """
    r = comb.r
    half = max(comb.h, default=0.0) + 1.0
    ytop = 0.0 if quotient else float(r)
    cv = Canvas(-half - 0.8, half + 0.8, -r - 0.8, ytop + 0.6, title=("quotient of " if quotient else "") + _comb_label(comb))
    cv.rect(-half, -r, half, ytop)
    for x0, x1 in ((-half - 0.5, -half), (half, half + 0.5)):
        cv.line(x0, -r, x1, -r, dash="3,3")
        cv.line(x0, ytop, x1, ytop, dash="3,3")
    if quotient:
        # halves of each boundary edge are exchanged by the rotation
        cv.line(-half, -r, half, -r, width=1.5)
        cv.line(-half, 0.0, half, 0.0, width=1.5)
        cv.text(-0.5 * half, -r, "1", dy=16.0)
        cv.text(0.5 * half, -r, "1", dy=16.0)
        cv.text(-0.5 * half, 0.0, "2", dy=-6.0)
        cv.text(0.5 * half, 0.0, "2", dy=-6.0)
    else:
        cv.line(-half, -r, half, -r, width=1.5, dash="8,4")
        cv.line(-half, r, half, r, width=1.5, dash="8,4")
        cv.text(0.0, r, "glued", size=10, dy=-6.0)
        cv.text(0.0, -r, "glued", size=10, dy=16.0)
    cv.circle(0.0, 0.0, r=3.5)
    cv.text(0.0, 0.0, "a0", size=11, dx=10.0, dy=-6.0)
    for i, (q, h) in enumerate(zip(comb.q, comb.h)):
        color = PALETTE[i % len(PALETTE)]
        signs = (-1,) if quotient else (1, -1)
        for s in signs:
            y = s * q
            cv.line(-h, y, h, y, stroke=color, width=2.5)
            cv.circle(-h, y, r=2.5, fill=color)
            cv.circle(h, y, r=2.5, fill=color)
            cv.text(h, y, f"c{i + 1}{'+' if s > 0 else '-'}", size=11, anchor="start", dx=6.0, dy=4.0, fill=color)
    cv.brace(half + 0.35, -r, ytop, fmt(ytop + r), side=1)
    if comb.genus:
        i = 0
        cv.hbrace(-comb.h[i], comb.h[i], -comb.q[i], f"2h1={fmt(2 * comb.h[i])}")
    return cv.svg()


def _pad(lo: float, hi: float, frac: float = 0.08) -> tuple[float, float]:
    d = (hi - lo) * frac
    return lo - d, hi + d


def render_solution(curve: CurveConfig, sol: PellSolution, n_samples: int = 801) -> str:
    """Graph of ``P`` with the bands shaded, dashed guides at ``+-sqrt(c)``,
    band endpoints ticked, zeros of ``P`` and the gap critical points marked."""
    lo, hi = _pad(curve.endpoints[0], curve.endpoints[-1])
    s = math.sqrt(sol.c)
    ymax = 2.2 * s
    span = hi - lo
    cv = Canvas(lo, hi, -ymax, ymax, unit_x=600.0 / span, unit_y=150.0 / ymax, title=f"P of degree {sol.degree}")
    for a, b in curve.bands:
        cv.rect(a, -s, b, s, fill="#e8eef8")
    cv.line(lo, 0.0, hi, 0.0, stroke="#888", width=1.0)
    cv.line(lo, s, hi, s, stroke="#555", width=1.0, dash="6,4")
    cv.line(lo, -s, hi, -s, stroke="#555", width=1.0, dash="6,4")
    cv.text(lo, s, "+sqrt(c)", size=10, anchor="start", dx=2.0, dy=-4.0)
    cv.text(lo, -s, "-sqrt(c)", size=10, anchor="start", dx=2.0, dy=12.0)
    tick = 5.0 / cv.uy
    for k, e in enumerate(curve.endpoints):
        cv.line(e, -tick, e, tick, width=1.5)
        name = ("a" if k % 2 == 0 else "b") + str(k // 2)
        cv.text(e, 0.0, name, size=10, dy=16.0 if k % 2 == 0 else 28.0)
    cv.clip_rect("plot", lo, -ymax, hi, ymax)
    xs = np.linspace(lo, hi, n_samples)
    ys = np.clip(sol.P(xs), -10 * ymax, 10 * ymax)
    cv.polyline(xs, ys, stroke="#1f3f8f", width=1.8, clip="plot")
    for a, b in curve.bands:
        for x in roots_in_interval(sol.P, a, b):
            cv.circle(x, 0.0, r=2.5, fill="#d62728")
    dP = sol.P.deriv()
    for k, (a, b) in enumerate(curve.gaps, start=1):
        for x in roots_in_interval(dP, a, b):
            if a < x < b:
                y = float(np.clip(sol.P(x), -ymax, ymax))
                cv.circle(x, y, r=3.0, fill="#2ca02c")
                cv.text(x, y, f"c{k}", size=10, dy=-6.0 if y >= 0 else 14.0)
    return cv.svg()
