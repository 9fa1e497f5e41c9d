"""SVG figures of grid sets and the objects drawn on them.

Coordinates are window coordinates with the imaginary axis flipped so that
Im z grows upward on screen. Each element carries a ``data-ref`` attribute
naming the report field it depicts.
"""

from __future__ import annotations

import math
from typing import Iterable, Optional, Sequence
from xml.sax.saxutils import quoteattr

import numpy as np

from .geometry import GridSet
from .topology import ArcSet, PolyPath, RegionLabeling

SET_COLOR = "#303a4a"
HOLE_PALETTE = ("#f4a261", "#2a9d8f", "#e76f51", "#8ab17d", "#e9c46a", "#6d597a",
                "#b56576", "#457b9d")
CURVE_COLOR = "#d62828"
ARC_COLOR = "#1d3557"
CIRCLE_COLOR = "#6c757d"


def _f(x: float) -> str:
    return f"{x:.6g}"


def _runs(mask: np.ndarray):
    """Yield (row, start, stop) for maximal horizontal runs of True cells."""
    for i in range(mask.shape[0]):
        row = mask[i]
        if not row.any():
            continue
        d = np.diff(np.concatenate(([0], row.astype(np.int8), [0])))
        starts = np.flatnonzero(d == 1)
        stops = np.flatnonzero(d == -1)
        for a, b in zip(starts, stops):
            yield i, int(a), int(b)


class SvgCanvas:
    def __init__(self, window, pixels: int = 640):
        self.w = window
        span = max(window.xmax - window.xmin, window.ymax - window.ymin)
        self.scale = pixels / span
        self.parts: list[str] = []

    def xy(self, z: complex) -> tuple[float, float]:
        return ((z.real - self.w.xmin) * self.scale, (self.w.ymax - z.imag) * self.scale)

    def cells(self, mask: np.ndarray, color: str, ref: str):
        w, s = self.w, self.scale
        rects = []
        for i, a, b in _runs(mask):
            x = a * w.h * s
            # row i spans [ymin + i h, ymin + (i+1) h]; its top edge on screen is the larger y
            y = (w.ymax - (w.ymin + (i + 1) * w.h)) * s
            rects.append(f'<rect x="{_f(x)}" y="{_f(y)}" width="{_f((b - a) * w.h * s)}" '
                         f'height="{_f(w.h * s)}"/>')
        if rects:
            self.parts.append(f'<g fill="{color}" data-ref={quoteattr(ref)} '
                              f'shape-rendering="crispEdges">' + "".join(rects) + "</g>")

    def point(self, z: complex, ref: str, color: str = "#000000", r: float = 3.0):
        x, y = self.xy(z)
        self.parts.append(f'<circle cx="{_f(x)}" cy="{_f(y)}" r="{_f(r)}" fill="{color}" '
                          f'data-ref={quoteattr(ref)}/>')

    def polyline(self, pts: Sequence[complex], ref: str, color: str, closed: bool,
                 width: float = 1.5):
        coords = " ".join(f"{_f(x)},{_f(y)}" for x, y in (self.xy(z) for z in pts))
        tag = "polygon" if closed else "polyline"
        self.parts.append(f'<{tag} points="{coords}" fill="none" stroke="{color}" '
                          f'stroke-width="{_f(width)}" data-ref={quoteattr(ref)}/>')

    def circle(self, radius: float, ref: str):
        x, y = self.xy(0j)
        self.parts.append(f'<circle cx="{_f(x)}" cy="{_f(y)}" r="{_f(radius * self.scale)}" '
                          f'fill="none" stroke="{CIRCLE_COLOR}" stroke-dasharray="4 3" '
                          f'data-ref={quoteattr(ref)}/>')

    def text(self) -> str:
        width = (self.w.xmax - self.w.xmin) * self.scale
        height = (self.w.ymax - self.w.ymin) * self.scale
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{_f(width)}" '
                f'height="{_f(height)}" viewBox="0 0 {_f(width)} {_f(height)}">')
        return "\n".join([head, *self.parts, "</svg>"]) + "\n"


def render(s: GridSet, labeling: Optional[RegionLabeling] = None,
           holes: Optional[Sequence] = None, holes_ref: str = "holes",
           regions: Iterable[tuple[str, np.ndarray]] = (),
           curves: Iterable[tuple[str, PolyPath]] = (), arcs: Optional[ArcSet] = None,
           arcs_ref: str = "arcs", points: Iterable[tuple[str, complex]] = (),
           pixels: int = 640) -> str:
    """Draw ``s`` with tinted holes, extra regions, curves, circle arcs and points.

    ``holes`` lists hole regions of ``labeling`` in the order the report
    lists them (default: label order); ``regions``, ``curves`` and ``points``
    are (data-ref, object) pairs.
    """
    c = SvgCanvas(s.window, pixels)
    if labeling is not None:
        if holes is None:
            holes = labeling.holes
        for k, r in enumerate(holes):
            c.cells(labeling.labels == r.label, HOLE_PALETTE[k % len(HOLE_PALETTE)],
                    f"{holes_ref}[{k}]")
    for k, (ref, mask) in enumerate(regions):
        c.cells(mask, HOLE_PALETTE[(k + 3) % len(HOLE_PALETTE)], ref)
    c.cells(s.mask, SET_COLOR, "scene")
    if arcs is not None:
        c.circle(arcs.n0, f"{arcs_ref}.n0")
        for k, a in enumerate(arcs.arcs):
            t = np.linspace(a.theta_start, a.theta_end,
                            max(2, math.ceil((a.theta_end - a.theta_start) * 64)))
            c.polyline(arcs.n0 * np.exp(1j * t), f"{arcs_ref}.arcs[{k}]", ARC_COLOR,
                       closed=False, width=3.0)
    for ref, path in curves:
        c.polyline(path.points, ref, CURVE_COLOR, closed=path.closed)
    if labeling is not None:
        for k, r in enumerate(holes):
            c.point(r.representative, f"{holes_ref}[{k}].representative")
    for ref, z in points:
        c.point(z, ref, CURVE_COLOR)
    return c.text()
