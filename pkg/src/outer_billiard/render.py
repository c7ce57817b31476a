"""Deterministic SVG drawings of tables, orbits, singular lines and period cells."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple
from xml.sax.saxutils import escape

from .geometry import Table

__all__ = ["Style", "render_svg"]


@dataclass(frozen=True)
class Style:
    width: int = 640
    height: int = 640
    margin: int = 24
    table_fill: str = "#dddddd"
    table_stroke: str = "#222222"
    orbit_stroke: str = "#1f5fbf"
    tangency_fill: str = "#d0302f"
    singular_stroke: str = "#999999"
    cell_fill: str = "#f2b134"
    cell_opacity: float = 0.6
    digits: int = 4


def _num(v: float, digits: int) -> str:
    s = f"{v:.{digits}f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


class _Frame:
    def __init__(self, bounds, style: Style):
        xmin, ymin, xmax, ymax = bounds
        w = max(xmax - xmin, 1e-9)
        h = max(ymax - ymin, 1e-9)
        self.k = min((style.width - 2 * style.margin) / w, (style.height - 2 * style.margin) / h)
        self.xmin, self.ymax = xmin, ymax
        self.style = style
        # center the drawing along the axis with spare room
        self.ox = style.margin + ((style.width - 2 * style.margin) - w * self.k) / 2
        self.oy = style.margin + ((style.height - 2 * style.margin) - h * self.k) / 2

    def xy(self, p) -> str:
        x = self.ox + (float(p[0]) - self.xmin) * self.k
        y = self.oy + (self.ymax - float(p[1])) * self.k
        d = self.style.digits
        return f"{_num(x, d)},{_num(y, d)}"


def _table_outline(table: Table, samples: int = 180) -> List[Tuple[float, float]]:
    if table.kind == "polygon":
        return [(float(x), float(y)) for x, y in table.vertices]
    (cx, cy), (a, b) = table.center, table.semi_axes
    return [
        (cx + a * math.cos(2 * math.pi * k / samples), cy + b * math.sin(2 * math.pi * k / samples))
        for k in range(samples)
    ]


def _bounds(pts: Sequence) -> Tuple[float, float, float, float]:
    xs = [float(p[0]) for p in pts]
    ys = [float(p[1]) for p in pts]
    return min(xs), min(ys), max(xs), max(ys)


def render_svg(
    table: Table,
    orbit: Optional[Sequence] = None,
    tangencies: Optional[Sequence] = None,
    segments: Optional[Sequence] = None,
    cells: Optional[Sequence[Sequence]] = None,
    bounds: Optional[Sequence[float]] = None,
    style: Style = Style(),
    title: str = "",
) -> str:
    """Layered SVG: period cells, singular segments, table, orbit, tangency markers, legend.

    ``segments`` is a list of ((x0, y0), (x1, y1)); ``cells`` a list of
    polygons.  Output depends only on the inputs.
    """
    outline = _table_outline(table)
    every = list(outline)
    for poly in cells or []:
        every += list(poly)
    every += list(orbit or [])
    if bounds is None:
        bounds = _bounds(every)
        pad = 0.05 * max(bounds[2] - bounds[0], bounds[3] - bounds[1], 1e-9)
        bounds = (bounds[0] - pad, bounds[1] - pad, bounds[2] + pad, bounds[3] + pad)
    fr = _Frame(bounds, style)
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{style.width}" height="{style.height}" '
        f'viewBox="0 0 {style.width} {style.height}">',
    ]
    if title:
        out.append(f"<title>{escape(title)}</title>")
    out.append('<rect width="100%" height="100%" fill="#ffffff"/>')
    legend = []
    if cells:
        out.append(f'<g id="cells" fill="{style.cell_fill}" fill-opacity="{style.cell_opacity}" stroke="none">')
        for poly in cells:
            out.append(f'<polygon points="{" ".join(fr.xy(p) for p in poly)}"/>')
        out.append("</g>")
        legend.append(("period-4 cells", style.cell_fill))
    if segments:
        out.append(f'<g id="singular" stroke="{style.singular_stroke}" stroke-width="0.75">')
        for a, b in segments:
            (x0, y0), (x1, y1) = fr.xy(a).split(","), fr.xy(b).split(",")
            out.append(f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y1}"/>')
        out.append("</g>")
        legend.append(("singular lines", style.singular_stroke))
    out.append(
        f'<polygon id="table" points="{" ".join(fr.xy(p) for p in outline)}" '
        f'fill="{style.table_fill}" stroke="{style.table_stroke}" stroke-width="1.5"/>'
    )
    legend.append(("table", style.table_stroke))
    if orbit:
        out.append(
            f'<polyline id="orbit" points="{" ".join(fr.xy(p) for p in orbit)}" '
            f'fill="none" stroke="{style.orbit_stroke}" stroke-width="1.25"/>'
        )
        legend.append(("orbit", style.orbit_stroke))
    if tangencies:
        out.append(f'<g id="tangencies" fill="{style.tangency_fill}">')
        for p in tangencies:
            x, y = fr.xy(p).split(",")
            out.append(f'<circle cx="{x}" cy="{y}" r="3"/>')
        out.append("</g>")
        legend.append(("tangency points", style.tangency_fill))
    out.append('<g id="legend" font-family="sans-serif" font-size="12">')
    for k, (label, color) in enumerate(legend):
        y = 16 + 16 * k
        out.append(f'<rect x="8" y="{y - 9}" width="10" height="10" fill="{color}"/>')
        out.append(f'<text x="24" y="{y}">{escape(label)}</text>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
