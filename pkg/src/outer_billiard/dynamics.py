"""The outer billiard map, orbits, area checks and the singular-line arrangement."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .geometry import (
    InteriorPointError,
    Point,
    SingularPointError,
    Table,
    TangencyResult,
    tangency,
)

__all__ = [
    "OrbitSample",
    "Segment",
    "SingularArrangement",
    "StraddleError",
    "step",
    "orbit",
    "area_jacobian_check",
    "singular_lines",
    "tangency_cell",
    "orbit_csv",
    "read_orbit_csv",
]


class StraddleError(ValueError):
    """A finite-difference stencil crosses a singular line."""


def step(table: Table, z: Point) -> Point:
    """One application of the map: z -> 2*tau - z."""
    t = tangency(table, z)
    if t.singular:
        raise SingularPointError(f"point {z} lies on a singular line")
    z = table.point(z) if table.kind == "polygon" else (float(z[0]), float(z[1]))
    return (2 * t.tau[0] - z[0], 2 * t.tau[1] - z[1])


@dataclass
class OrbitSample:
    points: List[Point]
    tangencies: List[TangencyResult]
    termination: str  # "completed" | "singular" | "interior"
    stop_step: Optional[int] = None

    @property
    def itinerary(self) -> Tuple[int, ...]:
        return tuple(t.index for t in self.tangencies[: len(self.points) - 1])


def orbit(table: Table, z: Point, n: int) -> OrbitSample:
    """Iterate up to ``n`` steps, stopping at singular or interior points.

    ``tangencies[k]`` is the tangency used for the step from ``points[k]``;
    when the final point has a regular tangency it is appended as well.
    """
    if n < 0:
        raise ValueError("step count must be nonnegative")
    z = table.point(z) if table.kind == "polygon" else (float(z[0]), float(z[1]))
    points, tans = [z], []
    for k in range(n + 1):
        try:
            t = tangency(table, z)
        except InteriorPointError:
            return OrbitSample(points, tans, "interior", k)
        if t.singular:
            if k == n:
                break
            return OrbitSample(points, tans, "singular", k)
        tans.append(t)
        if k == n:
            break
        z = (2 * t.tau[0] - z[0], 2 * t.tau[1] - z[1])
        if table.contains(z):  # pragma: no cover - reflection cannot enter a convex table
            raise AssertionError(f"orbit entered the table at step {k + 1}")
        points.append(z)
    return OrbitSample(points, tans, "completed", None)


def area_jacobian_check(table: Table, z: Point, h: float = 1e-4) -> Fraction | float:
    """|det J - 1| for the central-difference Jacobian of the map at ``z``.

    The stencil half-width is ``h * (|z| + diameter)``.  For polygons every
    stencil point must share the tangency vertex of ``z``.
    """
    scale = math.hypot(float(z[0]), float(z[1])) + table.diameter()
    if table.kind == "polygon":
        hh = Fraction(h) * Fraction(scale)
        z = table.point(z)
    else:
        hh = h * scale
        z = (float(z[0]), float(z[1]))
    stencil = [
        (z[0] + hh, z[1]),
        (z[0] - hh, z[1]),
        (z[0], z[1] + hh),
        (z[0], z[1] - hh),
    ]
    if table.kind == "polygon":
        base = tangency(table, z)
        if base.singular:
            raise SingularPointError(f"point {z} lies on a singular line")
        for p in stencil:
            t = tangency(table, p)
            if t.singular or t.index != base.index:
                raise StraddleError(f"stencil around {z} with half-width {float(hh):.3g} crosses a singular line")
    try:
        images = [step(table, p) for p in stencil]
    except (SingularPointError, InteriorPointError) as exc:
        raise StraddleError(f"stencil around {z} leaves the regular domain: {exc}") from exc
    j11 = (images[0][0] - images[1][0]) / (2 * hh)
    j21 = (images[0][1] - images[1][1]) / (2 * hh)
    j12 = (images[2][0] - images[3][0]) / (2 * hh)
    j22 = (images[2][1] - images[3][1]) / (2 * hh)
    return abs(j11 * j22 - j12 * j21 - 1)


# ---------------------------------------------------------------------------
# singular arrangement


@dataclass(frozen=True)
class Segment:
    a: Point
    b: Point
    generation: int


@dataclass
class SingularArrangement:
    depth: int
    segments: List[Segment] = field(default_factory=list)

    def generation(self, g: int) -> List[Segment]:
        return [s for s in self.segments if s.generation == g]


def tangency_cell(table: Table, j: int) -> List[Tuple[object, object, object]]:
    """Halfplanes ``a*x + b*y + c > 0`` of points whose tangency vertex is ``j``."""
    verts = table.vertices
    v = verts[j]
    out = []
    for k, w in enumerate(verts):
        if k == j:
            continue
        # cross(v - z, w - z) = cross(v, w) + cross(z, v - w)
        dx, dy = v[0] - w[0], v[1] - w[1]
        out.append((dy, -dx, v[0] * w[1] - v[1] * w[0]))
    return out


def _clip_segment(p, q, halfplanes):
    """Clip segment pq to closed halfplanes; None if nothing of positive length remains."""
    t0, t1 = 0, 1
    dx, dy = q[0] - p[0], q[1] - p[1]
    for a, b, c in halfplanes:
        fp = a * p[0] + b * p[1] + c
        df = a * dx + b * dy
        if df == 0:
            if fp < 0:
                return None
            continue
        t = -fp / df
        if df > 0:
            t0 = max(t0, t)
        else:
            t1 = min(t1, t)
        if t0 >= t1:
            return None
    return (p[0] + t0 * dx, p[1] + t0 * dy), (p[0] + t1 * dx, p[1] + t1 * dy)


def _box_halfplanes(region):
    xmin, ymin, xmax, ymax = region
    return [(1, 0, -xmin), (-1, 0, xmax), (0, 1, -ymin), (0, -1, ymax)]


def singular_lines(table: Table, depth: int, region: Sequence) -> SingularArrangement:
    """Singular set of the map and its preimages up to ``depth``, clipped to a box.

    Generation 0: for every edge v_i -> v_{i+1}, the ray from v_i away from
    v_{i+1}; on it both endpoints of the edge are tangency candidates.
    Generation k+1: preimages of generation k.  On the tangency cell of v_j
    the map is the point reflection about v_j, so the preimage of a segment
    is its reflection about v_j clipped to that cell.
    """
    if table.kind != "polygon":
        raise TypeError("singular_lines needs a polygon table")
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    conv = table.scalar
    region = tuple(conv(v) for v in region)
    arr = SingularArrangement(depth)
    if region[0] >= region[2] or region[1] >= region[3]:
        return arr
    box = _box_halfplanes(region)
    verts = table.vertices
    n = table.n
    # far enough to leave the box from any vertex
    reach = conv(1) + sum(abs(c) for c in region) + sum(abs(c) for v in verts for c in v)
    current = []
    for i in range(n):
        v, w = verts[i], verts[(i + 1) % n]
        dx, dy = v[0] - w[0], v[1] - w[1]
        norm = abs(dx) + abs(dy)
        far = (v[0] + dx * reach / norm, v[1] + dy * reach / norm)
        seg = _clip_segment(v, far, box)
        if seg:
            current.append(Segment(seg[0], seg[1], 0))
    arr.segments.extend(current)
    cells = [tangency_cell(table, j) for j in range(n)]
    for g in range(1, depth + 1):
        nxt, seen = [], set()
        for s in current:
            for j, v in enumerate(verts):
                a = (2 * v[0] - s.a[0], 2 * v[1] - s.a[1])
                b = (2 * v[0] - s.b[0], 2 * v[1] - s.b[1])
                clipped = _clip_segment(a, b, cells[j] + box)
                if clipped is None:
                    continue
                key = frozenset(clipped)
                if key in seen:
                    continue
                seen.add(key)
                nxt.append(Segment(clipped[0], clipped[1], g))
        arr.segments.extend(nxt)
        current = nxt
    return arr


# ---------------------------------------------------------------------------
# CSV


def _fmt(v) -> str:
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    return repr(float(v))


def orbit_csv(sample: OrbitSample) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k", "x", "y", "tx", "ty"])
    for k, p in enumerate(sample.points):
        if k < len(sample.tangencies):
            t = sample.tangencies[k].tau
            w.writerow([k, _fmt(p[0]), _fmt(p[1]), _fmt(t[0]), _fmt(t[1])])
        else:
            w.writerow([k, _fmt(p[0]), _fmt(p[1]), "", ""])
    return buf.getvalue()


def read_orbit_csv(text: str) -> List[Tuple[Point, Optional[Point]]]:
    """Rows of (point, tangency-or-None) as floats."""
    rows = []
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames != ["k", "x", "y", "tx", "ty"]:
        raise ValueError(f"unexpected orbit CSV header {reader.fieldnames}")
    for r in reader:
        p = (float(Fraction(r["x"])), float(Fraction(r["y"])))
        t = (float(Fraction(r["tx"])), float(Fraction(r["ty"]))) if r["tx"] else None
        rows.append((p, t))
    return rows
