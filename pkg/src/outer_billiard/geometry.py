"""Convex tables: loading, validation, tangency queries, parallelogram corners.

Points are plain ``(x, y)`` tuples.  A table runs in one scalar mode: exact
(``Fraction`` coordinates) or float.  The tangency convention is fixed: the
table lies strictly to the *left* of the directed line from the query point
through the tangency point.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import List, Optional, Sequence, Tuple

from scipy.optimize import brentq

Point = Tuple[object, object]

__all__ = [
    "Point",
    "Table",
    "TangencyResult",
    "TableError",
    "InteriorPointError",
    "SingularPointError",
    "TangencySolveError",
    "load_table",
    "polygon",
    "ellipse",
    "tangency",
    "ellipse_tangency",
    "parallelogram_corners",
    "cross",
    "is_strictly_outside",
]


class TableError(ValueError):
    """Malformed or invalid table description."""

    def __init__(self, message: str, vertex: Optional[int] = None):
        super().__init__(message)
        self.vertex = vertex


class InteriorPointError(ValueError):
    """Query point is inside the table or on its boundary."""


class SingularPointError(ValueError):
    """The supporting line through the point touches the table at two vertices."""

    def __init__(self, message: str, step: Optional[int] = None):
        super().__init__(message)
        self.step = step


class TangencySolveError(RuntimeError):
    pass


def cross(ax, ay, bx, by):
    return ax * by - ay * bx


def _cross3(o: Point, a: Point, b: Point):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


@dataclass(frozen=True)
class Table:
    kind: str  # "polygon" | "ellipse"
    vertices: Tuple[Point, ...] = ()
    center: Point = (0.0, 0.0)
    semi_axes: Tuple[float, float] = (1.0, 1.0)
    exact: bool = False
    reoriented: bool = False

    @property
    def n(self) -> int:
        return len(self.vertices)

    def scalar(self, v):
        """Coerce a coordinate into this table's scalar mode."""
        return Fraction(v) if self.exact else float(v)

    def point(self, p: Sequence) -> Point:
        return (self.scalar(p[0]), self.scalar(p[1]))

    def bbox(self) -> Tuple[object, object, object, object]:
        if self.kind == "polygon":
            xs = [v[0] for v in self.vertices]
            ys = [v[1] for v in self.vertices]
            return min(xs), min(ys), max(xs), max(ys)
        (cx, cy), (a, b) = self.center, self.semi_axes
        return cx - a, cy - b, cx + a, cy + b

    def diameter(self) -> float:
        if self.kind == "polygon":
            return max(
                math.hypot(float(p[0] - q[0]), float(p[1] - q[1]))
                for p, q in combinations(self.vertices, 2)
            )
        return 2.0 * max(self.semi_axes)

    def contains(self, z: Point) -> bool:
        """Closed containment (boundary counts as inside)."""
        if self.kind == "polygon":
            n = self.n
            return all(
                _cross3(self.vertices[i], self.vertices[(i + 1) % n], z) >= 0 for i in range(n)
            )
        (cx, cy), (a, b) = self.center, self.semi_axes
        return ((float(z[0]) - cx) / a) ** 2 + ((float(z[1]) - cy) / b) ** 2 <= 1.0

    def to_json(self) -> dict:
        def enc(v):
            return f"{v.numerator}/{v.denominator}" if isinstance(v, Fraction) else v

        if self.kind == "polygon":
            return {"type": "polygon", "vertices": [[enc(x), enc(y)] for x, y in self.vertices]}
        return {"type": "ellipse", "center": list(self.center), "semi_axes": list(self.semi_axes)}


@dataclass(frozen=True)
class TangencyResult:
    tau: Point
    kind: str  # "vertex" | "smooth"
    index: Optional[int] = None  # vertex index for polygons
    parameter: Optional[float] = None  # angle parameter for ellipses
    singular: bool = False


# ---------------------------------------------------------------------------
# construction


def polygon(vertices: Sequence[Sequence], exact: bool = True, reorient: bool = False) -> Table:
    """Validated polygon table; ``reorient`` flips clockwise input instead of rejecting it."""
    conv = Fraction if exact else float
    verts = [(conv(x), conv(y)) for x, y in vertices]
    n = len(verts)
    if n < 3:
        raise TableError("polygon needs at least 3 vertices")
    if len(set(verts)) != n:
        dup = next(i for i, v in enumerate(verts) if verts.index(v) != i)
        raise TableError(f"repeated vertex at index {dup}", dup)
    for v in verts:
        if not exact and not all(math.isfinite(c) for c in v):
            raise TableError("non-finite coordinate")
    turns = [_cross3(verts[i - 1], verts[i], verts[(i + 1) % n]) for i in range(n)]
    area2 = sum(cross(*verts[i], *verts[(i + 1) % n]) for i in range(n))
    sign = 1 if area2 > 0 else -1
    reoriented = False
    for i, t in enumerate(turns):
        if t * sign <= 0:
            raise TableError(f"polygon is not strictly convex at vertex {i}", i)
    if sign < 0:
        if not reorient:
            raise TableError("polygon is clockwise; counterclockwise order required")
        verts = [verts[0]] + verts[:0:-1]
        reoriented = True
    # a strictly convex turn sequence can still wind more than once
    if abs(_total_turning(verts) - 2 * math.pi) > 1e-6:
        raise TableError("polygon winds more than once (self-intersecting)")
    return Table("polygon", tuple(verts), exact=exact, reoriented=reoriented)


def ellipse(center: Sequence = (0.0, 0.0), semi_axes: Sequence = (1.0, 1.0)) -> Table:
    a, b = float(semi_axes[0]), float(semi_axes[1])
    if not (a > 0 and b > 0 and math.isfinite(a) and math.isfinite(b)):
        raise TableError(f"degenerate ellipse semi-axes ({a}, {b})")
    return Table("ellipse", center=(float(center[0]), float(center[1])), semi_axes=(a, b))


def _total_turning(verts) -> float:
    n = len(verts)
    total = 0.0
    for i in range(n):
        ex, ey = verts[i][0] - verts[i - 1][0], verts[i][1] - verts[i - 1][1]
        fx, fy = verts[(i + 1) % n][0] - verts[i][0], verts[(i + 1) % n][1] - verts[i][1]
        total += math.atan2(float(cross(ex, ey, fx, fy)), float(ex * fx + ey * fy))
    return total


def _coord_kind(values) -> str:
    kinds = set()
    for v in values:
        if isinstance(v, bool):
            raise TableError(f"invalid coordinate {v!r}")
        if isinstance(v, str):
            kinds.add("str")
        elif isinstance(v, (int, float)):
            kinds.add("num")
        else:
            raise TableError(f"invalid coordinate {v!r}")
    if len(kinds) > 1:
        raise TableError("table mixes p/q strings and plain numbers")
    return kinds.pop() if kinds else "num"


def _parse_coord(v):
    if isinstance(v, str):
        try:
            return Fraction(v.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise TableError(f"bad rational coordinate {v!r}") from exc
    if isinstance(v, float) and not math.isfinite(v):
        raise TableError("non-finite coordinate")
    # decimal literals are exact rationals in exact mode
    return Fraction(repr(v)) if isinstance(v, float) else Fraction(v)


def load_table(text: str, mode: Optional[str] = None, reorient: bool = False) -> Table:
    """Parse a JSON table description.

    ``mode`` is ``"exact"``, ``"float"`` or ``None``.  With ``None`` polygons
    load in exact mode and ellipses in float mode.
    """
    try:
        spec = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TableError(f"table JSON parse error: {exc}") from exc
    if not isinstance(spec, dict) or "type" not in spec:
        raise TableError("table must be a JSON object with a 'type' field")
    if mode not in (None, "exact", "float"):
        raise TableError(f"unknown mode {mode!r}")
    kind = spec["type"]
    if kind == "polygon":
        verts = spec.get("vertices")
        if not isinstance(verts, list) or not all(isinstance(v, list) and len(v) == 2 for v in verts):
            raise TableError("'vertices' must be a list of [x, y] pairs")
        _coord_kind([c for v in verts for c in v])
        exact = mode != "float"
        parsed = [(_parse_coord(x), _parse_coord(y)) for x, y in verts]
        if not exact:
            parsed = [(float(x), float(y)) for x, y in parsed]
        return polygon(parsed, exact=exact, reorient=reorient)
    if kind == "ellipse":
        if mode == "exact":
            raise TableError("ellipse tables support float mode only")
        c, ax = spec.get("center", [0, 0]), spec.get("semi_axes")
        if not (isinstance(c, list) and len(c) == 2 and isinstance(ax, list) and len(ax) == 2):
            raise TableError("ellipse needs 'center' [x, y] and 'semi_axes' [a, b]")
        _coord_kind(list(c) + list(ax))
        return ellipse([float(_parse_coord(v)) for v in c], [float(_parse_coord(v)) for v in ax])
    raise TableError(f"unknown table type {kind!r}")


# ---------------------------------------------------------------------------
# tangency


def _singular_tol(table: Table, z: Point) -> float:
    if table.exact:
        return 0
    scale = table.diameter() + math.hypot(float(z[0]), float(z[1]))
    return 1e-12 * scale * scale


def is_strictly_outside(table: Table, z: Point) -> bool:
    if table.kind == "polygon":
        n = table.n
        return any(
            _cross3(table.vertices[i], table.vertices[(i + 1) % n], z) < 0 for i in range(n)
        )
    return not table.contains(z)


def tangency(table: Table, z: Point) -> TangencyResult:
    """Supporting point seen from ``z`` with the table on the left."""
    if table.kind == "ellipse":
        return ellipse_tangency(table, z)
    z = table.point(z)
    if not is_strictly_outside(table, z):
        raise InteriorPointError(f"point {z} is not strictly outside the table")
    verts = table.vertices
    best = 0
    for j in range(1, table.n):
        if _cross3(z, verts[best], verts[j]) < 0:
            best = j
    tau = verts[best]
    tol = _singular_tol(table, z)
    singular = False
    for j, w in enumerate(verts):
        if j == best:
            continue
        c = _cross3(z, tau, w)
        if abs(c) <= tol:
            singular = True
        elif c < 0:  # pragma: no cover - guarded by convexity
            raise AssertionError("tangency scan failed to find the extreme vertex")
    return TangencyResult(tau=tau, kind="vertex", index=best, singular=singular)


def ellipse_tangency(table: Table, z: Point) -> TangencyResult:
    """Tangency on an axis-aligned ellipse, solved in the angle parameter.

    The rescaled problem (unit circle) gives the root in closed form; a
    bracketed Brent solve of cross(gamma(t) - z, gamma'(t)) = 0 polishes it.
    """
    if table.kind != "ellipse":
        raise TypeError("ellipse_tangency needs an ellipse table")
    (cx, cy), (a, b) = table.center, table.semi_axes
    zx, zy = float(z[0]), float(z[1])
    wx, wy = (zx - cx) / a, (zy - cy) / b
    d = math.hypot(wx, wy)
    if d <= 1.0:
        raise InteriorPointError(f"point {(zx, zy)} is not strictly outside the ellipse")
    phi = math.atan2(wy, wx)
    alpha = math.acos(1.0 / d)
    t0 = phi + alpha

    def f(t):
        gx, gy = cx + a * math.cos(t), cy + b * math.sin(t)
        return cross(gx - zx, gy - zy, -a * math.sin(t), b * math.cos(t))

    # the other root phi - alpha bounds the bracket; stay well inside it
    half = min(alpha, math.pi - alpha) * 0.5
    lo, hi = t0 - half, t0 + half
    flo, fhi = f(lo), f(hi)
    t = t0
    if f(t0) != 0.0:
        if flo * fhi > 0:
            raise TangencySolveError(
                f"tangency root not bracketed: f({lo:.6g})={flo:.3g}, f({hi:.6g})={fhi:.3g}"
            )
        t = brentq(f, lo, hi, xtol=1e-15, rtol=1e-13)
    t = math.remainder(t, 2 * math.pi)
    tau = (cx + a * math.cos(t), cy + b * math.sin(t))
    return TangencyResult(tau=tau, kind="smooth", parameter=t, singular=False)


# ---------------------------------------------------------------------------


def parallelogram_corners(table: Table, tol: float = 1e-9) -> List[Tuple[int, int, int, int]]:
    """Vertex index 4-tuples (a, b, c, d), in cyclic order, with v_a + v_c = v_b + v_d."""
    if table.kind != "polygon":
        raise TypeError("parallelogram_corners needs a polygon table")
    verts = table.vertices
    scale = table.diameter()
    out = []
    for a, b, c, d in combinations(range(table.n), 4):
        dx = verts[a][0] + verts[c][0] - verts[b][0] - verts[d][0]
        dy = verts[a][1] + verts[c][1] - verts[b][1] - verts[d][1]
        if table.exact:
            hit = dx == 0 and dy == 0
        else:
            hit = math.hypot(dx, dy) <= tol * scale
        if hit:
            out.append((a, b, c, d))
    return out
