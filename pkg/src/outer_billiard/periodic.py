"""Period-n analysis: itinerary cells for polygons, Monte Carlo, smooth refinement.

On a polygon table the map restricted to the set of points with tangency
vertex ``v`` is the point reflection ``z -> 2v - z``.  Composing ``n`` of
them along an itinerary gives ``z -> (-1)^n z + 2 * sum_k (-1)^(n-k) v_k``,
so for even ``n`` every cell is translated rigidly.  A cell consists of
period-n points exactly when its translation vanishes.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .dynamics import orbit
from .geometry import Point, Table

__all__ = [
    "Box",
    "Disk",
    "Annulus",
    "Cell",
    "ScanReport",
    "MeasureEstimate",
    "Refinement",
    "RefinementError",
    "validate_itinerary",
    "default_region",
    "bounding_annulus",
    "translation_of",
    "cell_for_itinerary",
    "period4_scan",
    "period_scan",
    "measure_estimate",
    "refine_periodic_smooth",
    "power_map",
    "wilson_interval",
]


# ---------------------------------------------------------------------------
# regions


@dataclass(frozen=True)
class Box:
    xmin: float
    ymin: float
    xmax: float
    ymax: float

    def bounds(self):
        return (self.xmin, self.ymin, self.xmax, self.ymax)

    def sample(self, rng: np.random.Generator, m: int) -> np.ndarray:
        lo = np.array([float(self.xmin), float(self.ymin)])
        hi = np.array([float(self.xmax), float(self.ymax)])
        return lo + rng.random((m, 2)) * (hi - lo)

    def to_json(self):
        return {"type": "box", "bounds": [_enc(v) for v in self.bounds()]}


@dataclass(frozen=True)
class Disk:
    cx: float
    cy: float
    r: float

    def sample(self, rng, m):
        u = rng.random((m, 2))
        rad = self.r * np.sqrt(u[:, 0])
        ang = 2 * np.pi * u[:, 1]
        return np.column_stack([self.cx + rad * np.cos(ang), self.cy + rad * np.sin(ang)])

    def to_json(self):
        return {"type": "disk", "center": [self.cx, self.cy], "radius": self.r}


@dataclass(frozen=True)
class Annulus:
    cx: float
    cy: float
    r_in: float
    r_out: float

    def sample(self, rng, m):
        u = rng.random((m, 2))
        rad = np.sqrt(self.r_in**2 + u[:, 0] * (self.r_out**2 - self.r_in**2))
        ang = 2 * np.pi * u[:, 1]
        return np.column_stack([self.cx + rad * np.cos(ang), self.cy + rad * np.sin(ang)])

    def to_json(self):
        return {"type": "annulus", "center": [self.cx, self.cy], "radii": [self.r_in, self.r_out]}


Region = Union[Box, Disk, Annulus]


def _enc(v):
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    return v


def default_region(table: Table, inflate=3) -> Box:
    """Bounding box of the table scaled about its center by ``inflate``."""
    xmin, ymin, xmax, ymax = table.bbox()
    k = Fraction(inflate) if table.exact else float(inflate)
    cx, cy = (xmin + xmax) / 2, (ymin + ymax) / 2
    hx, hy = (xmax - xmin) / 2 * k, (ymax - ymin) / 2 * k
    return Box(cx - hx, cy - hy, cx + hx, cy + hy)


def bounding_annulus(table: Table, inflate: float = 3.0) -> Annulus:
    """Annulus around the bounding-box center whose inner circle encloses the table."""
    xmin, ymin, xmax, ymax = (float(v) for v in table.bbox())
    r = math.hypot(xmax - xmin, ymax - ymin) / 2
    return Annulus((xmin + xmax) / 2, (ymin + ymax) / 2, r, inflate * r)


# ---------------------------------------------------------------------------
# itineraries and cells


def validate_itinerary(table: Table, itin: Sequence[int]) -> Tuple[int, ...]:
    itin = tuple(int(i) for i in itin)
    if len(itin) < 2:
        raise ValueError("itinerary needs at least two entries")
    if any(not 0 <= i < table.n for i in itin):
        raise ValueError(f"itinerary {itin} has indices outside 0..{table.n - 1}")
    if any(itin[k] == itin[k + 1] for k in range(len(itin) - 1)):
        raise ValueError(f"itinerary {itin} repeats a vertex consecutively")
    return itin


def translation_of(table: Table, itin: Sequence[int]) -> Point:
    """Translation of the n-fold composition of reflections (n even)."""
    itin = validate_itinerary(table, itin)
    n = len(itin)
    if n % 2:
        raise ValueError("odd itineraries compose to a point reflection, not a translation")
    tx = ty = table.scalar(0)
    for k, j in enumerate(itin, start=1):
        sign = 1 if (n - k) % 2 == 0 else -1
        tx += sign * table.vertices[j][0]
        ty += sign * table.vertices[j][1]
    return (2 * tx, 2 * ty)


@dataclass
class Cell:
    itinerary: Tuple[int, ...]
    halfplanes: List[Tuple[object, object, object]]  # a*x + b*y + c > 0
    region: List[Point]  # closure of the open cell, clipped to the scan box
    translation: Optional[Point]
    near_degenerate: bool = False

    @property
    def nonempty(self) -> bool:
        return len(self.region) >= 3

    def contains(self, z: Point) -> bool:
        return all(a * z[0] + b * z[1] + c > 0 for a, b, c in self.halfplanes)

    def to_json(self) -> dict:
        return {
            "itinerary": list(self.itinerary),
            "translation": [_enc(v) for v in self.translation] if self.translation else None,
            "region_vertices": [[_enc(x), _enc(y)] for x, y in self.region],
        }


def _step_constraints(table: Table, j: int, s, c) -> List[Tuple[object, object, object]]:
    """Constraints on z for the point s*z + c to have tangency vertex j."""
    v = table.vertices[j]
    out = []
    for k, w in enumerate(table.vertices):
        if k == j:
            continue
        dx, dy = v[0] - w[0], v[1] - w[1]
        # cross(v - p, w - p) = cross(v, w) + cross(p, v - w), p = s z + c
        out.append((s * dy, -s * dx, v[0] * w[1] - v[1] * w[0] + c[0] * dy - c[1] * dx))
    return out


def _clip(poly: List[Point], a, b, c) -> List[Point]:
    """Sutherland-Hodgman against the closed halfplane a*x + b*y + c >= 0."""
    if not poly:
        return poly
    out = []
    n = len(poly)
    for i in range(n):
        p, q = poly[i], poly[(i + 1) % n]
        fp = a * p[0] + b * p[1] + c
        fq = a * q[0] + b * q[1] + c
        if fp >= 0:
            out.append(p)
        if (fp > 0 and fq < 0) or (fp < 0 and fq > 0):
            t = fp / (fp - fq)
            out.append((p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])))
    return out


def _area2(poly: Sequence[Point]):
    n = len(poly)
    return sum(poly[i][0] * poly[(i + 1) % n][1] - poly[(i + 1) % n][0] * poly[i][1] for i in range(n))


def _dedupe(poly: List[Point]) -> List[Point]:
    out = []
    for p in poly:
        if not out or p != out[-1]:
            out.append(p)
    while len(out) > 1 and out[0] == out[-1]:
        out.pop()
    return out


FLOAT_CELL_FLOOR = 1e-12


def _finish_region(poly: List[Point], exact: bool, scale2: float) -> Tuple[List[Point], bool]:
    poly = _dedupe(poly)
    if len(poly) < 3:
        return [], False
    a = _area2(poly)
    if exact:
        return (poly, False) if a > 0 else ([], False)
    near = abs(a) <= 1e-10 * scale2
    return (poly, near) if a > 1e-13 * scale2 else ([], near)


def _box_polygon(table: Table, region: Box) -> List[Point]:
    xmin, ymin, xmax, ymax = (table.scalar(v) for v in region.bounds())
    return [(xmin, ymin), (xmax, ymin), (xmax, ymax), (xmin, ymax)]


def _exact_twin(table: Table) -> Table:
    return Table("polygon", tuple((Fraction(x), Fraction(y)) for x, y in table.vertices), exact=True)


def cell_for_itinerary(table: Table, itin: Sequence[int], region: Optional[Box] = None) -> Cell:
    """Halfplanes, clipped region and translation of one itinerary cell."""
    if table.kind != "polygon":
        raise TypeError("cells are defined for polygon tables")
    itin = validate_itinerary(table, itin)
    region = region or default_region(table)
    one = table.scalar(1)
    s, c = one, (table.scalar(0), table.scalar(0))
    halfplanes = []
    for j in itin:
        halfplanes.extend(_step_constraints(table, j, s, c))
        v = table.vertices[j]
        s, c = -s, (2 * v[0] - c[0], 2 * v[1] - c[1])
    poly = _box_polygon(table, region)
    for hp in halfplanes:
        poly = _clip(poly, *hp)
    scale2 = _scale2(region)
    poly, near = _finish_region(poly, table.exact, scale2)
    if near:
        # re-decide on the rational twin; slivers below float resolution count as empty
        exact_cell = cell_for_itinerary(_exact_twin(table), itin, _exact_box(region))
        poly = [(float(x), float(y)) for x, y in exact_cell.region]
        if poly and abs(_area2(poly)) <= FLOAT_CELL_FLOOR * scale2:
            poly = []
    trans = translation_of(table, itin) if len(itin) % 2 == 0 else None
    return Cell(itin, halfplanes, poly, trans, near)


def _scale2(region: Box) -> float:
    w = float(region.xmax) - float(region.xmin)
    h = float(region.ymax) - float(region.ymin)
    return max(w, h) ** 2


def _exact_box(region: Box) -> Box:
    return Box(*(Fraction(v) for v in region.bounds()))


# ---------------------------------------------------------------------------
# scan


@dataclass
class ScanReport:
    table: dict
    region: dict
    period: int
    cells_examined: int
    nonempty: int
    zero_translation: List[Cell]
    cells: List[Cell] = field(default_factory=list, repr=False)

    @property
    def verdict(self) -> str:
        return "open-period-4-set" if self.zero_translation else "empty-interior"

    def to_json(self) -> dict:
        out = {
            "table": self.table,
            "region": self.region,
            "period": self.period,
            "cells_examined": self.cells_examined,
            "nonempty": self.nonempty,
            "zero_translation": [c.to_json() for c in self.zero_translation],
            "verdict": self.verdict,
        }
        return out


def _scan_branch(table: Table, first: int, period: int, region: Box) -> Tuple[int, List[Cell]]:
    """All nonempty cells whose itinerary starts at ``first`` (depth-first, prefix-pruned)."""
    scale2 = _scale2(region)
    found: List[Cell] = []
    examined = 0
    n = table.n

    def rec(prefix, poly, halfplanes, s, c):
        nonlocal examined
        j = prefix[-1]
        hps = _step_constraints(table, j, s, c)
        for hp in hps:
            poly = _clip(poly, *hp)
            if len(poly) < 3:
                break
        remaining = period - len(prefix)
        clipped, near = _finish_region(poly, table.exact, scale2)
        if not clipped and not near:
            examined += (n - 1) ** remaining
            return
        v = table.vertices[j]
        s2, c2 = -s, (2 * v[0] - c[0], 2 * v[1] - c[1])
        if remaining == 0:
            examined += 1
            cell = cell_for_itinerary(table, prefix, region) if near else Cell(
                tuple(prefix), halfplanes + hps, clipped, translation_of(table, prefix), False
            )
            if cell.nonempty:
                found.append(cell)
            return
        for k in range(n):
            if k != j:
                rec(prefix + [k], poly, halfplanes + hps, s2, c2)

    rec([first], _box_polygon(table, region), [], table.scalar(1), (table.scalar(0), table.scalar(0)))
    return examined, found


def period_scan(
    table: Table,
    region: Optional[Box] = None,
    period: int = 4,
    workers: int = 1,
    keep_cells: bool = False,
) -> ScanReport:
    """Enumerate all even-period itinerary cells and collect zero-translation ones."""
    if table.kind != "polygon":
        raise TypeError("period scans need a polygon table")
    if period < 2 or period % 2:
        raise ValueError("the exact cell classifier supports even periods only")
    region = region or default_region(table)
    firsts = range(table.n)
    if workers > 1 and table.n > 1:
        with ProcessPoolExecutor(max_workers=min(workers, table.n)) as pool:
            parts = list(pool.map(_scan_branch, [table] * table.n, firsts, [period] * table.n, [region] * table.n))
    else:
        parts = [_scan_branch(table, f, period, region) for f in firsts]
    examined = sum(p[0] for p in parts)
    cells = [c for p in parts for c in p[1]]
    zero = [c for c in cells if c.translation is not None and _is_zero(c.translation, table)]
    return ScanReport(
        table=table.to_json(),
        region=region.to_json(),
        period=period,
        cells_examined=examined,
        nonempty=len(cells),
        zero_translation=zero,
        cells=cells if keep_cells else [],
    )


def _is_zero(t: Point, table: Table) -> bool:
    if table.exact:
        return t[0] == 0 and t[1] == 0
    return math.hypot(t[0], t[1]) <= 1e-12 * table.diameter()


def period4_scan(table: Table, region: Optional[Box] = None, workers: int = 1, keep_cells: bool = False) -> ScanReport:
    return period_scan(table, region, 4, workers, keep_cells)


# ---------------------------------------------------------------------------
# Monte Carlo


@dataclass(frozen=True)
class MeasureEstimate:
    fraction: float
    low: float
    high: float
    periodic: int
    samples: int
    singular: int

    def to_json(self) -> dict:
        return {
            "fraction": self.fraction,
            "wilson_95": [self.low, self.high],
            "periodic": self.periodic,
            "samples": self.samples,
            "singular": self.singular,
        }


def wilson_interval(k: int, n: int, z: float = 1.959963984540054) -> Tuple[float, float]:
    p = k / n
    denom = 1 + z * z / n
    center = (p + z * z / (2 * n)) / denom
    half = z / denom * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n))
    lo = 0.0 if k == 0 else max(0.0, center - half)
    hi = 1.0 if k == n else min(1.0, center + half)
    return lo, hi


def _inside_mask(table: Table, pts: np.ndarray) -> np.ndarray:
    if table.kind == "polygon":
        v = np.array([[float(x), float(y)] for x, y in table.vertices])
        w = np.roll(v, -1, axis=0)
        e = w - v
        rel_x = pts[:, None, 0] - v[None, :, 0]
        rel_y = pts[:, None, 1] - v[None, :, 1]
        c = e[None, :, 0] * rel_y - e[None, :, 1] * rel_x
        return np.all(c >= 0, axis=1)
    (cx, cy), (a, b) = table.center, table.semi_axes
    return ((pts[:, 0] - cx) / a) ** 2 + ((pts[:, 1] - cy) / b) ** 2 <= 1.0


def power_map(table: Table, pts: np.ndarray, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Vectorized n-fold map in float arithmetic; returns (images, singular mask)."""
    z = np.array(pts, dtype=float)
    bad = np.zeros(len(z), dtype=bool)
    if table.kind == "polygon":
        v = np.array([[float(x), float(y)] for x, y in table.vertices])
        prev, nxt = np.roll(v, 1, axis=0), np.roll(v, -1, axis=0)
        scale = table.diameter()
        for _ in range(n):
            tol = 1e-12 * (scale + np.hypot(z[:, 0], z[:, 1])) ** 2
            rx = v[None, :, 0] - z[:, None, 0]
            ry = v[None, :, 1] - z[:, None, 1]
            c_prev = rx * (prev[None, :, 1] - z[:, None, 1]) - ry * (prev[None, :, 0] - z[:, None, 0])
            c_next = rx * (nxt[None, :, 1] - z[:, None, 1]) - ry * (nxt[None, :, 0] - z[:, None, 0])
            ok = (c_prev > tol[:, None]) & (c_next > tol[:, None])
            near = (np.abs(c_prev) <= tol[:, None]) | (np.abs(c_next) <= tol[:, None])
            count = ok.sum(axis=1)
            idx = ok.argmax(axis=1)
            singular = (count != 1) | near[np.arange(len(z)), idx]
            bad |= singular
            z = 2 * v[idx] - z
        return z, bad
    (cx, cy), (a, b) = table.center, table.semi_axes
    for _ in range(n):
        wx, wy = (z[:, 0] - cx) / a, (z[:, 1] - cy) / b
        d = np.hypot(wx, wy)
        bad |= d <= 1.0
        t = np.arctan2(wy, wx) + np.arccos(np.clip(1.0 / np.maximum(d, 1.0), -1, 1))
        tau = np.column_stack([cx + a * np.cos(t), cy + b * np.sin(t)])
        z = 2 * tau - z
    return z, bad


def _sample_outside(table: Table, region: Region, rng: np.random.Generator, m: int) -> np.ndarray:
    out = []
    have = 0
    while have < m:
        batch = region.sample(rng, max(16, 2 * (m - have)))
        batch = batch[~_inside_mask(table, batch)]
        out.append(batch)
        have += len(batch)
    return np.concatenate(out)[:m]


def _measure_partition(table: Table, region: Region, period: int, tol: float, m: int, seed_seq, exact: bool):
    rng = np.random.default_rng(seed_seq)
    pts = _sample_outside(table, region, rng, m)
    if exact:
        periodic = singular = 0
        for x, y in pts:
            z = (Fraction(float(x)), Fraction(float(y)))
            o = orbit(table, z, period)
            if o.termination != "completed":
                singular += 1
            elif o.points[-1] == o.points[0]:
                periodic += 1
        return periodic, singular
    img, bad = power_map(table, pts, period)
    close = np.hypot(img[:, 0] - pts[:, 0], img[:, 1] - pts[:, 1]) <= tol
    return int(np.sum(close & ~bad)), int(np.sum(bad))


def measure_estimate(
    table: Table,
    region: Region,
    period: int,
    tol: float = 1e-9,
    samples: int = 10_000,
    seed: int = 0,
    partitions: int = 1,
    exact: bool = False,
    workers: int = 1,
) -> MeasureEstimate:
    """Fraction of uniformly sampled exterior points with |P^n z - z| <= tol.

    Samples are split into ``partitions`` streams spawned from ``seed``; the
    result depends on (seed, samples, partitions) only, not on ``workers``.
    With ``exact`` (polygon tables in exact mode) points are iterated in
    rational arithmetic and counted only on exact return.
    """
    if samples < 1:
        raise ValueError("samples must be at least 1")
    if period < 1:
        raise ValueError("period must be positive")
    if partitions < 1:
        raise ValueError("partitions must be at least 1")
    if exact and not (table.kind == "polygon" and table.exact):
        raise ValueError("exact counting needs an exact polygon table")
    seqs = np.random.SeedSequence(seed).spawn(partitions)
    sizes = [samples // partitions + (1 if i < samples % partitions else 0) for i in range(partitions)]
    args = [(table, region, period, tol, m, s, exact) for m, s in zip(sizes, seqs) if m]
    if workers > 1 and len(args) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_measure_partition, *zip(*args)))
    else:
        parts = [_measure_partition(*a) for a in args]
    periodic = sum(p[0] for p in parts)
    singular = sum(p[1] for p in parts)
    lo, hi = wilson_interval(periodic, samples)
    return MeasureEstimate(periodic / samples, lo, hi, periodic, samples, singular)


# ---------------------------------------------------------------------------
# smooth tables


class RefinementError(RuntimeError):
    pass


@dataclass(frozen=True)
class Refinement:
    point: Point
    residual: float
    iterations: int
    degenerate: bool
    singular_values: Tuple[float, float]


def _pn_minus_id(table: Table, z: np.ndarray, n: int) -> np.ndarray:
    img, bad = power_map(table, z[None, :], n)
    if bad[0]:
        raise RefinementError(f"iterate of {tuple(z)} left the regular domain")
    return img[0] - z


def _fd_jacobian(table: Table, z: np.ndarray, n: int, h: float) -> np.ndarray:
    J = np.empty((2, 2))
    for k in range(2):
        e = np.zeros(2)
        e[k] = h
        J[:, k] = (_pn_minus_id(table, z + e, n) - _pn_minus_id(table, z - e, n)) / (2 * h)
    return J


def refine_periodic_smooth(
    table: Table,
    z0: Sequence[float],
    period: int,
    tol: float = 1e-9,
    max_iter: int = 60,
    fd_step: float = 1e-6,
    degeneracy_ratio: float = 1e-6,
) -> Refinement:
    """Damped Gauss-Newton on F(z) = P^n(z) - z with finite-difference derivatives.

    Steps are minimum-norm least-squares solutions, so rank-deficient
    Jacobians (curves of periodic points on symmetric tables) still move the
    iterate onto the solution set.  The degeneracy flag reports
    sigma_min / sigma_max < ``degeneracy_ratio`` at the returned point.
    """
    if table.kind != "ellipse":
        raise TypeError("refine_periodic_smooth needs an ellipse table")
    z = np.array([float(z0[0]), float(z0[1])])
    if table.contains(tuple(z)):
        raise RefinementError("starting point is not outside the table")
    scale = table.diameter() + float(np.hypot(*z))
    h = fd_step * scale
    F = _pn_minus_id(table, z, period)
    r = float(np.hypot(*F))
    it = 0
    while r > 1e-14 * scale and it < max_iter:
        it += 1
        J = _fd_jacobian(table, z, period, h)
        delta = -np.linalg.lstsq(J, F, rcond=1e-12)[0]
        t = 1.0
        while True:
            trial = z + t * delta
            try:
                Ft = _pn_minus_id(table, trial, period)
            except RefinementError:
                Ft = None
            if Ft is not None and np.hypot(*Ft) < r * (1 - 1e-4 * t):
                break
            t *= 0.5
            if t < 1e-10:
                break
        if t < 1e-10:
            break  # no further decrease available
        z, F = trial, Ft
        r = float(np.hypot(*F))
    if r > tol:
        raise RefinementError(f"no convergence after {it} iterations: residual {r:.3e}")
    sv = np.linalg.svd(_fd_jacobian(table, z, period, h), compute_uv=False)
    degenerate = bool(sv[0] == 0 or sv[-1] / sv[0] < degeneracy_ratio)
    return Refinement((float(z[0]), float(z[1])), r, it, degenerate, (float(sv[0]), float(sv[-1])))


def worker_count() -> int:
    env = os.environ.get("OBL_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1
