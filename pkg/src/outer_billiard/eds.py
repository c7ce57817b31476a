"""Coframe forms on quadrilaterals and checks on 2-parameter orbit families.

A configuration is four points z_1..z_4 (stored 0-based here).  A tangent
vector is a variation (dz_1, ..., dz_4).  The forms are

    theta^i = cross(z_{i+1} - z_i, (dz_i + dz_{i+1}) / 2)
    omega^i = cross(z_{i+1} - z_i, (dz_i - dz_{i+1}) / 2)

written out in coordinates below.  theta^i vanishes exactly when the
midpoint of segment i moves along the segment, which is what the orbit of
an outer billiard along a family of periodic points must do.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

Point = Tuple[float, float]
TangentQuad = Sequence[Point]  # (dz_1, ..., dz_4)

__all__ = [
    "QuadConfig",
    "DegenerateQuadError",
    "FamilyError",
    "NotIntegralError",
    "FamilyPatch",
    "IntegralElement",
    "theta",
    "omega",
    "coframe_solve",
    "wedge",
    "midpoint_family",
    "family_residual",
    "structure_residuals",
    "integral_element",
    "theta56",
    "theta56_matrix",
    "tangency_direction",
    "ddelta_check",
    "square_orbit",
    "rotation_family",
    "StructureResiduals",
    "family_check_report",
]


class DegenerateQuadError(ValueError):
    pass


class FamilyError(ValueError):
    def __init__(self, msg, s=None, t=None):
        super().__init__(msg)
        self.s, self.t = s, t


class NotIntegralError(ValueError):
    pass


def _det(ax, ay, bx, by):
    return ax * by - ay * bx


@dataclass(frozen=True)
class QuadConfig:
    z: Tuple[Point, Point, Point, Point]

    def __post_init__(self):
        if len(self.z) != 4:
            raise ValueError("a quadrilateral needs four points")
        object.__setattr__(self, "z", tuple((p[0], p[1]) for p in self.z))

    @classmethod
    def of(cls, *points) -> "QuadConfig":
        return cls(tuple(points))

    @property
    def deltas(self) -> Tuple:
        """Delta_i = det[z_i - z_{i+1}; z_{i+1} - z_{i+2}], twice the area of (z_i, z_{i+1}, z_{i+2})."""
        z = self.z
        out = []
        for i in range(4):
            a, b, c = z[i], z[(i + 1) % 4], z[(i + 2) % 4]
            out.append(_det(a[0] - b[0], a[1] - b[1], b[0] - c[0], b[1] - c[1]))
        return tuple(out)

    @property
    def area(self):
        z = self.z
        return sum(_det(z[i][0], z[i][1], z[(i + 1) % 4][0], z[(i + 1) % 4][1]) for i in range(4)) / 2

    @property
    def midpoints(self) -> Tuple[Point, ...]:
        z = self.z
        return tuple(((z[i][0] + z[(i + 1) % 4][0]) / 2, (z[i][1] + z[(i + 1) % 4][1]) / 2) for i in range(4))

    @property
    def genericity(self):
        """Delta_2 Delta_4 - Delta_1 Delta_3 (1-based indices)."""
        d = self.deltas
        return d[1] * d[3] - d[0] * d[2]

    def scale(self) -> float:
        return max(abs(float(c)) for p in self.z for c in p) + 1.0

    def check_nondegenerate(self, tol: float = 0.0) -> None:
        z = self.z
        for i in range(4):
            for j in range(i + 1, 4):
                if z[i] == z[j]:
                    raise DegenerateQuadError(f"points {i + 1} and {j + 1} coincide")
        lim = tol * self.scale() ** 2
        for i, d in enumerate(self.deltas):
            if abs(d) <= lim:
                raise DegenerateQuadError(f"points {i + 1}, {(i + 1) % 4 + 1}, {(i + 2) % 4 + 1} are collinear")


def theta(i: int, q: QuadConfig, dq: TangentQuad):
    a, b = q.z[i % 4], q.z[(i + 1) % 4]
    da, db = dq[i % 4], dq[(i + 1) % 4]
    return ((a[1] - b[1]) * (da[0] + db[0]) - (a[0] - b[0]) * (da[1] + db[1])) / 2


def omega(i: int, q: QuadConfig, dq: TangentQuad):
    a, b = q.z[i % 4], q.z[(i + 1) % 4]
    da, db = dq[i % 4], dq[(i + 1) % 4]
    return ((a[1] - b[1]) * (da[0] - db[0]) - (a[0] - b[0]) * (da[1] - db[1])) / 2


def coframe_solve(q: QuadConfig, theta_vals: Sequence, omega_vals: Sequence) -> List[Point]:
    """The variation with prescribed theta^i and omega^i values.

    At vertex j (0-based) the two equations are
        (y_j - y_{j+1}) dx_j - (x_j - x_{j+1}) dy_j         = theta^j + omega^j
        (y_{j-1} - y_j) dx_j - (x_{j-1} - x_j) dy_j         = theta^{j-1} - omega^{j-1}
    whose determinant is Delta_{j-1}.
    """
    z = q.z
    out = []
    for j in range(4):
        p, nx, pv = z[j], z[(j + 1) % 4], z[(j - 1) % 4]
        a11, a12 = p[1] - nx[1], -(p[0] - nx[0])
        a21, a22 = pv[1] - p[1], -(pv[0] - p[0])
        r1 = theta_vals[j] + omega_vals[j]
        r2 = theta_vals[(j - 1) % 4] - omega_vals[(j - 1) % 4]
        det = a11 * a22 - a12 * a21
        if det == 0:
            raise DegenerateQuadError(f"coframe degenerates at vertex {j + 1} (Delta = 0)")
        out.append(((r1 * a22 - a12 * r2) / det, (a11 * r2 - a21 * r1) / det))
    return out


def wedge(f: Callable, g: Callable, a, b):
    """(f ^ g)(a, b) for 1-forms given as callables on tangent vectors."""
    return f(a) * g(b) - f(b) * g(a)


def _omegas(q, dq):
    return [omega(i, q, dq) for i in range(4)]


def _thetas(q, dq):
    return [theta(i, q, dq) for i in range(4)]


# ---------------------------------------------------------------------------
# families


@dataclass
class FamilyPatch:
    base: QuadConfig
    radius: float
    grid: int
    config: Callable[[float, float], QuadConfig]
    tangents: Optional[Callable[[float, float], Tuple[TangentQuad, TangentQuad]]] = None
    label: str = "family"

    @property
    def params(self) -> np.ndarray:
        return np.linspace(-self.radius, self.radius, self.grid)

    @property
    def step(self) -> float:
        return 2 * self.radius / (self.grid - 1) if self.grid > 1 else self.radius

    def points(self):
        for s in self.params:
            for t in self.params:
                yield float(s), float(t)

    def fd_tangents(self, s: float, t: float, h: float) -> Tuple[List[Point], List[Point]]:
        def diff(p, m):
            return [((a[0] - b[0]) / (2 * h), (a[1] - b[1]) / (2 * h)) for a, b in zip(p.z, m.z)]

        return (
            diff(self.config(s + h, t), self.config(s - h, t)),
            diff(self.config(s, t + h), self.config(s, t - h)),
        )


def square_orbit(x1: float, y1: float) -> QuadConfig:
    """Period-4 orbit of the unit-square table through (x1, y1) near (1/2, -1/2)."""
    return QuadConfig(((x1, y1), (2 - x1, -y1), (x1, y1 + 2), (-x1, -y1)))


def midpoint_family(q0: QuadConfig, r: float, n: int, bend: float = 0.0, check: bool = True) -> FamilyPatch:
    """Quadrilaterals sharing the edge midpoints of ``q0``.

    z_1 = z_1^0 + w(s, t) and z_{i+1} = 2 zeta_i - z_i.  With ``bend = 0`` the
    chart is w = (s, t); a nonzero ``bend`` uses w = (s + bend t^3, t + bend s^3),
    the same surface in curved coordinates, which gives the finite-difference
    checks something to converge on.
    """
    if n < 2:
        raise ValueError("grid needs at least two points per side")
    if r <= 0:
        raise ValueError("radius must be positive")
    q0.check_nondegenerate()
    zeta = q0.midpoints
    z10 = q0.z[0]

    def config(s, t):
        w = (s + bend * t**3, t + bend * s**3)
        z = [(z10[0] + w[0], z10[1] + w[1])]
        for i in range(3):
            z.append((2 * zeta[i][0] - z[-1][0], 2 * zeta[i][1] - z[-1][1]))
        return QuadConfig(tuple(z))

    def tangents(s, t):
        ws = (1.0, 3 * bend * s**2)
        wt = (3 * bend * t**2, 1.0)
        a = [(ws[0] * (-1) ** k, ws[1] * (-1) ** k) for k in range(4)]
        b = [(wt[0] * (-1) ** k, wt[1] * (-1) ** k) for k in range(4)]
        return a, b

    fp = FamilyPatch(q0, r, n, config, tangents, "midpoint")
    if check:
        for s, t in fp.points():
            try:
                fp.config(s, t).check_nondegenerate(tol=1e-12)
            except DegenerateQuadError as exc:
                raise FamilyError(f"configuration at (s, t) = ({s:g}, {t:g}) is degenerate: {exc}", s, t) from exc
    return fp


def rotation_family(q0: QuadConfig, center: Point, r: float, n: int) -> FamilyPatch:
    """z_1 rotated about ``center`` by s and scaled by 1 + t; other vertices fixed.

    Not an orbit family; used as a negative control.
    """
    def config(s, t):
        x, y = q0.z[0][0] - center[0], q0.z[0][1] - center[1]
        c, sn, k = math.cos(s), math.sin(s), 1 + t
        z1 = (center[0] + k * (c * x - sn * y), center[1] + k * (sn * x + c * y))
        return QuadConfig((z1,) + q0.z[1:])

    return FamilyPatch(q0, r, n, config, None, "rotation")


def _tangent_pair(fp: FamilyPatch, s, t, h, analytic: bool):
    if analytic and fp.tangents is not None:
        return fp.tangents(s, t)
    return fp.fd_tangents(s, t, h)


def family_residual(fp: FamilyPatch, h: Optional[float] = None, analytic: bool = True) -> float:
    """max |theta^i| over the grid, all i and both parameter directions."""
    h = h or fp.step
    worst = 0.0
    for s, t in fp.points():
        q = fp.config(s, t)
        for d in _tangent_pair(fp, s, t, h, analytic):
            worst = max(worst, max(abs(v) for v in _thetas(q, d)))
    return worst


@dataclass
class StructureResiduals:
    h: float
    theta: float
    dtheta: float
    rel: float
    dom: float
    area_form: float
    area_integral: float
    per_point: dict = field(default_factory=dict, repr=False)

    def as_dict(self) -> dict:
        return {
            "h": self.h,
            "theta": self.theta,
            "dtheta": self.dtheta,
            "rel": self.rel,
            "dom": self.dom,
            "area_form": self.area_form,
            "area_integral": self.area_integral,
        }


def _dxdy(dq_a, dq_b, i):
    return dq_a[i][0] * dq_b[i][1] - dq_b[i][0] * dq_a[i][1]


def _omega_on(fp: FamilyPatch, s, t, which: int, h: float):
    q = fp.config(s, t)
    d = _tangent_pair(fp, s, t, h, True)[which]
    return np.array(_omegas(q, d), dtype=float)


def structure_residuals(fp: FamilyPatch, h: Optional[float] = None) -> StructureResiduals:
    """Structure-equation residuals over the grid.

    Pointwise identities (dtheta, rel, area_form) use central-difference
    tangents with step ``h``.  The exterior derivative
    d omega^i(ds, dt) = ds[omega^i(dt)] - dt[omega^i(ds)] is a central
    difference with step ``h`` of omega evaluated on the patch's tangents
    (analytic when the patch has them).
    """
    h = h or fp.step
    S0 = float(fp.base.area)
    worst = dict(theta=0.0, dtheta=0.0, rel=0.0, dom=0.0, area_form=0.0, area_integral=0.0)
    per_point = {k: [] for k in worst}
    for s, t in fp.points():
        q = fp.config(s, t)
        a, b = fp.fd_tangents(s, t, h)
        d = [float(x) for x in q.deltas]
        om_a, om_b = _omegas(q, a), _omegas(q, b)
        w = [om_a[i] * om_b[(i + 1) % 4] - om_b[i] * om_a[(i + 1) % 4] for i in range(4)]
        ratios = [w[i] / d[i] for i in range(4)]
        xy = [_dxdy(a, b, i) for i in range(4)]
        d_om = (
            (_omega_on(fp, s + h, t, 1, h) - _omega_on(fp, s - h, t, 1, h))
            - (_omega_on(fp, s, t + h, 0, h) - _omega_on(fp, s, t - h, 0, h))
        ) / (2 * h)
        res = {
            "theta": max(abs(v) for v in _thetas(q, a) + _thetas(q, b)),
            "dtheta": max(abs(xy[i] - xy[0]) for i in range(4)),
            "rel": max(abs(r - ratios[0]) for r in ratios),
            "dom": max(abs(d_om[i] - 4 * ratios[j]) for i in range(4) for j in range(4)),
            "area_form": max(abs(xy[(i + 1) % 4] + ratios[i]) for i in range(4)),
            "area_integral": max(abs(d[0] + d[2] - 2 * S0), abs(d[1] + d[3] - 2 * S0)),
        }
        for k, v in res.items():
            worst[k] = max(worst[k], float(v))
            per_point[k].append(float(v))
    return StructureResiduals(h=h, per_point=per_point, **worst)


# ---------------------------------------------------------------------------
# integral elements


@dataclass(frozen=True)
class IntegralElement:
    case: str  # generic | deg_omega13 | deg_D
    v: Optional[float]
    u: Optional[float]
    fit_residual: Optional[float]
    wedge_2413_residual: Optional[float]
    genericity: float
    omega13: float


def integral_element(q: QuadConfig, da: TangentQuad, db: TangentQuad, tol: float = 1e-10) -> IntegralElement:
    """Fit v in omega^2 = v(D2 w1 + D1 w3), omega^4 = -v(D3 w1 + D4 w3) on span(da, db)."""
    scale = q.scale()
    size = max(abs(float(c)) for d in (da, db) for p in d for c in p) or 1.0
    th = max(abs(float(x)) for x in _thetas(q, da) + _thetas(q, db))
    if th > tol * scale * size:
        raise NotIntegralError(f"directions are not annihilated by theta (max |theta| = {th:.3e})")
    d = [float(x) for x in q.deltas]
    oa = [float(x) for x in _omegas(q, da)]
    ob = [float(x) for x in _omegas(q, db)]
    D = d[1] * d[3] - d[0] * d[2]
    w13 = oa[0] * ob[2] - ob[0] * oa[2]
    if abs(D) <= 1e-12 * scale**4:
        return IntegralElement("deg_D", None, None, None, None, D, w13)
    if abs(w13) <= 1e-12 * (scale * size) ** 2:
        return IntegralElement("deg_omega13", None, None, None, None, D, w13)
    A, y = [], []
    for o in (oa, ob):
        A += [d[1] * o[0] + d[0] * o[2], -(d[2] * o[0] + d[3] * o[2])]
        y += [o[1], o[3]]
    A, y = np.array(A), np.array(y)
    v = float(A @ y / (A @ A))
    fit = float(np.max(np.abs(A * v - y)))
    u = v * (d[1] - d[2])
    w24 = oa[1] * ob[3] - ob[1] * oa[3]
    r2413 = abs(w24 + v * v * D * w13)
    return IntegralElement("generic", v, u, fit, float(r2413), D, w13)


def theta56(q: QuadConfig, dq: TangentQuad):
    d = q.deltas
    w = _omegas(q, dq)
    t5 = d[1] * w[0] + (d[2] - d[1]) * w[1] + d[0] * w[2]
    t6 = d[2] * w[0] + d[3] * w[2] + (d[1] - d[2]) * w[3]
    return t5, t6


def theta56_matrix(q: QuadConfig) -> np.ndarray:
    """2 x 8 coefficients of (theta^5, theta^6) in (dx_1, dy_1, ..., dx_4, dy_4)."""
    rows = np.zeros((2, 8))
    for k in range(8):
        dq = [[0.0, 0.0] for _ in range(4)]
        dq[k // 2][k % 2] = 1.0
        rows[:, k] = [float(v) for v in theta56(q, dq)]
    return rows


def tangency_direction(q: QuadConfig, dq: TangentQuad, i: int, tol: float = 1e-10) -> float:
    """lambda with d/dt (z_i + z_{i+1})/2 = lambda (z_{i+1} - z_i); requires theta^i = 0."""
    a, b = q.z[i % 4], q.z[(i + 1) % 4]
    e = (b[0] - a[0], b[1] - a[1])
    da, db = dq[i % 4], dq[(i + 1) % 4]
    m = ((da[0] + db[0]) / 2, (da[1] + db[1]) / 2)
    ee = e[0] * e[0] + e[1] * e[1]
    th = theta(i, q, dq)
    if abs(th) > tol * math.sqrt(ee) * (math.hypot(float(m[0]), float(m[1])) + 1):
        raise NotIntegralError(f"midpoint velocity of segment {i + 1} is not along the segment (theta = {float(th):.3e})")
    return (m[0] * e[0] + m[1] * e[1]) / ee


def ddelta_check(fp: FamilyPatch, h: Optional[float] = None, v: Optional[Callable] = None) -> float:
    """Max residual of the dDelta_1, dDelta_2 relations along both parameter directions.

    ``v`` maps a configuration to the integral-element function; by default
    it is fitted pointwise with :func:`integral_element`.
    """
    h = h or fp.step
    worst = 0.0
    for s, t in fp.points():
        q = fp.config(s, t)
        a, b = _tangent_pair(fp, s, t, h, True)
        if v is None:
            el = integral_element(q, a, b)
            if el.case != "generic":
                continue
            vv = el.v
        else:
            vv = v(q)
        d1, d2, d3, d4 = (float(x) for x in q.deltas)
        for k, dq in enumerate((a, b)):
            if k == 0:
                plus, minus = fp.config(s + h, t), fp.config(s - h, t)
            else:
                plus, minus = fp.config(s, t + h), fp.config(s, t - h)
            dD = [(float(p) - float(m)) / (2 * h) for p, m in zip(plus.deltas, minus.deltas)]
            w = [float(x) for x in _omegas(q, dq)]
            r1 = d3 / d4 * (1 - vv * (d1 + d4)) * w[0] + d1 / d2 * (-1 - vv * (d2 + d3)) * w[2]
            r2 = d2 / d1 * (1 + vv * (d1 + d4)) * w[0] + d4 / d3 * (-1 + vv * (d2 + d3)) * w[2]
            worst = max(worst, abs(dD[0] - r1), abs(dD[1] - r2))
    return worst


def family_check_report(fp: FamilyPatch, hs: Sequence[float] = (1e-2, 1e-3, 1e-4)) -> dict:
    """Residual maxima per h plus the (v, u) field over the grid."""
    levels = [structure_residuals(fp, h).as_dict() for h in hs]
    vs, us, cases = [], [], []
    for s, t in fp.points():
        q = fp.config(s, t)
        a, b = _tangent_pair(fp, s, t, fp.step, True)
        el = integral_element(q, a, b)
        cases.append(el.case)
        vs.append(el.v)
        us.append(el.u)
    return {
        "family": fp.label,
        "base": [list(map(float, p)) for p in fp.base.z],
        "radius": fp.radius,
        "grid": fp.grid,
        "theta_residual": family_residual(fp),
        "levels": levels,
        "ddelta": [ddelta_check(fp, h) for h in hs],
        "params": [float(x) for x in fp.params],
        "v": vs,
        "u": us,
        "cases": cases,
    }
