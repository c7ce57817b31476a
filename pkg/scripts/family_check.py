"""Structure-equation residuals and the u field on midpoint families.

Prints a residual-vs-h table for the flat and the bent chart of the
square-orbit family and for a few random convex base quadrilaterals, with
observed convergence orders, then summarizes the fitted (v, u) fields.

    python3 scripts/family_check.py --grid 11 --json family.json
"""
import argparse
import json
import math
import random
from dataclasses import dataclass

from outer_billiard.eds import (
    QuadConfig,
    family_check_report,
    midpoint_family,
    rotation_family,
    family_residual,
    square_orbit,
    structure_residuals,
)

KEYS = ("theta", "dtheta", "rel", "dom", "area_form", "area_integral")


@dataclass
class FamilyConfig:
    base_x: float = 0.3
    base_y: float = -0.4
    radius: float = 0.04
    grid: int = 11
    bend: float = 0.5
    random_bases: int = 3
    seed: int = 1
    hs: tuple = (1e-2, 1e-3, 1e-4)


def random_convex_quad(rng: random.Random) -> QuadConfig:
    while True:
        pts = []
        for k in range(4):
            t = math.pi / 2 * (k + rng.uniform(0.1, 0.9))
            r = rng.uniform(1.0, 3.0)
            pts.append((r * math.cos(t), r * math.sin(t)))
        q = QuadConfig(tuple(pts))
        if min(q.deltas) > 0.3:
            return q


def residual_table(label, fp, hs):
    rows = [structure_residuals(fp, h) for h in hs]
    print(f"\n{label}")
    print("  h        " + "".join(f"{k:>15s}" for k in KEYS))
    for r in rows:
        d = r.as_dict()
        print(f"  {r.h:<8.0e} " + "".join(f"{d[k]:15.2e}" for k in KEYS))
    orders = []
    for k in KEYS:
        vals = [r.as_dict()[k] for r in rows]
        if vals[0] <= 1e-12:
            orders.append("exact")
        else:
            o = min(math.log10(vals[i] / vals[i + 1]) for i in range(len(vals) - 1))
            orders.append(f"{o:.2f}")
    print("  order    " + "".join(f"{o:>15s}" for o in orders))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--grid", type=int, default=FamilyConfig.grid)
    ap.add_argument("--radius", type=float, default=FamilyConfig.radius)
    ap.add_argument("--bend", type=float, default=FamilyConfig.bend)
    ap.add_argument("--random-bases", type=int, default=FamilyConfig.random_bases)
    ap.add_argument("--json", help="write the square-family report here")
    args = ap.parse_args()
    cfg = FamilyConfig(grid=args.grid, radius=args.radius, bend=args.bend, random_bases=args.random_bases)

    base = square_orbit(cfg.base_x, cfg.base_y)
    flat = midpoint_family(base, cfg.radius, cfg.grid)
    bent = midpoint_family(base, cfg.radius, cfg.grid, bend=cfg.bend)
    residual_table(f"square orbit at ({cfg.base_x}, {cfg.base_y}), flat chart", flat, cfg.hs)
    residual_table(f"same family, bent chart (bend {cfg.bend})", bent, cfg.hs)

    rng = random.Random(cfg.seed)
    for k in range(cfg.random_bases):
        q = random_convex_quad(rng)
        fp = midpoint_family(q, cfg.radius, cfg.grid, bend=cfg.bend)
        residual_table(f"random convex base #{k}, bent chart", fp, cfg.hs)

    ctrl = rotation_family(base, (0.5, 0.5), 0.1, 5)
    print(f"\nnegative control (rotating z1): max |theta| = {family_residual(ctrl, h=1e-5, analytic=False):.3e}")

    rep = family_check_report(flat, cfg.hs)
    us = [u for u in rep["u"] if u is not None]
    vs = [v for v in rep["v"] if v is not None]
    print(
        f"\n(v, u) on the flat square family: v in [{min(vs):.6f}, {max(vs):.6f}], "
        f"max |u - 1| = {max(abs(u - 1) for u in us):.2e}, cases = {sorted(set(rep['cases']))}"
    )
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(rep, fh, indent=2)


if __name__ == "__main__":
    main()
