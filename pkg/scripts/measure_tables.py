"""Monte Carlo period-n fractions next to the exact scan verdict.

Polygon tables get both the exact cell scan and a sampled estimate on their
bounding annulus; ellipses get the sampled estimate plus a Gauss-Newton
search for period-4 points started along the major axis.

    python3 scripts/measure_tables.py --samples 100000
"""
import argparse
import math
from dataclasses import dataclass, field
from pathlib import Path

from outer_billiard.geometry import load_table
from outer_billiard.periodic import (
    RefinementError,
    bounding_annulus,
    measure_estimate,
    period4_scan,
    refine_periodic_smooth,
    worker_count,
)

TABLES = Path(__file__).resolve().parent.parent / "tables"


@dataclass
class MeasureConfig:
    tables: list = field(default_factory=lambda: ["square", "parallelogram", "quad", "hexagon", "circle", "ellipse"])
    periods: tuple = (3, 4, 6)
    samples: int = 20_000
    tol: float = 1e-9
    seed: int = 0
    partitions: int = 8
    refine_starts: tuple = (1.2, 1.5, 2.0, 3.0)


def measure_row(name, table, cfg: MeasureConfig):
    region = bounding_annulus(table)
    cells = []
    for n in cfg.periods:
        est = measure_estimate(
            table, region, n, tol=cfg.tol, samples=cfg.samples, seed=cfg.seed,
            partitions=cfg.partitions, workers=worker_count(),
        )
        cells.append(f"{est.fraction:.4f} [{est.low:.4f}, {est.high:.4f}]")
    verdict = period4_scan(table).verdict if table.kind == "polygon" else "-"
    return f"{name:14s} {verdict:18s} " + "  ".join(cells)


def ellipse_rings(name, table, cfg: MeasureConfig):
    (cx, cy), (a, b) = table.center, table.semi_axes
    for d in cfg.refine_starts:
        z0 = (d * a, 0.0)
        try:
            r = refine_periodic_smooth(table, z0, 4)
        except RefinementError as exc:
            print(f"  {name} from {z0}: no period-4 point ({exc})")
            continue
        # affine images of the circle carry the image of the radius-sqrt(2) ring
        rho = math.hypot((r.point[0] - cx) / a, (r.point[1] - cy) / b)
        print(
            f"  {name} from ({z0[0]:.2f}, 0): z = ({r.point[0]:.9f}, {r.point[1]:.9f}) "
            f"rescaled radius {rho:.9f} residual {r.residual:.1e} "
            f"{'degenerate' if r.degenerate else 'isolated'} after {r.iterations} steps"
        )


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=MeasureConfig.samples)
    ap.add_argument("--seed", type=int, default=MeasureConfig.seed)
    ap.add_argument("--tol", type=float, default=MeasureConfig.tol)
    ap.add_argument("--tables", nargs="*", default=None)
    args = ap.parse_args()
    cfg = MeasureConfig(samples=args.samples, seed=args.seed, tol=args.tol)
    if args.tables:
        cfg.tables = args.tables

    header = "  ".join(f"period {n:<17d}" for n in cfg.periods)
    print(f"{'table':14s} {'scan verdict':18s} {header}")
    loaded = {}
    for name in cfg.tables:
        table = load_table((TABLES / f"{name}.json").read_text())
        loaded[name] = table
        print(measure_row(name, table, cfg))
    smooth = [n for n, t in loaded.items() if t.kind == "ellipse"]
    if smooth:
        print("\nperiod-4 refinement on smooth tables")
        for name in smooth:
            ellipse_rings(name, loaded[name], cfg)


if __name__ == "__main__":
    main()
