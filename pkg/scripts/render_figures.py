"""Render the standard figures into a directory of SVG files.

    python3 scripts/render_figures.py --out figures
"""
import argparse
import math
from dataclasses import dataclass
from pathlib import Path

from outer_billiard.dynamics import orbit, singular_lines
from outer_billiard.geometry import load_table
from outer_billiard.periodic import default_region, period4_scan
from outer_billiard.render import Style, render_svg

TABLES = Path(__file__).resolve().parent.parent / "tables"


@dataclass
class FigureConfig:
    out: str = "figures"
    singular_depth: int = 6
    inflate: int = 6
    orbit_steps: int = 400


def _load(name):
    return load_table((TABLES / f"{name}.json").read_text())


def scan_figure(name, cfg, style):
    table = _load(name)
    region = default_region(table, cfg.inflate)
    rep = period4_scan(table, region)
    cells = [[(float(x), float(y)) for x, y in c.region] for c in rep.zero_translation]
    box = [float(v) for v in region.bounds()]
    segs = [(s.a, s.b) for s in singular_lines(table, cfg.singular_depth, box).segments]
    return render_svg(table, None, None, segs, cells, box, style, title=f"{name}: {rep.verdict}")


def orbit_figure(name, start, steps, style):
    table = _load(name)
    o = orbit(table, start, steps)
    if o.termination != "completed":
        print(f"  note: {name} orbit stopped at step {o.stop_step} ({o.termination})")
    tans = [table.vertices[i] for i in o.itinerary] if table.kind == "polygon" else None
    return render_svg(table, o.points, tans, None, None, None, style, title=f"{name}: {len(o.points) - 1} steps")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=FigureConfig.out)
    ap.add_argument("--singular-depth", type=int, default=FigureConfig.singular_depth)
    args = ap.parse_args()
    cfg = FigureConfig(out=args.out, singular_depth=args.singular_depth)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    style = Style()

    figures = {
        "square_cells.svg": scan_figure("square", cfg, style),
        "parallelogram_cells.svg": scan_figure("parallelogram", cfg, style),
        "quad_singular.svg": scan_figure("quad", cfg, style),
        "hexagon_singular.svg": scan_figure("hexagon", cfg, style),
        "square_orbit.svg": orbit_figure("square", ("3/10", "-2/5"), 4, style),
        "quad_orbit.svg": orbit_figure("quad", ("3713/1000", "-1097/1000"), 60, style),
        "circle_ring.svg": orbit_figure("circle", (math.sqrt(2), 0.0), 4, style),
        "ellipse_orbit.svg": orbit_figure("ellipse", (3.3, 0.7), cfg.orbit_steps, Style(digits=3)),
    }
    for fname, svg in figures.items():
        (out / fname).write_text(svg, encoding="utf-8")
        print(f"wrote {out / fname} ({len(svg)} bytes)")


if __name__ == "__main__":
    main()
