"""Period-4 scan over a corpus of random lattice polygons.

For every table the exact scan verdict is compared with the parallelogram
test on its corners, and the outcome is written as one JSON line per table.

    python3 scripts/scan_corpus.py --count 40 --out corpus.jsonl
"""
import argparse
import json
import math
import random
import time
from collections import Counter
from dataclasses import asdict, dataclass

from outer_billiard.geometry import TableError, parallelogram_corners, polygon
from outer_billiard.periodic import period4_scan, worker_count


@dataclass
class CorpusConfig:
    count: int = 30
    min_vertices: int = 4
    max_vertices: int = 7
    radius: int = 8
    seed: int = 0
    with_parallelograms: float = 0.3  # share of tables built around a parallelogram


def random_lattice_polygon(rng: random.Random, n: int, radius: int):
    while True:
        pts = []
        for k in range(n):
            t = 2 * math.pi * (k + rng.uniform(0.05, 0.9)) / n
            r = rng.uniform(radius / 3, radius)
            pts.append((round(r * math.cos(t)), round(r * math.sin(t))))
        try:
            return polygon(pts)
        except TableError:
            continue


def polygon_around_parallelogram(rng: random.Random, n: int, radius: int):
    # scale up so the extra vertices can sit on lattice points outside each edge
    while True:
        b = (rng.randint(2, radius), rng.randint(-2, 2))
        d = (rng.randint(-2, 2), rng.randint(2, radius))
        corners = [(0, 0), b, (b[0] + d[0], b[1] + d[1]), d]
        corners = [(4 * x, 4 * y) for x, y in corners]
        pts = []
        extra = set(rng.sample(range(4), min(4, n - 4)))
        for i, p in enumerate(corners):
            pts.append(p)
            if i in extra:
                q = corners[(i + 1) % 4]
                ex, ey = q[0] - p[0], q[1] - p[1]
                g = math.gcd(ex, ey) or 1
                pts.append(((p[0] + q[0]) // 2 + ey // g, (p[1] + q[1]) // 2 - ex // g))
        try:
            return polygon(pts)
        except TableError:
            continue


def build_corpus(cfg: CorpusConfig):
    rng = random.Random(cfg.seed)
    out = []
    for _ in range(cfg.count):
        n = rng.randint(cfg.min_vertices, cfg.max_vertices)
        if rng.random() < cfg.with_parallelograms:
            out.append(polygon_around_parallelogram(rng, min(n, 8), cfg.radius))
        else:
            out.append(random_lattice_polygon(rng, n, cfg.radius))
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for name, val in asdict(CorpusConfig()).items():
        ap.add_argument(f"--{name.replace('_', '-')}", type=type(val), default=val)
    ap.add_argument("--out", default=None)
    args = vars(ap.parse_args())
    out = args.pop("out")
    cfg = CorpusConfig(**args)

    rows = []
    tally = Counter()
    for i, table in enumerate(build_corpus(cfg)):
        t0 = time.perf_counter()
        rep = period4_scan(table, workers=worker_count())
        pars = parallelogram_corners(table)
        row = {
            "index": i,
            "n": table.n,
            "vertices": table.to_json()["vertices"],
            "parallelograms": [list(p) for p in pars],
            "cells_examined": rep.cells_examined,
            "nonempty": rep.nonempty,
            "zero_translation": len(rep.zero_translation),
            "verdict": rep.verdict,
            "seconds": round(time.perf_counter() - t0, 3),
        }
        rows.append(row)
        tally[(bool(pars), rep.verdict)] += 1
        print(f"{i:3d}  n={table.n}  parallelograms={len(pars)}  nonempty={rep.nonempty:4d}  {rep.verdict}")

    print("\nparallelogram corners  verdict                count")
    for (has, verdict), k in sorted(tally.items()):
        print(f"{str(has):22s} {verdict:22s} {k}")
    if tally[(False, "open-period-4-set")]:
        print("WARNING: open period-4 set without parallelogram corners")
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            for row in rows:
                fh.write(json.dumps(row) + "\n")


if __name__ == "__main__":
    main()
