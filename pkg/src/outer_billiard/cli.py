"""Command line entry point ``obl``.

Exit codes: 0 success, 1 failed check or --expect mismatch, 2 input error,
3 a pointwise operation hit a singular configuration.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Sequence

from . import dynamics, eds, periodic, verify
from .geometry import InteriorPointError, SingularPointError, TableError, Table, load_table, tangency
from .render import Style, render_svg

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_SINGULAR = 0, 1, 2, 3


class InputError(ValueError):
    pass


@dataclass
class RunConfig:
    subcommand: str
    table: Optional[str] = None
    mode: Optional[str] = None
    region: Optional[str] = None
    inflate: float = 3.0
    out: Optional[str] = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.inflate <= 0:
            raise InputError("--inflate must be positive")
        for k in ("tol", "radius"):
            if k in self.params and self.params[k] is not None and self.params[k] <= 0:
                raise InputError(f"--{k} must be positive")
        if self.params.get("samples", 1) < 1:
            raise InputError("--samples must be at least 1")


def _enc(v):
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    return v


def _load(cfg: RunConfig) -> Table:
    try:
        text = Path(cfg.table).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read table: {exc}") from exc
    return load_table(text, mode=cfg.mode)


def _parse_point(text: str):
    parts = text.split(",")
    if len(parts) != 2:
        raise InputError(f"point must be 'x,y', got {text!r}")
    try:
        return tuple(Fraction(p.strip()) for p in parts)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad point coordinate in {text!r}") from exc


def _floats(text: str, n: int, what: str) -> List[float]:
    try:
        vals = [float(Fraction(p.strip())) for p in text.split(",")]
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad {what} {text!r}") from exc
    if len(vals) != n:
        raise InputError(f"{what} needs {n} comma-separated numbers")
    return vals


def _parse_region(text: Optional[str], table: Table, inflate: float):
    if not text:
        return periodic.default_region(table, inflate if not table.exact else Fraction(str(inflate)))
    kind, _, rest = text.partition(":")
    if kind == "box":
        if table.exact:
            try:
                vals = [Fraction(p.strip()) for p in rest.split(",")]
            except (ValueError, ZeroDivisionError) as exc:
                raise InputError(f"bad box {rest!r}") from exc
            if len(vals) != 4:
                raise InputError("box needs xmin,ymin,xmax,ymax")
        else:
            vals = _floats(rest, 4, "box")
        if not (vals[0] < vals[2] and vals[1] < vals[3]):
            raise InputError("box must have xmin < xmax and ymin < ymax")
        return periodic.Box(*vals)
    if kind == "disk":
        cx, cy, r = _floats(rest, 3, "disk")
        if r <= 0:
            raise InputError("disk radius must be positive")
        return periodic.Disk(cx, cy, r)
    if kind == "annulus":
        if not rest:
            return periodic.bounding_annulus(table, inflate)
        cx, cy, r0, r1 = _floats(rest, 4, "annulus")
        if not 0 <= r0 < r1:
            raise InputError("annulus needs 0 <= r_in < r_out")
        return periodic.Annulus(cx, cy, r0, r1)
    raise InputError(f"unknown region {text!r} (box:..., disk:..., annulus[:...])")


def _write(cfg: RunConfig, text: str) -> None:
    if cfg.out:
        Path(cfg.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


# ---------------------------------------------------------------------------
# subcommands


def cmd_step(cfg: RunConfig) -> int:
    table = _load(cfg)
    z = _parse_point(cfg.params["point"])
    t = tangency(table, table.point(z) if table.kind == "polygon" else z)
    if t.singular:
        raise SingularPointError(f"point {cfg.params['point']} lies on a singular line", 0)
    img = dynamics.step(table, z)
    _write(cfg, _dump({
        "point": [_enc(c) for c in (table.point(z) if table.kind == "polygon" else map(float, z))],
        "tangency": [_enc(c) for c in t.tau],
        "vertex": t.index,
        "image": [_enc(c) for c in img],
    }))
    return EXIT_OK


def cmd_orbit(cfg: RunConfig) -> int:
    table = _load(cfg)
    z = _parse_point(cfg.params["point"])
    steps = cfg.params["steps"]
    if steps < 0:
        raise InputError("--steps must be nonnegative")
    sample = dynamics.orbit(table, z, steps)
    _write(cfg, dynamics.orbit_csv(sample))
    if sample.termination == "singular":
        print(f"orbit stopped at step {sample.stop_step}: singular point", file=sys.stderr)
        return EXIT_SINGULAR
    if sample.termination == "interior":
        raise InputError("starting point is not outside the table")
    return EXIT_OK


def cmd_scan4(cfg: RunConfig) -> int:
    table = _load(cfg)
    if table.kind != "polygon":
        raise InputError("scan4 needs a polygon table")
    region = _parse_region(cfg.region, table, cfg.inflate)
    if not isinstance(region, periodic.Box):
        raise InputError("scan4 regions must be boxes")
    report = periodic.period_scan(table, region, cfg.params.get("period", 4), workers=periodic.worker_count())
    _write(cfg, _dump(report.to_json()))
    expect = cfg.params.get("expect")
    if expect and expect != report.verdict:
        print(f"verdict {report.verdict} != expected {expect}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_measure(cfg: RunConfig) -> int:
    table = _load(cfg)
    region = _parse_region(cfg.region or "annulus", table, cfg.inflate)
    if isinstance(region, periodic.Box):
        region = periodic.Box(*(float(v) for v in region.bounds()))
    p = cfg.params
    est = periodic.measure_estimate(
        table, region, p["period"], tol=p["tol"], samples=p["samples"], seed=p["seed"],
        partitions=p["partitions"], exact=cfg.mode == "exact", workers=periodic.worker_count(),
    )
    out = {"table": table.to_json(), "region": region.to_json(), "period": p["period"], "tol": p["tol"],
           "seed": p["seed"], "partitions": p["partitions"]}
    out.update(est.to_json())
    _write(cfg, _dump(out))
    expect = p.get("expect")
    if expect == "zero" and est.periodic != 0:
        return EXIT_FAIL
    if expect == "positive" and est.periodic == 0:
        return EXIT_FAIL
    return EXIT_OK


def cmd_family_check(cfg: RunConfig) -> int:
    p = cfg.params
    if p.get("quad"):
        pts = [_floats(s, 2, "quad vertex") for s in p["quad"].split(";")]
        if len(pts) != 4:
            raise InputError("--quad needs four 'x,y' vertices separated by ';'")
        q0 = eds.QuadConfig(tuple(tuple(v) for v in pts))
    else:
        x1, y1 = _floats(p["base"], 2, "base point")
        q0 = eds.square_orbit(x1, y1)
    try:
        fp = eds.midpoint_family(q0, p["radius"], p["grid"], bend=p["bend"])
    except (eds.FamilyError, eds.DegenerateQuadError) as exc:
        raise SingularPointError(str(exc), None) from exc
    hs = [float(h) for h in p["h"].split(",")]
    report = eds.family_check_report(fp, hs)
    ok = all(
        lvl[k] <= 10 * lvl["h"] ** 2 for lvl in report["levels"] for k in ("dtheta", "rel", "dom", "area_form")
    ) and report["theta_residual"] <= 1e-10 * q0.scale()
    if p.get("expect_special"):
        ok = ok and all(c == "generic" and abs(u - 1) <= 1e-8 for c, u in zip(report["cases"], report["u"]))
    report["pass"] = ok
    _write(cfg, _dump(report))
    return EXIT_OK if ok or not p.get("check") else EXIT_FAIL


def cmd_verify(cfg: RunConfig) -> int:
    names = cfg.params["suite"]
    names = list(verify.SUITES) if names == "all" else [s.strip() for s in names.split(",")]
    unknown = [n for n in names if n not in verify.SUITES]
    if unknown:
        raise InputError(f"unknown suite(s) {unknown}; choose from {sorted(verify.SUITES)} or 'all'")
    results = verify.run_suite(names)
    report = verify.report_json(results)
    for check in report["checks"]:
        check.pop("seconds", None)  # keep reruns byte-identical
    _write(cfg, _dump(report))
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


def cmd_render(cfg: RunConfig) -> int:
    table = _load(cfg)
    p = cfg.params
    orbit = tans = cells = segments = None
    bounds = None
    if p.get("orbit"):
        try:
            rows = dynamics.read_orbit_csv(Path(p["orbit"]).read_text(encoding="utf-8"))
        except (OSError, ValueError, KeyError) as exc:
            raise InputError(f"malformed orbit file: {exc}") from exc
        orbit = [r[0] for r in rows]
        # the last row's tangency belongs to a step that is not drawn
        tans = [r[1] for r in rows[:-1] if r[1] is not None]
    if p.get("report"):
        try:
            rep = json.loads(Path(p["report"]).read_text(encoding="utf-8"))
            cells = [[(float(Fraction(x)), float(Fraction(y))) for x, y in c["region_vertices"]]
                     for c in rep.get("zero_translation", [])]
            reg = rep.get("region", {})
            if reg.get("type") == "box":
                bounds = [float(Fraction(str(v))) for v in reg["bounds"]]
        except (OSError, ValueError, KeyError, TypeError) as exc:
            raise InputError(f"malformed report file: {exc}") from exc
    if p.get("singular_depth") is not None:
        if table.kind != "polygon":
            raise InputError("singular lines are drawn for polygon tables only")
        box = bounds or [float(v) for v in periodic.default_region(table, cfg.inflate).bounds()]
        bounds = box
        arr = dynamics.singular_lines(table, p["singular_depth"], box)
        segments = [(s.a, s.b) for s in arr.segments]
    _write(cfg, render_svg(table, orbit, tans, segments, cells, bounds, Style(), title=p.get("title") or ""))
    return EXIT_OK


COMMANDS = {
    "step": cmd_step,
    "orbit": cmd_orbit,
    "scan4": cmd_scan4,
    "measure": cmd_measure,
    "family-check": cmd_family_check,
    "verify": cmd_verify,
    "render": cmd_render,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="obl", description="Outer billiard experiments.")
    sub = ap.add_subparsers(dest="subcommand", required=True)

    def with_table(p, required=True):
        p.add_argument("--table", required=required, help="table JSON file")
        p.add_argument("--mode", choices=["exact", "float"], default=None)
        p.add_argument("--out", help="output file (default stdout)")

    p = sub.add_parser("step", help="apply the map once")
    with_table(p)
    p.add_argument("--point", required=True, help="x,y (rationals like 3/10 allowed)")

    p = sub.add_parser("orbit", help="iterate and write a CSV")
    with_table(p)
    p.add_argument("--point", required=True)
    p.add_argument("--steps", type=int, required=True)

    p = sub.add_parser("scan4", help="exact period-4 cell scan of a polygon table")
    with_table(p)
    p.add_argument("--region", help="box:xmin,ymin,xmax,ymax (default: inflated bounding box)")
    p.add_argument("--inflate", type=float, default=3.0)
    p.add_argument("--period", type=int, default=4)
    p.add_argument("--expect", choices=["open-period-4-set", "empty-interior"])

    p = sub.add_parser("measure", help="Monte Carlo fraction of period-n points")
    with_table(p)
    p.add_argument("--region", help="box:..., disk:cx,cy,r, annulus[:cx,cy,r0,r1] (default: annulus)")
    p.add_argument("--inflate", type=float, default=3.0)
    p.add_argument("--period", type=int, default=4)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--partitions", type=int, default=8)
    p.add_argument("--expect", choices=["zero", "positive"])

    p = sub.add_parser("family-check", help="EDS residuals on a midpoint family")
    p.add_argument("--base", default="3/10,-2/5", help="base point of the square-table orbit")
    p.add_argument("--quad", help="explicit base quadrilateral 'x1,y1;x2,y2;x3,y3;x4,y4'")
    p.add_argument("--radius", type=float, default=0.04)
    p.add_argument("--grid", type=int, default=11)
    p.add_argument("--bend", type=float, default=0.0)
    p.add_argument("--h", default="1e-2,1e-3,1e-4")
    p.add_argument("--check", action="store_true", help="exit 1 when a residual bound fails")
    p.add_argument("--expect-special", action="store_true", help="also require u = 1 on the grid")
    p.add_argument("--out")

    p = sub.add_parser("verify", help="exact symbolic verification suites")
    p.add_argument("--suite", default="all")
    p.add_argument("--out")

    p = sub.add_parser("render", help="SVG of a table with optional orbit, scan cells, singular lines")
    with_table(p)
    p.add_argument("--orbit", help="orbit CSV")
    p.add_argument("--report", help="scan4 JSON report")
    p.add_argument("--singular-depth", type=int)
    p.add_argument("--inflate", type=float, default=3.0)
    p.add_argument("--title")
    return ap


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    d = dict(vars(ns))
    sub = d.pop("subcommand")
    return RunConfig(
        subcommand=sub,
        table=d.pop("table", None),
        mode=d.pop("mode", None),
        region=d.pop("region", None),
        inflate=d.pop("inflate", 3.0),
        out=d.pop("out", None),
        params=d,
    )


def run(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    try:
        ns = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = config_from_args(ns)
        return COMMANDS[cfg.subcommand](cfg)
    except SingularPointError as exc:
        print(f"singular: {exc}", file=sys.stderr)
        return EXIT_SINGULAR
    except (InputError, TableError, InteriorPointError, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
