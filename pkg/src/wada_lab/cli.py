"""Command-line front end: ``wada-lab <subcommand> [options]``.

Exit codes: 0 when every check passes, 1 when a check fails, 2 on usage errors.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import families
from .families import EPS0

OK, CHECK_FAILED, USAGE = 0, 1, 2


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def out_dir(args) -> Path:
    d = Path(args.out or os.environ.get("WADA_LAB_OUT") or "out")
    d.mkdir(parents=True, exist_ok=True)
    return d


def _resolution(text: str) -> int:
    r = int(text)
    if not 64 <= r <= 8192:
        raise argparse.ArgumentTypeError("resolution must lie in [64, 8192]")
    return r


def _positive(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _eps(text: str) -> float:
    """A float, or ``eps0`` for the exact critical parameter."""
    return EPS0 if text.lower() == "eps0" else float(text)


class UsageError(Exception):
    pass


def _family(name: str) -> str:
    try:
        return families.canonical_name(name)
    except KeyError:
        raise UsageError(f"unknown family {name!r}; choose from {', '.join(families.registry())}")


def _param_name(fam: str) -> str | None:
    params = families.registry()[fam]["params"]
    return next(iter(params), None)


def _check_domain(fam: str, values) -> None:
    name = _param_name(fam)
    if name is None:
        return
    lo, hi = families.registry()[fam]["params"][name]
    for v in values:
        if not lo <= v <= hi:
            raise UsageError(f"{name}={v} outside the domain [{lo}, {hi}] of {fam}")


def _circle_lift(fam: str, value):
    obj = families.build(fam, **({_param_name(fam): value} if value is not None else {}))
    if isinstance(obj, families.ChainMap):
        if obj.kind != "phi":
            raise UsageError(f"{fam} acts on a chain of circles, not on one circle")
        obj = families.quotient_lift(obj)
    return obj


# ------------------------------------------------------------------ rotset

ROT_FIELDS = ["family", "param", "value", "lo", "lo_exact", "hi", "hi_exact", "error_bound", "width"]


def rotation_row(fam: str, value, tol: float) -> dict:
    """Rotation interval of one family member (top level so worker processes can pickle it)."""
    from .rotation import rotation_interval
    ri = rotation_interval(_circle_lift(fam, value), tol)
    return {"family": fam, "param": _param_name(fam) or "", "value": value,
            "lo": ri.lo.value, "lo_exact": ri.lo.format_exact(), "hi": ri.hi.value,
            "hi_exact": ri.hi.format_exact(), "error_bound": max(ri.lo.error_bound, ri.hi.error_bound),
            "width": ri.width}


def _values(args, fam: str) -> list:
    name = _param_name(fam)
    if name is None:
        return [None]
    vals = getattr(args, name, None)
    if vals is None:
        return [families.registry()[fam]["default"][name]]
    _check_domain(fam, vals)
    return list(vals)


def _emit(rows, fields, fmt_json: bool, stream=None) -> None:
    stream = stream or sys.stdout
    if fmt_json:
        json.dump(rows, stream, indent=2, default=float)
        stream.write("\n")
        return
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(fields)
    for r in rows:
        w.writerow([fmt(r[f]) for f in fields])


def _tol(args) -> float:
    return 1.0 / args.iters if args.iters else args.tol


def cmd_rotset(args) -> int:
    fam = _family(args.family)
    rows = [rotation_row(fam, v, _tol(args)) for v in _values(args, fam)]
    _emit(rows, ROT_FIELDS, args.json)
    return OK


# ------------------------------------------------------------------- sweep

def _map(fn, items, workers: int):
    if workers == 1:
        return [fn(*it) for it in items]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, *zip(*items)))  # map keeps input order


def sweep_verdicts(rows) -> dict:
    hi = np.array([r["hi"] for r in rows])
    lo = np.array([r["lo"] for r in rows])
    jumps = np.abs(np.diff(np.stack([lo, hi]), axis=1)) if len(rows) > 1 else np.zeros((2, 0))
    return {"strictly_increasing": bool(np.all(np.diff(hi) > 0)),
            "symmetric": bool(np.all(np.abs(lo + hi) < 1e-6)),
            "max_symmetry_defect": float(np.abs(lo + hi).max()),
            "max_adjacent_jump": float(jumps.max()) if jumps.size else 0.0}


def cmd_sweep(args) -> int:
    fam = _family(args.family)
    name = _param_name(fam)
    if name is None:
        raise UsageError(f"{fam} has no parameter to sweep")
    if args.steps < 2:
        raise UsageError("--steps must be at least 2")
    a, b = args.range if args.range else families.registry()[fam]["params"][name]
    if not a < b:
        raise UsageError("--range must be nonempty")
    _check_domain(fam, (a, b))
    grid = np.linspace(a, b, args.steps)
    tol = _tol(args)
    rows = _map(rotation_row, [(fam, float(v), tol) for v in grid], args.workers)
    _emit(rows, ROT_FIELDS, args.json)
    if not args.json:
        for k, v in sweep_verdicts(rows).items():
            print(f"# {k}: {fmt(v) if isinstance(v, float) else str(v).lower()}")
    return OK


# ------------------------------------------------------------ render / wada

def _disk_map(args):
    from .chart import PantsMap, five_piece_annulus
    fam = _family(args.family)
    if fam in ("phi", "phi_star"):
        eps = args.eps[0] if args.eps else EPS0
        _check_domain(fam, [eps])
        if not eps > 0:
            raise UsageError("eps must be positive")
        return PantsMap(eps)
    if fam == "five_piece":
        return five_piece_annulus(args.variant)
    raise UsageError(f"no disk model for family {fam}")


def _approx(dm, args):
    from .attract import attractor_approx, choose_depth
    if args.depth is not None:
        return attractor_approx(dm, args.depth, args.res)
    return choose_depth(dm, args.res)


def _save(img, stem: Path) -> list:
    from .attract import write_pgm, write_png
    paths = [stem.parent / (stem.name + ext) for ext in (".pgm", ".png")]
    write_pgm(paths[0], img)
    write_png(paths[1], img)
    return [str(q) for q in paths]


def _rotation_data(dm) -> dict:
    from .rotation import rotation_interval
    ri = rotation_interval(dm.lift)
    return {"lo": ri.lo.value, "lo_exact": ri.lo.format_exact(),
            "hi": ri.hi.value, "hi_exact": ri.hi.format_exact()}


def cmd_render(args) -> int:
    dm = _disk_map(args)
    ap = _approx(dm, args)
    d = out_dir(args)
    img = np.where(ap.band, 0, 255).astype(np.uint8)
    files = _save(img, d / f"attractor_{dm.name}")
    report = {"map": dm.name, "N": ap.depth, "res": ap.res, "points": ap.points,
              "d_H_history": ap.dh_history, "rotation_data": _rotation_data(dm), "files": files}
    from .attract import write_report
    write_report(d / f"attractor_{dm.name}.json", report)
    print(json.dumps({k: report[k] for k in ("map", "N", "d_H_history")}, default=float))
    return OK


def cmd_wada(args) -> int:
    from .attract import basin_image, basin_label, control_pattern, wada_score, write_report
    dm = _disk_map(args)
    ap = _approx(dm, args)
    bg = basin_label(dm, ap.depth, args.res, ap)
    scores = wada_score(bg, args.k)
    control = wada_score(control_pattern(), args.k)
    d = out_dir(args)
    files = _save(basin_image(bg), d / f"basins_{dm.name}")
    passed = len(scores) >= 3 and all(v >= args.threshold for v in scores.values())
    report = {"map": dm.name, "N": ap.depth, "res": args.res, "k": args.k,
              "d_H_history": ap.dh_history, "wada_scores": {str(c): v for c, v in scores.items()},
              "control_scores": {str(c): v for c, v in control.items()},
              "threshold": args.threshold, "passed": passed,
              "rotation_data": _rotation_data(dm), "files": files}
    write_report(d / f"wada_{dm.name}.json", report)
    print(json.dumps({k: report[k] for k in ("N", "wada_scores", "control_scores", "passed")},
                     default=float))
    return OK if passed else CHECK_FAILED


# ------------------------------------------------------------------ access

def cmd_access(args) -> int:
    from .attract import accessible_arc, fixed_arc_access
    from .chart import C0, C1, C2, PantsMap
    dm = _disk_map(args)
    if isinstance(dm, PantsMap):
        comp = C2
    else:
        comp = C0 if args.side == "in" else C1
    arc = accessible_arc(dm, comp, args.depth if args.depth is not None else 20)
    report = {"map": dm.name, "side": args.side, "point": arc.point, "endpoint": arc.endpoint,
              "rotation": arc.rho.value, "rotation_exact": arc.rho.format_exact(),
              "backward_average": arc.backward, "radial": arc.radial,
              "orbit_in_climbing_set": arc.orbit_in_set, "climbing_set": arc.climbing}
    if not isinstance(dm, PantsMap) and comp == C0:
        acc = fixed_arc_access(dm, samples=1000)
        report["fixed_arc"] = acc
        report["fixed_arc_accessible"] = acc["landing"] > 0
    json.dump(report, sys.stdout, indent=2, default=float)
    sys.stdout.write("\n")
    return OK if arc.orbit_in_set else CHECK_FAILED


# ----------------------------------------------------------------- entropy

def cmd_entropy(args) -> int:
    from .families import entropy_closed_form, lap_growth
    fam = _family(args.family)
    rows = []
    passed = True
    for v in _values(args, fam):
        est = lap_growth(_circle_lift(fam, v), args.laps)
        row = {"family": fam, "value": v, "laps": args.laps, "lap_growth": est,
               "closed_form": None, "rel_error": None}
        if fam in ("phi", "phi_star"):
            cf = entropy_closed_form(v)
            row.update(closed_form=cf, rel_error=abs(est - cf) / cf)
            passed &= row["rel_error"] < 0.05
        rows.append(row)
    _emit(rows, ["family", "value", "laps", "lap_growth", "closed_form", "rel_error"], args.json)
    return OK if passed else CHECK_FAILED


# ---------------------------------------------------------------- selftest

def cmd_selftest(args) -> int:
    from .acceptance import CRITERIA
    chosen = CRITERIA if not args.only else [CRITERIA[i - 1] for i in args.only]
    results = []
    for fn in chosen:
        chk = fn()
        print(chk.line(), flush=True)
        results.append(chk)
    print(f"{sum(c.passed for c in results)}/{len(results)} passed")
    return OK if all(c.passed for c in results) else CHECK_FAILED


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wada-lab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="cmd", required=True)

    def common(sp, family=None):
        sp.add_argument("--family", default=family, required=family is None)
        sp.add_argument("--eps", type=_eps, nargs="+", help="values, or eps0")
        sp.add_argument("--t", type=float, nargs="+")
        sp.add_argument("--out", help="output directory (default $WADA_LAB_OUT or ./out)")
        sp.add_argument("--json", action="store_true", help="JSON instead of CSV")
        return sp

    def numeric(sp):
        sp.add_argument("--tol", type=_positive, default=1e-5)
        sp.add_argument("--iters", type=int, help="orbit length; overrides --tol")
        return sp

    def disk(sp):
        sp.add_argument("--res", type=_resolution, default=1024)
        sp.add_argument("--depth", type=int, help="fixed depth instead of the 2-pixel rule")
        sp.add_argument("--variant", choices=["A", "B"], default="A")
        return sp

    numeric(common(sub.add_parser("rotset", help="rotation interval per parameter value")))
    sp = numeric(common(sub.add_parser("sweep", help="rotation intervals over a parameter range")))
    sp.add_argument("--range", type=_eps, nargs=2, metavar=("A", "B"))
    sp.add_argument("--steps", type=int, default=25)
    sp.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    disk(common(sub.add_parser("render", help="attractor approximation image"), "phi"))
    sp = disk(common(sub.add_parser("wada", help="basin labels and Wada scores"), "phi"))
    sp.add_argument("--k", type=int, default=3, help="neighbourhood radius in pixels")
    sp.add_argument("--threshold", type=float, default=0.99)
    sp = disk(common(sub.add_parser("access", help="accessible arcs and their rotation data"),
                     "five_piece"))
    sp.add_argument("--side", choices=["in", "out"], default="in")
    sp = common(sub.add_parser("entropy", help="lap-growth entropy estimate"), "phi")
    sp.add_argument("--laps", type=int, default=12)
    sp = sub.add_parser("selftest", help="run the acceptance suite")
    sp.add_argument("--only", type=int, nargs="+", choices=range(1, 12), metavar="N")
    return p


COMMANDS = {"rotset": cmd_rotset, "sweep": cmd_sweep, "render": cmd_render, "wada": cmd_wada,
            "access": cmd_access, "entropy": cmd_entropy, "selftest": cmd_selftest}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.cmd](args)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(f"wada-lab: error: {e}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
