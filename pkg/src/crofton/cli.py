"""Command-line front end.

Subcommands: ``variation``, ``perimeter``, ``classify``, ``boundary``,
``verify``, ``study``.  All emit deterministic CSV (default) or JSON rows:
identical inputs and flags produce byte-identical output regardless of the
CROFTON_THREADS worker count.  Exit codes: 0 success, 1 errors or failed
verification, 2 saturation-flagged results.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import corpus as corpus_mod
from .boundary import (
    Notion,
    classify_point,
    classify_raster,
    extract_boundary_poly,
    extract_boundary_voxel,
)
from .density import RadiusSchedule
from .errors import CroftonError
from .geometry import Domain, Raster, RasterGrid, SetExpr, contains_many
from .intervals import measure_pairs
from .scenes import Scene, fmt_float, load_scene, read_rset, write_rset
from .variation import (
    DirectionSet,
    axis_variation_exact,
    check_finiteness,
    check_perimeter_vs_boundary_measure,
    check_variation_vs_projection,
    crofton_perimeter,
    directional_variation,
    ig_measure,
    projection_measure,
)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_SATURATED = 2


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return fmt_float(v)
    if isinstance(v, (tuple, list, np.ndarray)):
        return ";".join(fmt_float(float(t)) for t in v)
    return str(v)


def emit_rows(columns: list[str], rows: list[dict], fmt: str, out_path) -> None:
    if fmt == "json":
        payload = [{c: row.get(c) for c in columns} for row in rows]
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    else:
        lines = [",".join(columns)]
        for row in rows:
            lines.append(",".join(_cell(row.get(c)) for c in columns))
        text = "\n".join(lines) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


VARIATION_COLUMNS = ["case", "quantity", "tau", "axis", "value", "error_bound",
                     "stderr", "h", "K", "max_hits", "lines", "strategy",
                     "saturated", "excluded_parallel"]


def report_row(rep, case: str = "", axis=None) -> dict:
    p = rep.params
    return {
        "case": case, "quantity": rep.quantity,
        "tau": p.get("tau"), "axis": p.get("axis", axis),
        "value": rep.value, "error_bound": rep.error_bound, "stderr": rep.stderr,
        "h": p.get("h"), "K": p.get("K"), "max_hits": p.get("max_hits"),
        "lines": p.get("lines"), "strategy": p.get("strategy"),
        "saturated": rep.saturated, "excluded_parallel": rep.excluded_parallel,
    }


def _load_input(args) -> Scene:
    if getattr(args, "scene", None):
        return load_scene(args.scene)
    if getattr(args, "raster", None):
        grid = read_rset(args.raster)
        return Scene(dim=grid.dim, expr=Raster(grid), omega=Domain.all_space(),
                     name=args.raster)
    raise CroftonError("one of --scene or --raster is required")


def _parse_tau(text: str) -> np.ndarray:
    tau = np.asarray([float(t) for t in text.split(",")], dtype=float)
    norm = float(np.linalg.norm(tau))
    if norm == 0.0:
        raise CroftonError("--tau must be a nonzero vector")
    return tau / norm


def _schedule(args) -> RadiusSchedule:
    return RadiusSchedule(r0=args.r0, ratio=args.ratio, count=args.count,
                          window=args.window)


# ---------------------------------------------------------------------------
# subcommands


def cmd_variation(args) -> int:
    scene = _load_input(args)
    rows = []
    saturated = False
    if args.exact or (args.axis is not None and args.tau is None
                      and isinstance(scene.expr, Raster)):
        if not isinstance(scene.expr, Raster):
            raise CroftonError("--exact needs a raster input")
        axis = args.axis if args.axis is not None else 0
        rep = axis_variation_exact(scene.expr.grid, axis)
        rows.append(report_row(rep, scene.name, axis=axis))
    else:
        if args.tau is not None:
            tau = _parse_tau(args.tau)
        elif args.axis is not None:
            tau = np.zeros(scene.dim)
            tau[args.axis] = 1.0
        else:
            raise CroftonError("variation needs --tau or --axis")
        rep = directional_variation(scene.expr, scene.omega, tau,
                                    spacing=args.h, max_hits=args.max_hits)
        saturated |= rep.saturated
        rows.append(report_row(rep, scene.name))
    emit_rows(VARIATION_COLUMNS, rows, args.format, args.out)
    return EXIT_SATURATED if saturated else EXIT_OK


def cmd_perimeter(args) -> int:
    scene = _load_input(args)
    rep = crofton_perimeter(scene.expr, scene.omega, args.K,
                            spacing=args.h, max_hits=args.max_hits)
    emit_rows(VARIATION_COLUMNS, [report_row(rep, scene.name)], args.format, args.out)
    return EXIT_SATURATED if rep.saturated else EXIT_OK


CLASSIFY_COLUMNS = ["case", "x", "notion", "verdict", "upper_a", "upper_complement",
                    "lower_a", "lower_complement", "error_bound", "margin"]


def cmd_classify(args) -> int:
    scene = _load_input(args)
    notion = Notion.parse(args.notion)
    sched = _schedule(args)
    if args.point:
        x = [float(t) for t in args.point.split(",")]
        lbl = classify_point(scene.expr, x, notion, sched, tol=args.tol)
        row = {"case": scene.name, "x": x, "notion": str(notion),
               "verdict": lbl.verdict}
        row.update({k: lbl.margins[k] for k in
                    ("upper_a", "upper_complement", "lower_a", "lower_complement",
                     "error_bound", "margin")})
        emit_rows(CLASSIFY_COLUMNS, [row], args.format, args.out)
        return EXIT_OK
    if not isinstance(scene.expr, Raster):
        raise CroftonError("raster-mode classify needs a raster input (or use --point)")
    if not args.out:
        raise CroftonError("raster-mode classify writes a mask: --out is required")
    mask = classify_raster(scene.expr.grid, notion, sched, tol=args.tol)
    write_rset(args.out, scene.expr.grid, payload=mask)
    return EXIT_OK


def cmd_boundary(args) -> int:
    scene = _load_input(args)
    rows = []
    if isinstance(scene.expr, Raster):
        b = extract_boundary_voxel(scene.expr.grid)
        columns = ["index", "axis", "coord", "lower", "sign"]
        idx = 0
        for rec in b.faces:
            for k in range(rec["coord"].size):
                rows.append({"index": idx, "axis": rec["axis"],
                             "coord": float(rec["coord"][k]),
                             "lower": rec["lower"][k],
                             "sign": int(rec["sign"][k])})
                idx += 1
    else:
        b = extract_boundary_poly(scene.expr, omega=scene.omega)
        columns = ["index", "p0", "p1"]
        for k in range(b.segments.shape[0]):
            rows.append({"index": k, "p0": b.segments[k, 0], "p1": b.segments[k, 1]})
    emit_rows(columns, rows, args.format, args.out)
    return EXIT_OK


VERIFY_COLUMNS = ["case", "check", "tau", "value_a", "value_b", "value_c",
                  "gap", "tolerance", "pass"]


def _verify_case(scene: Scene, args) -> tuple[list[dict], bool, bool]:
    rows = []
    ok = True
    saturated = False
    tol = scene.tolerance if scene.tolerance is not None else args.tol
    ref = scene.reference.get("perimeter")

    if scene.dim == 3:
        rep = crofton_perimeter(scene.expr, scene.omega, args.K3,
                                spacing=args.h3, max_hits=args.max_hits)
        saturated |= rep.saturated
        gap = abs(rep.value - ref) / ref if ref else 0.0
        rows.append({"case": scene.name, "check": "perimeter_reference",
                     "tau": None, "value_a": rep.value, "value_b": ref,
                     "value_c": None, "gap": gap, "tolerance": tol,
                     "pass": gap <= tol})
        ok &= gap <= tol
        return rows, ok, saturated

    boundary = None
    if isinstance(scene.expr, Raster):
        boundary = extract_boundary_voxel(scene.expr.grid)
    else:
        boundary = extract_boundary_poly(scene.expr, omega=scene.omega)

    ang = (np.arange(args.directions) + 0.5) * math.pi / args.directions
    empty_case = boundary.is_empty
    for theta in ang:
        tau = np.array([math.cos(theta), math.sin(theta)])
        cmp = check_variation_vs_projection(
            scene.expr, scene.omega, tau, boundary=boundary,
            spacing=args.h, max_hits=args.max_hits)
        saturated |= cmp.p_tau.saturated or cmp.mu_essential.saturated
        scale = max(abs(cmp.p_tau.value), abs(cmp.mu_essential.value))
        gap = cmp.max_gap if scale > 1e-9 else 0.0
        passed = gap <= tol if not empty_case else cmp.p_tau.value == 0.0
        rows.append({"case": scene.name, "check": "variation_projection",
                     "tau": tuple(tau), "value_a": cmp.p_tau.value,
                     "value_b": cmp.mu_essential.value,
                     "value_c": cmp.mu_preponderant.value,
                     "gap": gap, "tolerance": tol, "pass": passed})
        ok &= passed

    pc = check_perimeter_vs_boundary_measure(
        scene.expr, scene.omega, boundary=boundary, dirs=args.K,
        spacing=args.h, max_hits=args.max_hits)
    saturated |= pc.crofton.saturated or pc.boundary_measure.saturated
    gap = pc.gap if max(abs(pc.crofton.value), abs(pc.boundary_measure.value)) > 1e-9 else 0.0
    rows.append({"case": scene.name, "check": "perimeter_igmeasure", "tau": None,
                 "value_a": pc.crofton.value, "value_b": pc.boundary_measure.value,
                 "value_c": None, "gap": gap, "tolerance": tol, "pass": gap <= tol})
    ok &= gap <= tol

    if ref is not None and ref > 0:
        gap = abs(pc.crofton.value - ref) / ref
        rows.append({"case": scene.name, "check": "perimeter_reference",
                     "tau": None, "value_a": pc.crofton.value, "value_b": ref,
                     "value_c": None, "gap": gap, "tolerance": tol,
                     "pass": gap <= tol})
        ok &= gap <= tol

    probe = check_finiteness(scene.expr, scene.omega, np.eye(2),
                             boundary=boundary, spacing=args.h,
                             perimeter_dirs=max(args.K // 4, 16),
                             max_hits=args.max_hits)
    rows.append({"case": scene.name, "check": "finiteness", "tau": None,
                 "value_a": probe.directions[0].value,
                 "value_b": probe.directions[1].value,
                 "value_c": probe.perimeter.value,
                 "gap": max(d.rel_change for d in probe.directions),
                 "tolerance": 0.05, "pass": probe.all_finite_stable})
    ok &= probe.all_finite_stable
    return rows, ok, saturated


def cmd_verify(args) -> int:
    names = None if args.corpus in (None, "all") else [args.corpus]
    scenes = corpus_mod.builtin_corpus(names)
    rows = []
    all_ok = True
    saturated = False
    for scene in scenes:
        case_rows, ok, sat = _verify_case(scene, args)
        rows.extend(case_rows)
        all_ok &= ok
        saturated |= sat
    emit_rows(VERIFY_COLUMNS, rows, args.format, args.out)
    if not all_ok:
        return EXIT_ERROR
    return EXIT_SATURATED if saturated else EXIT_OK


STUDY_COLUMNS = ["case", "study", "parameter", "value", "reference", "gap", "note"]


def _study_h_refinement(scene: Scene, args) -> list[dict]:
    ref = scene.reference.get("perimeter")
    rows = []
    h = args.h
    for _ in range(args.steps):
        rep = crofton_perimeter(scene.expr, scene.omega, args.K, spacing=h,
                                max_hits=args.max_hits)
        gap = abs(rep.value - ref) / ref if ref else None
        rows.append({"case": scene.name, "study": "h-refinement", "parameter": h,
                     "value": rep.value, "reference": ref, "gap": gap, "note": ""})
        h /= 2.0
    return rows


def _study_k_refinement(scene: Scene, args) -> list[dict]:
    ref = scene.reference.get("perimeter")
    rows = []
    k = max(args.K // 16, 4)
    while k <= args.K:
        rep = crofton_perimeter(scene.expr, scene.omega, k, spacing=args.h,
                                max_hits=args.max_hits)
        gap = abs(rep.value - ref) / ref if ref else None
        rows.append({"case": scene.name, "study": "K-refinement", "parameter": k,
                     "value": rep.value, "reference": ref, "gap": gap, "note": ""})
        k *= 2
    return rows


def _study_checkerboard(args) -> list[dict]:
    rows = []
    values = []
    spacings = []
    for m in (8, 16, 32, 64):
        grid = corpus_mod.checkerboard_raster(m)
        exact = sum(axis_variation_exact(grid, axis).value for axis in (0, 1))
        rep = crofton_perimeter(Raster(grid), Domain.all_space(), args.K,
                                spacing=grid.spacing / 8.0, max_hits=args.max_hits)
        rows.append({"case": f"checkerboard{m}", "study": "checkerboard-divergence",
                     "parameter": grid.spacing, "value": rep.value,
                     "reference": exact, "gap": abs(rep.value - exact) / exact,
                     "note": ""})
        values.append(rep.value)
        spacings.append(grid.spacing)
    slope = float(np.polyfit(np.log(spacings), np.log(values), 1)[0])
    exact_slope = float(np.polyfit(
        np.log(spacings),
        np.log([sum(axis_variation_exact(corpus_mod.checkerboard_raster(m), a).value
                    for a in (0, 1)) for m in (8, 16, 32, 64)]), 1)[0])
    rows.append({"case": "checkerboard", "study": "checkerboard-divergence",
                 "parameter": "exponent", "value": slope, "reference": exact_slope,
                 "gap": abs(slope - exact_slope) / abs(exact_slope),
                 "note": "divergent" if slope < -0.5 else "stable"})
    return rows


def _study_strong_boundary(scene: Scene, args) -> list[dict]:
    from .geometry import bounding_box

    bb = bounding_box(scene.expr)
    if bb is None:
        raise CroftonError("strong-boundary-probe needs a bounded scene")
    notion = Notion.parse(args.notion) if args.notion.startswith("strong") \
        else Notion.strong(args.tol)
    rows = []
    lo, hi = bb
    span = float(np.max(hi - lo)) * 1.2
    center = 0.5 * (lo + hi)
    for m in (16, 32, 64):
        spacing = span / m
        origin = center - 0.5 * span
        sched = RadiusSchedule(r0=4 * spacing, ratio=0.5, count=3, window=3)
        axes = [origin[k] + spacing * (np.arange(m) + 0.5) for k in range(2)]
        fast, slow = np.meshgrid(axes[0], axes[1], indexing="ij")
        centers = np.stack([fast.ravel(), slow.ravel()], axis=1)
        onb = np.zeros(centers.shape[0], dtype=bool)
        for k in range(centers.shape[0]):
            lbl = classify_point(scene.expr, centers[k], notion, sched, tol=args.tol)
            onb[k] = lbl.verdict == "on_boundary"
        mask_grid = RasterGrid(origin, spacing, (m, m), onb.reshape((m, m)))
        for axis in (0, 1):
            # projection-measure proxy: sheet crossings = runs of flagged
            # cells along each grid line
            runs = 0
            occ = mask_grid.occupancy
            moved = np.swapaxes(occ, 0, axis)
            for row in range(moved.shape[1]):
                col = moved[:, row]
                runs += int(np.count_nonzero(np.diff(
                    np.concatenate([[0], col.astype(np.int8), [0]])) == 1))
            value = runs * spacing
            rows.append({"case": scene.name, "study": "strong-boundary-probe",
                         "parameter": spacing, "value": value,
                         "reference": None, "gap": None,
                         "note": f"axis={axis} delta={notion.delta:g}"})
    return rows


def cmd_study(args) -> int:
    rows: list[dict]
    if args.kind == "checkerboard-divergence":
        rows = _study_checkerboard(args)
    else:
        scene = _load_input(args)
        if args.kind == "h-refinement":
            rows = _study_h_refinement(scene, args)
        elif args.kind == "K-refinement":
            rows = _study_k_refinement(scene, args)
        elif args.kind == "strong-boundary-probe":
            sys.stdout.write(
                "# strong-boundary probe: finite-resolution estimates only, "
                "no claim about the underlying boundary measure\n")
            rows = _study_strong_boundary(scene, args)
        else:
            raise CroftonError(f"unknown study kind {args.kind!r}")
    emit_rows(STUDY_COLUMNS, rows, args.format, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing


def _add_io_flags(p: argparse.ArgumentParser, needs_input: bool = True):
    if needs_input:
        p.add_argument("--scene", help="scene JSON path")
        p.add_argument("--raster", help="RSETv1 raster path")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", help="output path (default: stdout)")


def _add_grid_flags(p: argparse.ArgumentParser):
    p.add_argument("--h", type=float, default=1.0 / 1024.0,
                   help="transversal sample spacing")
    p.add_argument("--max-hits", dest="max_hits", type=int, default=4096)


def _add_schedule_flags(p: argparse.ArgumentParser):
    p.add_argument("--r0", type=float, default=1.0)
    p.add_argument("--ratio", type=float, default=0.5)
    p.add_argument("--count", type=int, default=20)
    p.add_argument("--window", type=int, default=6)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="crofton",
        description="Directional variations, Crofton perimeter estimates and "
                    "measure-theoretic boundary classification of CSG/voxel sets.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("variation", help="directional variation of a set")
    _add_io_flags(p)
    _add_grid_flags(p)
    p.add_argument("--tau", help="direction components, e.g. 1,0")
    p.add_argument("--axis", type=int, help="axis index (alternative to --tau)")
    p.add_argument("--exact", action="store_true",
                   help="exact per-axis transition count (rasters only)")
    p.set_defaults(fn=cmd_variation)

    p = sub.add_parser("perimeter", help="direction-averaged perimeter estimate")
    _add_io_flags(p)
    _add_grid_flags(p)
    p.add_argument("--K", type=int, default=360, help="number of directions")
    p.set_defaults(fn=cmd_perimeter)

    p = sub.add_parser("classify", help="boundary-notion classification")
    _add_io_flags(p)
    _add_schedule_flags(p)
    p.add_argument("--point", help="query point, e.g. 0.5,0.5")
    p.add_argument("--notion", default="essential",
                   help="essential | preponderant | strong:DELTA")
    p.add_argument("--tol", type=float, default=1e-2)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_classify)

    p = sub.add_parser("boundary", help="explicit boundary extraction")
    _add_io_flags(p)
    p.set_defaults(fn=cmd_boundary)

    p = sub.add_parser("verify", help="run the built-in verification corpus")
    _add_io_flags(p, needs_input=False)
    _add_grid_flags(p)
    p.add_argument("--corpus", default="all", help="case name or 'all'")
    p.add_argument("--K", type=int, default=180)
    p.add_argument("--K3", type=int, default=128, help="directions for 3-D cases")
    p.add_argument("--h3", type=float, default=1.0 / 192.0, help="spacing for 3-D cases")
    p.add_argument("--directions", type=int, default=4,
                   help="per-direction equality checks per case")
    p.add_argument("--tol", type=float, default=1e-2)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("study", help="convergence and probe tables")
    _add_io_flags(p)
    _add_grid_flags(p)
    p.add_argument("--kind", required=True,
                   choices=("h-refinement", "K-refinement",
                            "checkerboard-divergence", "strong-boundary-probe"))
    p.add_argument("--K", type=int, default=90)
    p.add_argument("--steps", type=int, default=4, help="refinement steps")
    p.add_argument("--notion", default="strong:0.25")
    p.add_argument("--tol", type=float, default=1e-2)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_study)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except CroftonError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
