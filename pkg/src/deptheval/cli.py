"""Command-line surface: evaluate predictions, run bias experiments, rank tables.

Exit codes: 0 on success, 2 for invalid inputs or flags, 3 for numeric
degeneracy (too few valid pixels, constant predictions, zero baselines).
All results go to files; stdout carries a single summary line.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .align import AlignSpec, RansacConfig, Solver, align_prediction
from .bench import average_rank, emit_report, load_table
from .errors import DegenerateDataError, InsufficientDataError, TableParseError
from .experiments import (
    RobustnessConfig,
    SensitivityConfig,
    emit_curves,
    run_robustness,
    run_sensitivity,
)
from .grid import CameraIntrinsics, Kind, Representation, Space, ValidityMask, intersect_masks
from .gridio import read_csv_grid, read_pfm, read_pointmap_pfm
from .metrics import compute_report

_REPR_FLAGS = {
    "metric": Representation.METRIC_DEPTH,
    "affine-depth": Representation.AFFINE_DEPTH,
    "affine-disparity": Representation.AFFINE_DISPARITY,
    "pointmap": Representation.AFFINE_POINTMAP,
}
_ALIGN_FLAGS = {
    "none": Solver.NONE,
    "lsq": Solver.LSQ,
    "median": Solver.MEDIAN_SCALE,
    "ransac": Solver.RANSAC,
}
_NATURAL_SPACE = {
    Representation.METRIC_DEPTH: Space.DEPTH,
    Representation.AFFINE_DEPTH: Space.DEPTH,
    Representation.AFFINE_DISPARITY: Space.DISPARITY,
    Representation.AFFINE_POINTMAP: Space.DEPTH,
}


def _read_grid(path: str, kind: Kind):
    ext = os.path.splitext(path)[1].lower()
    if ext == ".pfm":
        return read_pfm(path, kind)
    if ext == ".csv":
        return read_csv_grid(path, kind)
    raise ValueError(f"{path}: unsupported grid format {ext!r} (use .pfm or .csv)")


def _read_mask(path: str) -> ValidityMask:
    grid, finite = _read_grid(path, Kind.GENERIC)
    return ValidityMask(finite.bits & (grid.values != 0))


def _cmd_eval(args) -> int:
    representation = _REPR_FLAGS[args.repr]
    space = Space(args.space) if args.space else _NATURAL_SPACE[representation]
    spec = AlignSpec(
        solver=_ALIGN_FLAGS[args.align],
        space=space,
        ransac=RansacConfig(seed=args.ransac_seed),
    )

    gt, gt_ok = _read_grid(args.gt, Kind.DEPTH)
    intrinsics = None
    if representation == Representation.AFFINE_POINTMAP:
        if None in (args.fx, args.fy, args.cx, args.cy):
            raise ValueError("point-map input needs --fx --fy --cx --cy")
        intrinsics = CameraIntrinsics(args.fx, args.fy, args.cx, args.cy)
        pred, pred_ok = read_pointmap_pfm(args.pred)
    else:
        kind = Kind.DISPARITY if representation == Representation.AFFINE_DISPARITY else Kind.DEPTH
        pred, pred_ok = _read_grid(args.pred, kind)

    if (pred_ok.height, pred_ok.width) != (gt.height, gt.width):
        raise ValueError(
            f"dimension mismatch: prediction {pred_ok.width}x{pred_ok.height}, "
            f"ground truth {gt.width}x{gt.height}"
        )
    mask = intersect_masks(pred_ok, gt_ok)
    if args.mask:
        mask = intersect_masks(mask, _read_mask(args.mask))

    aligned, params, mask2 = align_prediction(
        pred, gt, representation, spec, mask, intrinsics=intrinsics
    )
    report = compute_report(aligned, gt, mask2)
    payload = {"metrics": report.to_dict(), "alignment": params.to_dict()}
    with open(args.out, "w", encoding="utf-8") as f:
        json.dump(payload, f, indent=2)
        f.write("\n")
    print(
        f"delta1={report.delta1:.4f} abs_rel={report.abs_rel:.4g} rmse={report.rmse:.4g} "
        f"valid={report.valid_count} scale={params.scale:.6g} shift={params.shift:.6g} "
        f"-> {args.out}"
    )
    return 0


def _parse_sizes(text: str) -> tuple[int, ...]:
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"--sizes wants start:stop:step, got {text!r}")
    start, stop, step = (int(p) for p in parts)
    if step < 1 or start < stop or stop < 1:
        raise ValueError(f"--sizes wants start >= stop >= 1 and step >= 1, got {text!r}")
    return tuple(range(start, stop - 1, -step))


def _cmd_experiment(args) -> int:
    if args.kind == "robustness":
        cfg = RobustnessConfig(
            n=args.n,
            max_disturbance=args.max_disturbance,
            step=args.step,
            noise_scale=args.noise_scale,
            seed=args.seed,
        )
        depth_curve, disp_curve = run_robustness(cfg, max_workers=args.workers)
        curves = [depth_curve, disp_curve]
        summary = (
            f"robustness n={cfg.n} levels={len(cfg.levels())} "
            f"final depth={depth_curve.points[-1][1]:.4f} "
            f"disparity={disp_curve.points[-1][1]:.4f}"
        )
    else:
        modes = tuple(m.strip() for m in args.align.split(",") if m.strip())
        cfg = SensitivityConfig(
            n=args.n,
            sizes=_parse_sizes(args.sizes) if args.sizes else None,
            align_modes=modes,
            seed=args.seed,
        )
        results = run_sensitivity(cfg, max_workers=args.workers)
        curves = [results[m].delta for m in cfg.align_modes]
        curves += [results[m].abs_rel for m in cfg.align_modes]
        summary = f"sensitivity n={cfg.n} sizes={len(cfg.sizes)} modes={','.join(cfg.align_modes)}"

    emit_curves(curves, args.out, "csv")
    outputs = [args.out]
    if args.svg:
        emit_curves(curves, args.svg, "svg")
        outputs.append(args.svg)
    print(f"{summary} -> {', '.join(outputs)}")
    return 0


def _cmd_bench(args) -> int:
    tables = [load_table(p, baseline=args.baseline) for p in args.tables]
    report = average_rank(tables)
    fmt = "json" if args.format == "json" else "markdown"
    text = emit_report(report, fmt)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            f.write(text)
        print(f"ranked {len(report.average_rank)} methods over {len(tables)} tasks -> {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="deptheval",
        description="Depth prediction evaluation: alignment, metrics, bias experiments, ranking.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)
    fmt = argparse.ArgumentDefaultsHelpFormatter

    p = sub.add_parser("eval", help="evaluate a prediction file against ground truth", formatter_class=fmt)
    p.add_argument("--pred", required=True, help="prediction grid (.pfm/.csv; 3-channel .pfm for pointmap)")
    p.add_argument("--gt", required=True, help="ground-truth depth grid (.pfm/.csv)")
    p.add_argument("--mask", default=None, help="optional validity grid; zero/non-finite pixels are invalid")
    p.add_argument("--repr", choices=sorted(_REPR_FLAGS), default="metric", help="prediction representation")
    p.add_argument("--align", choices=sorted(_ALIGN_FLAGS), default="none", help="alignment solver")
    p.add_argument("--space", choices=[s.value for s in Space], default=None,
                   help="alignment space (default: the representation's natural space)")
    p.add_argument("--ransac-seed", type=int, default=0, help="seed for the RANSAC solver")
    p.add_argument("--fx", type=float, default=None, help="focal length x (pointmap only)")
    p.add_argument("--fy", type=float, default=None, help="focal length y (pointmap only)")
    p.add_argument("--cx", type=float, default=None, help="principal point x (pointmap only)")
    p.add_argument("--cy", type=float, default=None, help="principal point y (pointmap only)")
    p.add_argument("--out", required=True, help="output JSON path (metrics + alignment params)")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("experiment", help="run a synthetic alignment-bias experiment", formatter_class=fmt)
    p.add_argument("--kind", choices=["robustness", "sensitivity"], required=True)
    p.add_argument("--n", type=int, default=500, help="grid side length")
    p.add_argument("--max-disturbance", type=float, default=1.8, help="robustness: last noise level")
    p.add_argument("--step", type=float, default=0.05, help="robustness: noise level step")
    p.add_argument("--noise-scale", type=float, default=0.01, help="robustness: sigma per unit level")
    p.add_argument("--sizes", default=None, help="sensitivity: block sizes as start:stop:step (default n:10:10)")
    p.add_argument("--align", default="none,lsq,ransac", help="sensitivity: comma list of none/lsq/ransac")
    p.add_argument("--seed", type=int, default=0, help="experiment seed")
    p.add_argument("--workers", type=int, default=None, help="thread count for disturbance levels")
    p.add_argument("--out", required=True, help="output curve CSV path")
    p.add_argument("--svg", default=None, help="also write an SVG line chart here")
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("bench", help="rank benchmark result tables", formatter_class=fmt)
    p.add_argument("tables", nargs="+", help="result table files (.csv/.json)")
    p.add_argument("--baseline", default=None,
                   help="baseline row name (required for CSV tables; overrides JSON)")
    p.add_argument("--format", choices=["json", "md"], default="md", help="report format")
    p.add_argument("--out", default=None, help="output path (default: stdout)")
    p.set_defaults(func=_cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InsufficientDataError, DegenerateDataError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, TableParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
