"""deptheval: depth-map evaluation with explicit, inspectable alignment.

The package covers the full evaluation pipeline for depth predictions in
any representation (metric depth, affine-invariant depth or disparity,
affine-invariant point maps): alignment solvers, the standard accuracy
metrics, seeded synthetic experiments that quantify how the alignment step
itself biases those metrics, and rank aggregation for proxy-task benchmark
tables.
"""

from .align import (
    AlignSpec,
    PointMap,
    RansacConfig,
    Solver,
    align_prediction,
    recover_pointmap_shift,
    solve_ransac,
    solve_scale_lsq,
    solve_scale_median,
    solve_scale_shift_lsq,
)
from .bench import (
    Direction,
    MetricColumn,
    MethodScore,
    RankReport,
    ResultTable,
    average_rank,
    emit_report,
    improvement_ratio,
    load_table,
    task_rank,
)
from .errors import (
    DegenerateDataError,
    DepthEvalError,
    InsufficientDataError,
    TableParseError,
)
from .experiments import (
    ExperimentCurve,
    RobustnessConfig,
    SensitivityConfig,
    SensitivityResult,
    emit_curves,
    run_robustness,
    run_sensitivity,
)
from .grid import (
    DEFAULT_RECIPROCAL_FLOOR,
    AlignmentParams,
    CameraIntrinsics,
    DepthGrid,
    Kind,
    Representation,
    Space,
    ValidityMask,
    apply_affine,
    full_mask,
    intersect_masks,
    invert_grid,
    make_grid,
    mask_for,
)
from .gridio import (
    read_csv_grid,
    read_pfm,
    read_pointmap_pfm,
    write_csv_grid,
    write_pfm,
    write_pointmap_pfm,
)
from .metrics import (
    BAD_PIXEL_THRESHOLDS,
    DELTA_THRESHOLDS,
    MetricReport,
    abs_rel,
    bad_pixel_rate,
    compute_report,
    delta_accuracy,
    evaluate,
    mae,
    rmse,
)
from .rng import Prng, RngSpec, gaussian_draw, gaussian_grid, uniform_draw, uniform_grid

__version__ = "0.1.0"

__all__ = [
    "AlignSpec", "AlignmentParams", "BAD_PIXEL_THRESHOLDS", "CameraIntrinsics",
    "DEFAULT_RECIPROCAL_FLOOR", "DELTA_THRESHOLDS", "DegenerateDataError",
    "DepthEvalError", "DepthGrid", "Direction", "ExperimentCurve",
    "InsufficientDataError", "Kind", "MethodScore", "MetricColumn",
    "MetricReport", "PointMap", "Prng", "RankReport", "RansacConfig",
    "Representation", "ResultTable", "RngSpec", "RobustnessConfig",
    "SensitivityConfig", "SensitivityResult", "Solver", "Space",
    "TableParseError", "ValidityMask", "abs_rel", "align_prediction",
    "apply_affine", "average_rank", "bad_pixel_rate", "compute_report",
    "delta_accuracy", "emit_curves", "emit_report", "evaluate", "full_mask",
    "gaussian_draw", "gaussian_grid", "improvement_ratio", "intersect_masks",
    "invert_grid", "load_table", "mae", "make_grid", "mask_for",
    "read_csv_grid", "read_pfm", "read_pointmap_pfm", "recover_pointmap_shift",
    "rmse", "run_robustness", "run_sensitivity", "solve_ransac",
    "solve_scale_lsq", "solve_scale_median", "solve_scale_shift_lsq",
    "task_rank", "uniform_draw", "uniform_grid", "write_csv_grid",
    "write_pfm", "write_pointmap_pfm",
]
