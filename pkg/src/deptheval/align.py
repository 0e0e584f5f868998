"""Alignment solvers and the representation dispatch.

Affine-invariant predictions are defined only up to an unknown scale and
shift, so they must be fitted to the ground truth before any accuracy
metric means anything.  This module implements every solver variant used
for that fit (closed-form least squares, scale-only variants, a median
estimator, and RANSAC) plus ``align_prediction``, which routes a
prediction through the correct space for its representation:

* metric depth        -> no alignment (or an optional depth-space solve)
* affine-inv. depth   -> solve (pred, gt) in depth space
* affine-inv. disp    -> solve (pred, 1/gt) in disparity space, invert back
* affine-inv. pointmap-> recover the z shift from the point geometry, then
  take the depth or disparity route

All solvers are pure functions; RANSAC seeds a solver-local generator from
its config, so identical inputs give bitwise-identical parameters.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDataError, InsufficientDataError
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
    intersect_masks,
    invert_grid,
)
from .rng import Prng

# A prediction whose variance over the valid pixels falls below this is
# treated as constant: a scale cannot be estimated from it.
DEGENERATE_VARIANCE = 1e-15


class Solver(str, enum.Enum):
    """Alignment solver selection."""

    NONE = "none"
    LSQ = "lsq-scale-shift"
    LSQ_SCALE = "lsq-scale-only"
    MEDIAN_SCALE = "median-scale-only"
    RANSAC = "ransac-scale-shift"


@dataclass(frozen=True)
class RansacConfig:
    """RANSAC hyperparameters.

    The inlier test is relative to |target| (floored at 1e-9) because depth
    ranges span orders of magnitude.  The default band of 0.25 mirrors the
    ratio band of the standard accuracy threshold 1.25: a pixel counts as an
    inlier when the fitted model leaves it within 25% of the target.
    """

    iterations: int = 256
    sample_size: int = 2
    inlier_threshold: float = 0.25
    seed: int = 0

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError(f"iterations must be >= 1, got {self.iterations}")
        if self.sample_size != 2:
            raise ValueError("only 2-point samples are supported")
        if not 0.0 < self.inlier_threshold < 1.0:
            raise ValueError(f"inlier_threshold must be in (0, 1), got {self.inlier_threshold}")


@dataclass(frozen=True)
class AlignSpec:
    """Which solver to run and in which space.

    ``solver=NONE`` means the identity parameters (1, 0) are used verbatim.
    ``space=DISPARITY`` requires inverting the ground truth before solving,
    which only the disparity and point-map representations do.
    """

    solver: Solver = Solver.LSQ
    space: Space = Space.DEPTH
    ransac: RansacConfig | None = None

    def __post_init__(self):
        object.__setattr__(self, "solver", Solver(self.solver))
        object.__setattr__(self, "space", Space(self.space))


class PointMap:
    """Per-pixel camera-frame xyz coordinates, stored as (height, width, 3)."""

    __slots__ = ("xyz",)

    def __init__(self, xyz: np.ndarray):
        arr = np.array(xyz, dtype=np.float64)
        if arr.ndim != 3 or arr.shape[2] != 3:
            raise ValueError(f"point map must have shape (h, w, 3), got {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"point map dimensions must be >= 1, got {arr.shape}")
        arr.flags.writeable = False
        self.xyz = arr

    @property
    def width(self) -> int:
        return self.xyz.shape[1]

    @property
    def height(self) -> int:
        return self.xyz.shape[0]

    @property
    def x(self) -> np.ndarray:
        return self.xyz[:, :, 0]

    @property
    def y(self) -> np.ndarray:
        return self.xyz[:, :, 1]

    @property
    def z(self) -> np.ndarray:
        return self.xyz[:, :, 2]

    def z_grid(self) -> DepthGrid:
        return DepthGrid(self.z, Kind.DEPTH)


def _masked_pair(pred: DepthGrid, target: DepthGrid, mask: ValidityMask) -> tuple[np.ndarray, np.ndarray]:
    if pred.shape != target.shape or pred.shape != mask.shape:
        raise ValueError(
            f"shape mismatch: pred {pred.shape}, target {target.shape}, mask {mask.shape}"
        )
    return pred.values[mask.bits], target.values[mask.bits]


def _scale_shift_core(p: np.ndarray, t: np.ndarray) -> tuple[float, float]:
    if p.size < 2:
        raise InsufficientDataError(f"scale-shift fit needs >= 2 valid pixels, got {p.size}")
    pm = float(p.mean())
    tm = float(t.mean())
    pc = p - pm
    var = float((pc * pc).mean())
    if var < DEGENERATE_VARIANCE:
        raise DegenerateDataError(f"prediction is constant over valid pixels (var={var:.3e})")
    s = float((pc * (t - tm)).mean()) / var
    return s, tm - s * pm


def solve_scale_shift_lsq(
    pred: DepthGrid, target: DepthGrid, mask: ValidityMask, space: Space = Space.DEPTH
) -> AlignmentParams:
    """Closed-form least squares for scale and shift.

    Minimizes sum((s*p + b - t)^2) over the valid pixels; the returned pair
    is the global minimum of that quadratic: s = cov(p, t) / var(p) and
    b = mean(t) - s * mean(p).
    """
    p, t = _masked_pair(pred, target, mask)
    s, b = _scale_shift_core(p, t)
    return AlignmentParams(s, b, space)


def solve_scale_lsq(
    pred: DepthGrid, target: DepthGrid, mask: ValidityMask, space: Space = Space.DEPTH
) -> AlignmentParams:
    """Least squares through the origin: scale only, shift fixed at zero."""
    p, t = _masked_pair(pred, target, mask)
    if p.size < 1:
        raise InsufficientDataError("scale-only fit needs >= 1 valid pixel")
    denom = float((p * p).mean())
    if denom < DEGENERATE_VARIANCE:
        raise DegenerateDataError("prediction is zero over valid pixels")
    return AlignmentParams(float((p * t).mean()) / denom, 0.0, space)


def solve_scale_median(
    pred: DepthGrid, target: DepthGrid, mask: ValidityMask, space: Space = Space.DEPTH
) -> AlignmentParams:
    """Median of per-pixel target/pred ratios over positive pairs; shift is zero.

    With an even number of ratios the median is the mean of the two central
    order statistics.
    """
    p, t = _masked_pair(pred, target, mask)
    pos = (p > 0) & (t > 0)
    if not pos.any():
        raise InsufficientDataError("median scale needs >= 1 valid pixel with pred > 0 and target > 0")
    return AlignmentParams(float(np.median(t[pos] / p[pos])), 0.0, space)


def solve_ransac(
    pred: DepthGrid,
    target: DepthGrid,
    mask: ValidityMask,
    cfg: RansacConfig | None = None,
    space: Space = Space.DEPTH,
) -> AlignmentParams:
    """RANSAC scale-shift fit.

    Each iteration fits the exact line through a 2-pixel sample and counts
    the pixels within ``inlier_threshold * max(|t|, 1e-9)`` of it.  The
    sample maximizing that count wins (first winner on ties), and the final
    parameters are re-solved by least squares on its inlier set.  Samples
    with equal prediction values are degenerate and skipped; if every
    iteration is degenerate the prediction cannot be fitted.
    """
    if cfg is None:
        cfg = RansacConfig()
    p, t = _masked_pair(pred, target, mask)
    count = p.size
    if count < cfg.sample_size:
        raise InsufficientDataError(f"RANSAC needs >= {cfg.sample_size} valid pixels, got {count}")

    # Index pairs come from a solver-local stream; modulo bias is irrelevant
    # here (determinism, not uniformity at the 2**-64 level, is the contract).
    rng = Prng(cfg.seed)
    draws = rng.next_u64_block(2 * cfg.iterations)
    idx = (draws % np.uint64(count)).astype(np.intp).reshape(cfg.iterations, 2)
    p1, p2 = p[idx[:, 0]], p[idx[:, 1]]
    t1, t2 = t[idx[:, 0]], t[idx[:, 1]]
    usable = p1 != p2
    if not usable.any():
        raise DegenerateDataError("every RANSAC sample drew equal prediction values")
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.where(usable, (t2 - t1) / (p2 - p1), 0.0)
    b = np.where(usable, t1 - s * p1, 0.0)

    tol = cfg.inlier_threshold * np.maximum(np.abs(t), 1e-9)
    counts = np.full(cfg.iterations, -1, dtype=np.int64)
    chunk = max(1, 4_000_000 // count)
    for start in range(0, cfg.iterations, chunk):
        sl = slice(start, min(start + chunk, cfg.iterations))
        resid = np.abs(s[sl, None] * p[None, :] + b[sl, None] - t[None, :])
        counts[sl] = (resid <= tol[None, :]).sum(axis=1)
    counts[~usable] = -1

    best = int(np.argmax(counts))
    inliers = np.abs(s[best] * p + b[best] - t) <= tol
    s_fit, b_fit = _scale_shift_core(p[inliers], t[inliers])
    return AlignmentParams(s_fit, b_fit, space)


_SOLVER_FUNCS = {
    Solver.LSQ: solve_scale_shift_lsq,
    Solver.LSQ_SCALE: solve_scale_lsq,
    Solver.MEDIAN_SCALE: solve_scale_median,
}


def _run_solver(
    spec: AlignSpec, pred: DepthGrid, target: DepthGrid, mask: ValidityMask, space: Space
) -> AlignmentParams:
    if spec.solver == Solver.NONE:
        return AlignmentParams(1.0, 0.0, space)
    if spec.solver == Solver.RANSAC:
        return solve_ransac(pred, target, mask, spec.ransac, space)
    return _SOLVER_FUNCS[spec.solver](pred, target, mask, space)


def recover_pointmap_shift(pm: PointMap, intr: CameraIntrinsics, mask: ValidityMask) -> float:
    """Recover the z shift of a scaled-and-shifted pinhole point map.

    A pinhole map scaled by s and z-shifted by b satisfies x = s*x_true and
    z = s*z_true + b, while x_true = z_true * (u - cx) / fx.  Hence
    z - x * fx / (u - cx) equals b exactly at every pixel; the median of the
    per-pixel candidates is returned.  Pixels within 2 px of the principal
    axis are skipped to avoid the division blowing up.
    """
    if mask.shape != (pm.height, pm.width):
        raise ValueError(f"mask dimensions differ: {mask.shape} vs {(pm.height, pm.width)}")
    u = np.arange(pm.width, dtype=np.float64)[None, :]
    offset = u - intr.cx
    usable = mask.bits & (np.abs(offset) > 2.0)
    if not usable.any():
        raise InsufficientDataError("no valid pixel farther than 2 px from the principal axis")
    offs = np.broadcast_to(offset, usable.shape)[usable]
    candidates = pm.z[usable] - pm.x[usable] * intr.fx / offs
    return float(np.median(candidates))


def _check_gt(gt: DepthGrid, mask: ValidityMask) -> None:
    vals = gt.values[mask.bits]
    # NaN compares false, so this also rejects non-finite ground truth.
    if vals.size and not (vals > 0).all():
        raise ValueError("ground-truth depth must be positive on valid pixels")


def align_prediction(
    pred: DepthGrid | PointMap,
    gt_depth: DepthGrid,
    representation: Representation | str,
    spec: AlignSpec,
    mask: ValidityMask,
    *,
    intrinsics: CameraIntrinsics | None = None,
    floor: float = DEFAULT_RECIPROCAL_FLOOR,
) -> tuple[DepthGrid, AlignmentParams, ValidityMask]:
    """Align a prediction to ground-truth depth per its representation.

    Returns the aligned depth, the solved parameters, and the validity mask
    after alignment (disparity routes invalidate pixels whose aligned
    disparity falls below ``floor`` instead of clamping them).  Point-map
    input needs ``intrinsics`` for the shift recovery.
    """
    rep = Representation(representation)
    _check_gt(gt_depth, mask)

    if rep == Representation.AFFINE_POINTMAP:
        if not isinstance(pred, PointMap):
            raise ValueError("affine-invariant-pointmap prediction must be a PointMap")
        if intrinsics is None:
            raise ValueError("point-map alignment needs camera intrinsics")
        shift = recover_pointmap_shift(pred, intrinsics, mask)
        z = DepthGrid(pred.z - shift, Kind.DEPTH)
        if spec.space == Space.DEPTH:
            return _depth_route(z, gt_depth, spec, mask)
        z_disp, z_mask = invert_grid(z, floor)
        return _disparity_route(z_disp, gt_depth, spec, intersect_masks(mask, z_mask), floor)

    if not isinstance(pred, DepthGrid):
        raise ValueError(f"{rep.value} prediction must be a DepthGrid")

    if rep in (Representation.METRIC_DEPTH, Representation.AFFINE_DEPTH):
        if spec.space != Space.DEPTH:
            raise ValueError(f"{rep.value} prediction cannot be aligned in disparity space")
        return _depth_route(pred, gt_depth, spec, mask)

    # Affine-invariant disparity: the prediction lives in disparity space.
    if spec.space != Space.DISPARITY:
        raise ValueError(f"{rep.value} prediction must be aligned in disparity space")
    return _disparity_route(pred, gt_depth, spec, mask, floor)


def _depth_route(
    pred: DepthGrid, gt: DepthGrid, spec: AlignSpec, mask: ValidityMask
) -> tuple[DepthGrid, AlignmentParams, ValidityMask]:
    params = _run_solver(spec, pred, gt, mask, Space.DEPTH)
    return apply_affine(pred, params), params, mask


def _disparity_route(
    pred_disp: DepthGrid, gt: DepthGrid, spec: AlignSpec, mask: ValidityMask, floor: float
) -> tuple[DepthGrid, AlignmentParams, ValidityMask]:
    gt_disp, gt_ok = invert_grid(gt, floor)
    solve_mask = intersect_masks(mask, gt_ok)
    params = _run_solver(spec, pred_disp, gt_disp, solve_mask, Space.DISPARITY)
    aligned_disp = apply_affine(pred_disp, params)
    aligned_depth, inv_ok = invert_grid(aligned_disp, floor)
    return aligned_depth, params, intersect_masks(solve_mask, inv_ok)
