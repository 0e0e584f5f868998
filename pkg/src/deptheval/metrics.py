"""Standard depth accuracy metrics over a validity mask.

Invalid pixels are ignored entirely (never zero-filled).  Non-positive
aligned depths count as accuracy failures rather than being excluded, so a
solver that pushes pixels negative is penalized, not rewarded.  Mean-type
reductions use exactly-rounded summation (``math.fsum``), which makes every
metric independent of pixel order and bitwise reproducible.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .align import AlignSpec, CameraIntrinsics, PointMap, align_prediction
from .errors import InsufficientDataError
from .grid import DepthGrid, Representation, ValidityMask

DELTA_THRESHOLDS = (1.25, 1.25**2, 1.25**3)
BAD_PIXEL_THRESHOLDS = (1.0, 2.0, 3.0)


@dataclass(frozen=True)
class MetricReport:
    """Accuracy summary for one prediction/ground-truth pair."""

    delta1: float
    delta2: float
    delta3: float
    abs_rel: float
    rmse: float
    mae: float
    bad_pixel: dict[float, float] = field(default_factory=dict)
    valid_count: int = 0

    def to_dict(self) -> dict:
        def sig6(x: float) -> float:
            return float(f"{x:.6g}")

        return {
            "delta1": sig6(self.delta1),
            "delta2": sig6(self.delta2),
            "delta3": sig6(self.delta3),
            "abs_rel": sig6(self.abs_rel),
            "rmse": sig6(self.rmse),
            "mae": sig6(self.mae),
            "bad_pixel": {repr(float(t)): sig6(v) for t, v in self.bad_pixel.items()},
            "valid_count": self.valid_count,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _masked_metric_pair(
    aligned: DepthGrid, gt: DepthGrid, mask: ValidityMask
) -> tuple[np.ndarray, np.ndarray]:
    if aligned.shape != gt.shape or aligned.shape != mask.shape:
        raise ValueError(
            f"shape mismatch: aligned {aligned.shape}, gt {gt.shape}, mask {mask.shape}"
        )
    a = aligned.values[mask.bits]
    d = gt.values[mask.bits]
    if a.size == 0:
        raise InsufficientDataError("no valid pixels")
    return a, d


def _check_positive_gt(d: np.ndarray) -> None:
    if not (d > 0).all():
        raise ValueError("ground-truth depth must be positive on valid pixels")


def delta_accuracy(
    aligned: DepthGrid, gt: DepthGrid, mask: ValidityMask, threshold: float = 1.25
) -> float:
    """Fraction of valid pixels with max(a/d, d/a) < threshold.

    Pixels with non-positive aligned depth always fail the test.
    """
    if threshold <= 1:
        raise ValueError(f"threshold must exceed 1, got {threshold}")
    a, d = _masked_metric_pair(aligned, gt, mask)
    _check_positive_gt(d)
    pos = a > 0
    ap, dp = a[pos], d[pos]
    good = int((np.maximum(ap / dp, dp / ap) < threshold).sum())
    return good / a.size


def abs_rel(aligned: DepthGrid, gt: DepthGrid, mask: ValidityMask) -> float:
    """Mean absolute relative error |a - d| / d over valid pixels."""
    a, d = _masked_metric_pair(aligned, gt, mask)
    _check_positive_gt(d)
    return math.fsum(np.abs(a - d) / d) / a.size


def rmse(aligned: DepthGrid, gt: DepthGrid, mask: ValidityMask) -> float:
    """Root mean squared error over valid pixels."""
    a, d = _masked_metric_pair(aligned, gt, mask)
    err = a - d
    return math.sqrt(math.fsum(err * err) / a.size)


def mae(aligned: DepthGrid, gt: DepthGrid, mask: ValidityMask) -> float:
    """Mean absolute error over valid pixels."""
    a, d = _masked_metric_pair(aligned, gt, mask)
    return math.fsum(np.abs(a - d)) / a.size


def bad_pixel_rate(aligned: DepthGrid, gt: DepthGrid, mask: ValidityMask, t: float) -> float:
    """Fraction of valid pixels with absolute error above ``t``."""
    if t <= 0:
        raise ValueError(f"bad-pixel threshold must be positive, got {t}")
    a, d = _masked_metric_pair(aligned, gt, mask)
    return int((np.abs(a - d) > t).sum()) / a.size


def compute_report(
    aligned: DepthGrid,
    gt: DepthGrid,
    mask: ValidityMask,
    delta_thresholds: tuple[float, float, float] = DELTA_THRESHOLDS,
    bad_pixel_thresholds: tuple[float, ...] = BAD_PIXEL_THRESHOLDS,
) -> MetricReport:
    """All metrics for an already-aligned pair."""
    t1, t2, t3 = delta_thresholds
    if not 1 < t1 <= t2 <= t3:
        raise ValueError(f"delta thresholds must be ascending and > 1, got {delta_thresholds}")
    return MetricReport(
        delta1=delta_accuracy(aligned, gt, mask, t1),
        delta2=delta_accuracy(aligned, gt, mask, t2),
        delta3=delta_accuracy(aligned, gt, mask, t3),
        abs_rel=abs_rel(aligned, gt, mask),
        rmse=rmse(aligned, gt, mask),
        mae=mae(aligned, gt, mask),
        bad_pixel={t: bad_pixel_rate(aligned, gt, mask, t) for t in bad_pixel_thresholds},
        valid_count=mask.count(),
    )


def evaluate(
    pred: DepthGrid | PointMap,
    gt_depth: DepthGrid,
    representation: Representation | str,
    spec: AlignSpec,
    mask: ValidityMask,
    *,
    intrinsics: CameraIntrinsics | None = None,
    delta_thresholds: tuple[float, float, float] = DELTA_THRESHOLDS,
    bad_pixel_thresholds: tuple[float, ...] = BAD_PIXEL_THRESHOLDS,
) -> MetricReport:
    """Align a prediction per its representation, then compute all metrics."""
    aligned, _, mask2 = align_prediction(
        pred, gt_depth, representation, spec, mask, intrinsics=intrinsics
    )
    return compute_report(aligned, gt_depth, mask2, delta_thresholds, bad_pixel_thresholds)
