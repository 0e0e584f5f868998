import json
import math

import numpy as np
import pytest

from deptheval import (
    AlignSpec,
    DepthGrid,
    InsufficientDataError,
    Kind,
    Representation,
    Solver,
    Space,
    ValidityMask,
    abs_rel,
    bad_pixel_rate,
    compute_report,
    delta_accuracy,
    evaluate,
    full_mask,
    mae,
    rmse,
)


def grid(vals, kind=Kind.DEPTH):
    return DepthGrid(np.atleast_2d(np.asarray(vals, dtype=np.float64)), kind)


def test_delta_identity_is_one():
    d = grid([1.0, 2.0, 3.0])
    assert delta_accuracy(d, d, full_mask(3, 1)) == 1.0


def test_delta_counts_ratio_failures():
    a = grid([1.0, 1.3, 2.0])
    d = grid([1.0, 1.0, 2.0])
    assert delta_accuracy(a, d, full_mask(3, 1), 1.25) == pytest.approx(2.0 / 3.0)


def test_delta_nonpositive_prediction_fails():
    a = grid([-1.0, 1.0])
    d = grid([1.0, 1.0])
    assert delta_accuracy(a, d, full_mask(2, 1)) == 0.5


def test_delta_threshold_must_exceed_one():
    d = grid([1.0])
    with pytest.raises(ValueError):
        delta_accuracy(d, d, full_mask(1, 1), 1.0)


def test_delta_requires_positive_gt():
    a = grid([1.0, 1.0])
    d = grid([1.0, 0.0])
    with pytest.raises(ValueError):
        delta_accuracy(a, d, full_mask(2, 1))


def test_delta_empty_mask_is_insufficient():
    d = grid([1.0, 2.0])
    empty = ValidityMask(np.zeros((1, 2), dtype=bool))
    with pytest.raises(InsufficientDataError):
        delta_accuracy(d, d, empty)


def test_delta_scale_sensitivity_without_alignment():
    rng = np.random.default_rng(0)
    tv = rng.uniform(1.0, 10.0, size=(6, 6))
    d = grid(tv)
    for c, expected in ((1.2, 1.0), (1.3, 0.0), (0.85, 1.0), (0.7, 0.0)):
        got = delta_accuracy(grid(c * tv), d, full_mask(6, 6), 1.25)
        assert got == expected, c


def test_abs_rel_cases():
    d = grid([1.0])
    assert abs_rel(d, d, full_mask(1, 1)) == 0.0
    assert abs_rel(grid([2.0]), d, full_mask(1, 1)) == 1.0
    got = abs_rel(grid([1.1, 0.9]), grid([1.0, 1.0]), full_mask(2, 1))
    assert got == pytest.approx(0.1, abs=1e-12)


def test_rmse_mae_cases():
    a, d = grid([1.0, 2.0]), grid([1.0, 4.0])
    m = full_mask(2, 1)
    assert rmse(a, a, m) == 0.0 and mae(a, a, m) == 0.0
    assert rmse(a, d, m) == pytest.approx(math.sqrt(2.0), abs=1e-12)
    assert mae(a, d, m) == 1.0


def test_constant_offset_makes_rmse_equal_mae():
    rng = np.random.default_rng(1)
    tv = rng.uniform(1, 5, size=(4, 4))
    a, d = grid(tv + 0.7), grid(tv)
    m = full_mask(4, 4)
    assert rmse(a, d, m) == pytest.approx(0.7, abs=1e-12)
    assert mae(a, d, m) == pytest.approx(0.7, abs=1e-12)


def test_bad_pixel_cases():
    d = grid([1.0, 2.0, 3.0])
    m = full_mask(3, 1)
    assert bad_pixel_rate(d, d, m, 1.0) == 0.0
    assert bad_pixel_rate(grid([3.0, 4.0, 5.0]), d, m, 1.0) == 1.0
    errs = grid([1.5, 3.5, 6.5])
    assert bad_pixel_rate(errs, grid([1.0, 2.0, 3.0]), m, 1.0) == pytest.approx(2.0 / 3.0)
    with pytest.raises(ValueError):
        bad_pixel_rate(d, d, m, 0.0)


def test_shape_mismatch_rejected():
    with pytest.raises(ValueError):
        rmse(grid([1.0, 2.0]), grid([1.0]), full_mask(2, 1))


# ----------------------------------------------------------------- evaluate

def test_evaluate_perfect_metric_prediction():
    rng = np.random.default_rng(2)
    tv = rng.uniform(1, 10, size=(5, 5))
    gt = grid(tv)
    spec = AlignSpec(solver=Solver.NONE, space=Space.DEPTH)
    rep = evaluate(gt, gt, Representation.METRIC_DEPTH, spec, full_mask(5, 5))
    assert rep.delta1 == 1.0 and rep.abs_rel == 0.0 and rep.rmse == 0.0
    assert rep.valid_count == 25


def test_evaluate_exact_affine_depth():
    rng = np.random.default_rng(3)
    tv = rng.uniform(1, 10, size=(5, 5))
    pred = grid(2.0 * tv + 1.0)
    spec = AlignSpec(solver=Solver.LSQ, space=Space.DEPTH)
    rep = evaluate(pred, grid(tv), Representation.AFFINE_DEPTH, spec, full_mask(5, 5))
    assert rep.delta1 == 1.0
    assert rep.rmse <= 1e-9


def test_single_outlier_disrupts_aligned_score():
    # One pixel at 100x ruins the fit: the unaligned score only loses that
    # pixel, the aligned score collapses below it.
    rng = np.random.default_rng(4)
    tv = rng.uniform(1.0, 10.0, size=(10, 10))
    pv = tv.copy()
    pv[0, 0] = 100.0 * tv[0, 0]
    gt, pred = grid(tv), grid(pv)
    m = full_mask(10, 10)

    unaligned = evaluate(pred, gt, Representation.METRIC_DEPTH,
                         AlignSpec(solver=Solver.NONE, space=Space.DEPTH), m)
    aligned = evaluate(pred, gt, Representation.AFFINE_DEPTH,
                       AlignSpec(solver=Solver.LSQ, space=Space.DEPTH), m)
    assert unaligned.delta1 == pytest.approx(99.0 / 100.0)
    assert aligned.delta1 < unaligned.delta1


def test_report_thresholds_and_serialization():
    rng = np.random.default_rng(5)
    tv = rng.uniform(1, 10, size=(8, 8))
    a = grid(tv * rng.uniform(0.9, 1.4, size=tv.shape))
    rep = compute_report(a, grid(tv), full_mask(8, 8))
    assert rep.delta1 <= rep.delta2 <= rep.delta3
    doc = json.loads(rep.to_json())
    assert set(doc) == {"delta1", "delta2", "delta3", "abs_rel", "rmse", "mae",
                        "bad_pixel", "valid_count"}
    assert doc["valid_count"] == 64
    assert set(doc["bad_pixel"]) == {"1.0", "2.0", "3.0"}
    # six significant digits
    assert doc["abs_rel"] == float(f"{rep.abs_rel:.6g}")


# --------------------------------------------------------------- properties

def random_pair(rng):
    h, w = rng.integers(2, 12, size=2)
    tv = rng.uniform(0.5, 10.0, size=(h, w))
    av = tv * rng.uniform(0.5, 2.0, size=(h, w)) + rng.normal(0, 0.5, size=(h, w))
    bits = rng.random((h, w)) < 0.8
    if not bits.any():
        bits[0, 0] = True
    return grid(av), grid(tv), ValidityMask(bits)


def test_delta_monotone_in_threshold_100_grids():
    rng = np.random.default_rng(6)
    for _ in range(100):
        a, d, m = random_pair(rng)
        t1, t2 = sorted(rng.uniform(1.01, 3.0, size=2))
        assert delta_accuracy(a, d, m, t1) <= delta_accuracy(a, d, m, t2)


def test_rmse_at_least_mae_100_grids():
    rng = np.random.default_rng(7)
    for _ in range(100):
        a, d, m = random_pair(rng)
        assert rmse(a, d, m) >= mae(a, d, m) - 1e-15


def test_metrics_invariant_under_pixel_permutation_100_grids():
    rng = np.random.default_rng(8)
    for _ in range(100):
        a, d, m = random_pair(rng)
        perm = rng.permutation(a.values.size)
        shape = a.values.shape
        ap = grid(a.values.ravel()[perm].reshape(shape))
        dp = grid(d.values.ravel()[perm].reshape(shape))
        mp = ValidityMask(m.bits.ravel()[perm].reshape(shape))
        assert delta_accuracy(ap, dp, mp) == delta_accuracy(a, d, m)
        assert abs_rel(ap, dp, mp) == abs_rel(a, d, m)
        assert bad_pixel_rate(ap, dp, mp, 1.0) == bad_pixel_rate(a, d, m, 1.0)
