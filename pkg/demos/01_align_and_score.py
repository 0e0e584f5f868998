#!/usr/bin/env python3
"""Walk one synthetic scene through every prediction representation.

Ground truth is a smooth depth surface.  We fabricate a prediction for each
representation (metric, affine-invariant depth, affine-invariant disparity,
affine-invariant point map), align it the way that representation requires,
and print the resulting metric reports side by side.
"""

import numpy as np

from deptheval import (
    AlignSpec,
    CameraIntrinsics,
    DepthGrid,
    Kind,
    PointMap,
    Representation,
    Solver,
    Space,
    evaluate,
    full_mask,
)

H, W = 120, 160
rng = np.random.default_rng(0)

# A tilted plane plus a bump, depths in roughly [2, 8] meters.
u = np.linspace(0, 1, W)[None, :]
v = np.linspace(0, 1, H)[:, None]
depth = 3.0 + 2.0 * u + 1.5 * v + 1.2 * np.exp(-((u - 0.6) ** 2 + (v - 0.4) ** 2) / 0.05)
noise = rng.normal(0, 0.03, size=depth.shape)

gt = DepthGrid(depth, Kind.DEPTH)
mask = full_mask(W, H)
intr = CameraIntrinsics(fx=180.0, fy=180.0, cx=W / 2, cy=H / 2)

# Pinhole point map of the same noisy scene, scaled by 0.6, z-shifted by 1.1.
uu = np.arange(W, dtype=np.float64)[None, :]
vv = np.arange(H, dtype=np.float64)[:, None]
seen = depth + noise
x = seen * (uu - intr.cx) / intr.fx
y = seen * (vv - intr.cy) / intr.fy
pointmap = PointMap(np.stack([0.6 * x, 0.6 * y, 0.6 * seen + 1.1], axis=2))

cases = [
    ("metric, as-is",
     DepthGrid(depth + noise, Kind.DEPTH),
     Representation.METRIC_DEPTH,
     AlignSpec(solver=Solver.NONE, space=Space.DEPTH)),
    ("affine depth (0.5 d - 0.2)",
     DepthGrid(0.5 * (depth + noise) - 0.2, Kind.DEPTH),
     Representation.AFFINE_DEPTH,
     AlignSpec(solver=Solver.LSQ, space=Space.DEPTH)),
    ("affine disparity (3/d + 0.1)",
     DepthGrid(3.0 / (depth + noise) + 0.1, Kind.DISPARITY),
     Representation.AFFINE_DISPARITY,
     AlignSpec(solver=Solver.LSQ, space=Space.DISPARITY)),
    ("point map (s=0.6, b=1.1)",
     pointmap,
     Representation.AFFINE_POINTMAP,
     AlignSpec(solver=Solver.LSQ, space=Space.DEPTH)),
]

print(f"{'prediction':32s} {'delta1':>8s} {'delta2':>8s} {'abs_rel':>9s} {'rmse':>8s}")
for name, pred, representation, spec in cases:
    report = evaluate(pred, gt, representation, spec, mask, intrinsics=intr)
    print(f"{name:32s} {report.delta1:8.4f} {report.delta2:8.4f} "
          f"{report.abs_rel:9.5f} {report.rmse:8.5f}")

print()
print("The affine cases recover the metric scores because each alignment")
print("inverts the fabricated scale/shift exactly; only the shared sensor")
print("noise remains.")
