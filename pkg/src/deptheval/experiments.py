"""Seeded synthetic experiments that expose how alignment biases metrics.

Two sweeps are implemented:

* ``run_robustness`` -- identical additive Gaussian noise is applied to a
  depth prediction and to a disparity prediction (both initialized from the
  same ground truth), each is least-squares aligned in its own space, and
  the accuracy threshold metric is compared.  Disparity-space alignment is
  more forgiving for small noise but collapses faster for large noise.

* ``run_sensitivity`` -- a shrinking corrupted block with growing amplitude
  (constant expected total mass) is injected into an otherwise perfect
  prediction.  Without alignment the metric improves as the block shrinks;
  with least-squares alignment the outliers drag the fit and the metric
  moves the opposite way.  RANSAC alleviates but does not remove the bias.

Every disturbance level draws from its own (seed, stream) substream, so
serial and parallel execution produce bytewise-identical curves.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from xml.etree import ElementTree

import numpy as np

from .align import RansacConfig, solve_ransac, solve_scale_shift_lsq
from .grid import DepthGrid, Kind, ValidityMask, apply_affine, full_mask, intersect_masks, invert_grid
from .metrics import abs_rel, delta_accuracy
from .rng import SETUP_STREAM, Prng, gaussian_grid, uniform_grid

SENSITIVITY_MODES = ("none", "lsq", "ransac")


@dataclass(frozen=True)
class ExperimentCurve:
    """A labelled sequence of (control parameter, metric value) points."""

    label: str
    points: tuple[tuple[float, float], ...]

    def __post_init__(self):
        pts = tuple((float(x), float(y)) for x, y in self.points)
        object.__setattr__(self, "points", pts)
        if not pts:
            raise ValueError("curve needs at least one point")
        xs = [x for x, _ in pts]
        ascending = all(a < b for a, b in zip(xs, xs[1:]))
        descending = all(a > b for a, b in zip(xs, xs[1:]))
        if len(xs) > 1 and not (ascending or descending):
            raise ValueError(f"curve x values must be strictly monotone: {xs}")
        if not all(math.isfinite(y) for _, y in pts):
            raise ValueError("curve y values must be finite")

    def xs(self) -> np.ndarray:
        return np.array([x for x, _ in self.points])

    def ys(self) -> np.ndarray:
        return np.array([y for _, y in self.points])


@dataclass(frozen=True)
class RobustnessConfig:
    """Additive-noise sweep configuration; defaults match the reference setup."""

    n: int = 500
    max_disturbance: float = 1.8
    step: float = 0.05
    noise_scale: float = 0.01
    seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.step <= 0:
            raise ValueError(f"step must be positive, got {self.step}")
        if self.max_disturbance < 0:
            raise ValueError(f"max disturbance must be >= 0, got {self.max_disturbance}")
        if self.noise_scale < 0:
            raise ValueError(f"noise scale must be >= 0, got {self.noise_scale}")

    def levels(self) -> list[float]:
        """[0, step, 2*step, ..., max_disturbance]."""
        count = int(math.floor(self.max_disturbance / self.step + 1e-9)) + 1
        return [i * self.step for i in range(count)]


def _default_sizes(n: int) -> tuple[int, ...]:
    return tuple(range(n, 9, -10))


@dataclass(frozen=True)
class SensitivityConfig:
    """Corrupted-block sweep configuration.

    ``sizes`` defaults to n, n-10, ..., 20, 10.  ``error_scale`` multiplies
    the injected perturbation; 0 gives the zero-error control variant.
    """

    n: int = 500
    sizes: tuple[int, ...] | None = None
    align_modes: tuple[str, ...] = SENSITIVITY_MODES
    seed: int = 0
    error_scale: float = 1.0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        sizes = tuple(self.sizes) if self.sizes is not None else _default_sizes(self.n)
        object.__setattr__(self, "sizes", sizes)
        if not sizes:
            raise ValueError("sizes must be nonempty")
        if any(m < 1 or m > self.n for m in sizes):
            raise ValueError(f"sizes must lie in [1, n], got {sizes}")
        if any(a <= b for a, b in zip(sizes, sizes[1:])):
            raise ValueError(f"sizes must be strictly descending, got {sizes}")
        modes = tuple(self.align_modes)
        object.__setattr__(self, "align_modes", modes)
        if not modes or len(set(modes)) != len(modes):
            raise ValueError(f"align modes must be nonempty and unique, got {modes}")
        unknown = set(modes) - set(SENSITIVITY_MODES)
        if unknown:
            raise ValueError(f"unknown align modes {sorted(unknown)}; pick from {SENSITIVITY_MODES}")


def _map_levels(fn, count: int, max_workers: int | None):
    if max_workers is not None and max_workers > 1 and count > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            return list(pool.map(fn, range(count)))
    return [fn(k) for k in range(count)]


def run_robustness(
    cfg: RobustnessConfig, max_workers: int | None = None
) -> tuple[ExperimentCurve, ExperimentCurve]:
    """Sweep additive Gaussian noise; return accuracy curves per alignment space.

    Ground truth is uniform over (0, 10].  At level d the noise is
    N(0, sigma = d * noise_scale), added both to the depth copy and to the
    disparity copy of the ground truth.  Each prediction is least-squares
    aligned to its own-space target; the disparity result is inverted back
    to depth (sub-floor pixels invalidated) before scoring.
    """
    n = cfg.n
    setup = Prng(cfg.seed, SETUP_STREAM)
    gt_vals = uniform_grid(setup, (n, n), 0.0, 10.0, exclude_low=True)
    gt = DepthGrid(gt_vals, Kind.DEPTH)
    everything = full_mask(n, n)
    gt_disp, disp_ok = invert_grid(gt)
    levels = cfg.levels()

    def level(k: int) -> tuple[float, float]:
        rng = Prng(cfg.seed, k)
        noise = gaussian_grid(rng, (n, n), levels[k] * cfg.noise_scale)

        pred = DepthGrid(gt_vals + noise, Kind.DEPTH)
        fit = solve_scale_shift_lsq(pred, gt, everything)
        d_depth = delta_accuracy(apply_affine(pred, fit), gt, everything)

        pred_disp = DepthGrid(gt_disp.values + noise, Kind.DISPARITY)
        fit2 = solve_scale_shift_lsq(pred_disp, gt_disp, disp_ok)
        back, back_ok = invert_grid(apply_affine(pred_disp, fit2))
        d_disp = delta_accuracy(back, gt, intersect_masks(disp_ok, back_ok))
        return d_depth, d_disp

    results = _map_levels(level, len(levels), max_workers)
    depth_curve = ExperimentCurve("depth", tuple(zip(levels, (r[0] for r in results))))
    disp_curve = ExperimentCurve("disparity", tuple(zip(levels, (r[1] for r in results))))
    return depth_curve, disp_curve


@dataclass(frozen=True)
class SensitivityResult:
    """Accuracy and relative-error curves for one alignment mode."""

    mode: str
    delta: ExperimentCurve
    abs_rel: ExperimentCurve


def run_sensitivity(
    cfg: SensitivityConfig, max_workers: int | None = None
) -> dict[str, SensitivityResult]:
    """Sweep a shrinking corrupted block; return curves per alignment mode.

    The prediction starts identical to ground truth (uniform over (0, 10]).
    For block size m, a uniform [0, 1) error scaled by n^2/m^2 is added to
    the top-left m-by-m region, so the expected injected mass is n^2/2 at
    every size.  Curves are keyed by m in the given (descending) order.
    """
    n = cfg.n
    setup = Prng(cfg.seed, SETUP_STREAM)
    base = uniform_grid(setup, (n, n), 0.0, 10.0, exclude_low=True)
    gt = DepthGrid(base, Kind.DEPTH)
    everything = full_mask(n, n)
    sizes = cfg.sizes

    def level(k: int) -> dict[str, tuple[float, float]]:
        m = sizes[k]
        rng = Prng(cfg.seed, k)
        block = uniform_grid(rng, (m, m), 0.0, 1.0)
        ransac_seed = rng.next_u64()
        corrupted = base.copy()
        corrupted[:m, :m] += block * (n * n) / (m * m) * cfg.error_scale
        pred = DepthGrid(corrupted, Kind.DEPTH)

        scores: dict[str, tuple[float, float]] = {}
        for mode in cfg.align_modes:
            if mode == "none":
                aligned = pred
            elif mode == "lsq":
                aligned = apply_affine(pred, solve_scale_shift_lsq(pred, gt, everything))
            else:  # ransac
                fit = solve_ransac(pred, gt, everything, RansacConfig(seed=ransac_seed))
                aligned = apply_affine(pred, fit)
            scores[mode] = (
                delta_accuracy(aligned, gt, everything),
                abs_rel(aligned, gt, everything),
            )
        return scores

    results = _map_levels(level, len(sizes), max_workers)
    out: dict[str, SensitivityResult] = {}
    for mode in cfg.align_modes:
        xs = [float(m) for m in sizes]
        out[mode] = SensitivityResult(
            mode=mode,
            delta=ExperimentCurve(
                f"delta_{mode}", tuple(zip(xs, (r[mode][0] for r in results)))
            ),
            abs_rel=ExperimentCurve(
                f"absrel_{mode}", tuple(zip(xs, (r[mode][1] for r in results)))
            ),
        )
    return out


_SVG_PALETTE = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
    "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
)


def _check_curves(curves) -> list[ExperimentCurve]:
    curves = list(curves)
    if not curves:
        raise ValueError("need at least one curve")
    labels = [c.label for c in curves]
    if len(set(labels)) != len(labels):
        raise ValueError(f"curve labels must be unique, got {labels}")
    first_xs = [x for x, _ in curves[0].points]
    for c in curves[1:]:
        if [x for x, _ in c.points] != first_xs:
            raise ValueError("curves must share the same x grid for emission")
    return curves


def curves_to_csv(curves) -> str:
    """Render curves as CSV text with header ``x,label1,label2,...``."""
    curves = _check_curves(curves)
    lines = ["x," + ",".join(c.label for c in curves)]
    for i, (x, _) in enumerate(curves[0].points):
        lines.append(repr(x) + "," + ",".join(repr(c.points[i][1]) for c in curves))
    return "\n".join(lines) + "\n"


def curves_to_svg(curves, width: int = 800, height: int = 600) -> str:
    """Render curves as a self-contained SVG line chart."""
    curves = _check_curves(curves)
    xs = np.concatenate([c.xs() for c in curves])
    ys = np.concatenate([c.ys() for c in curves])
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = float(ys.min()), float(ys.max())
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0
    left, right, top, bottom = 60.0, 20.0, 20.0, 40.0
    pw, ph = width - left - right, height - top - bottom

    def px(x: float) -> float:
        return left + (x - x0) / (x1 - x0) * pw

    def py(y: float) -> float:
        return top + (y1 - y) / (y1 - y0) * ph

    svg = ElementTree.Element(
        "svg",
        xmlns="http://www.w3.org/2000/svg",
        viewBox=f"0 0 {width} {height}",
        width=str(width),
        height=str(height),
    )
    ElementTree.SubElement(
        svg, "rect", x=f"{left:.2f}", y=f"{top:.2f}", width=f"{pw:.2f}", height=f"{ph:.2f}",
        fill="none", stroke="#333333",
    )
    for i, c in enumerate(curves):
        color = _SVG_PALETTE[i % len(_SVG_PALETTE)]
        pts = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in c.points)
        ElementTree.SubElement(
            svg, "polyline", points=pts, fill="none", stroke=color, attrib={"stroke-width": "1.5"}
        )
        ly = top + 16.0 + 16.0 * i
        ElementTree.SubElement(
            svg, "line", x1=f"{left + pw - 120:.2f}", y1=f"{ly - 4:.2f}",
            x2=f"{left + pw - 100:.2f}", y2=f"{ly - 4:.2f}",
            stroke=color, attrib={"stroke-width": "1.5"},
        )
        label = ElementTree.SubElement(
            svg, "text", x=f"{left + pw - 95:.2f}", y=f"{ly:.2f}",
            attrib={"font-size": "12", "font-family": "sans-serif"},
        )
        label.text = c.label
    ticks = (
        (left, height - bottom + 16.0, f"{x0:g}", "start"),
        (left + pw, height - bottom + 16.0, f"{x1:g}", "end"),
        (left - 6.0, top + ph, f"{y0:g}", "end"),
        (left - 6.0, top + 10.0, f"{y1:g}", "end"),
    )
    for tx, ty, text, anchor in ticks:
        el = ElementTree.SubElement(
            svg, "text", x=f"{tx:.2f}", y=f"{ty:.2f}",
            attrib={"font-size": "12", "font-family": "sans-serif", "text-anchor": anchor},
        )
        el.text = text
    return ElementTree.tostring(svg, encoding="unicode") + "\n"


def emit_curves(curves, path, fmt: str = "csv") -> None:
    """Write curves to ``path`` as CSV or SVG."""
    if fmt == "csv":
        text = curves_to_csv(curves)
    elif fmt == "svg":
        text = curves_to_svg(curves)
    else:
        raise ValueError(f"unknown curve format {fmt!r}; use 'csv' or 'svg'")
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)
