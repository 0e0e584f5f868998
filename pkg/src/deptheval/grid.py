"""Core grid types: depth/disparity grids, validity masks, affine parameters.

All types are immutable after construction (backing arrays are locked), so
every operation here is a pure function and safe to call concurrently.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

# Reciprocal values below this floor are marked invalid instead of producing
# huge or infinite outputs.  Small enough that uniformly drawn synthetic grids
# are effectively never clipped.
DEFAULT_RECIPROCAL_FLOOR = 1e-9


class Kind(str, enum.Enum):
    """What the grid values mean (meters, 1/meters, or unitless)."""

    DEPTH = "depth"
    DISPARITY = "disparity"
    GENERIC = "generic"


class Space(str, enum.Enum):
    """The space an alignment is solved in."""

    DEPTH = "depth"
    DISPARITY = "disparity"


class Representation(str, enum.Enum):
    """Output convention of a depth predictor."""

    METRIC_DEPTH = "metric-depth"
    AFFINE_DEPTH = "affine-invariant-depth"
    AFFINE_DISPARITY = "affine-invariant-disparity"
    AFFINE_POINTMAP = "affine-invariant-pointmap"


def _locked(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


class DepthGrid:
    """A rectangular grid of float64 values with row-major (height, width) layout."""

    __slots__ = ("values", "kind")

    def __init__(self, values: np.ndarray, kind: Kind | str = Kind.GENERIC):
        arr = np.array(values, dtype=np.float64)
        if arr.ndim != 2:
            raise ValueError(f"grid must be 2-D, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"grid dimensions must be >= 1, got shape {arr.shape}")
        self.values = _locked(arr)
        self.kind = Kind(kind)

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def __repr__(self) -> str:
        return f"DepthGrid({self.width}x{self.height}, kind={self.kind.value})"


class ValidityMask:
    """Per-pixel validity bits for a grid of matching dimensions."""

    __slots__ = ("bits",)

    def __init__(self, bits: np.ndarray):
        arr = np.array(bits, dtype=bool)
        if arr.ndim != 2:
            raise ValueError(f"mask must be 2-D, got shape {arr.shape}")
        self.bits = _locked(arr)

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.bits.shape

    def count(self) -> int:
        return int(np.count_nonzero(self.bits))

    def __repr__(self) -> str:
        return f"ValidityMask({self.width}x{self.height}, valid={self.count()})"


@dataclass(frozen=True)
class AlignmentParams:
    """Scale/shift pair mapping a prediction onto its target; identity is (1, 0)."""

    scale: float
    shift: float
    space: Space = Space.DEPTH

    def __post_init__(self):
        if not (np.isfinite(self.scale) and np.isfinite(self.shift)):
            raise ValueError(f"alignment params must be finite, got {self!r}")
        object.__setattr__(self, "space", Space(self.space))

    def to_dict(self) -> dict:
        return {"scale": self.scale, "shift": self.shift, "space": self.space.value}


IDENTITY_PARAMS = AlignmentParams(1.0, 0.0)


@dataclass(frozen=True)
class CameraIntrinsics:
    """Pinhole intrinsics in pixel units."""

    fx: float
    fy: float
    cx: float
    cy: float

    def __post_init__(self):
        if self.fx <= 0 or self.fy <= 0:
            raise ValueError("focal lengths must be positive")


def make_grid(width: int, height: int, fill: float, kind: Kind | str = Kind.GENERIC) -> DepthGrid:
    """Create a constant-fill grid."""
    if width < 1 or height < 1:
        raise ValueError(f"grid dimensions must be >= 1, got {width}x{height}")
    if not np.isfinite(fill):
        raise ValueError(f"fill value must be finite, got {fill}")
    return DepthGrid(np.full((height, width), fill, dtype=np.float64), kind)


def full_mask(width: int, height: int) -> ValidityMask:
    """All-valid mask of the given dimensions."""
    if width < 1 or height < 1:
        raise ValueError(f"mask dimensions must be >= 1, got {width}x{height}")
    return ValidityMask(np.ones((height, width), dtype=bool))


def mask_for(grid: DepthGrid) -> ValidityMask:
    """Mask marking the finite pixels of ``grid`` as valid."""
    return ValidityMask(np.isfinite(grid.values))


def _flip_kind(kind: Kind) -> Kind:
    if kind == Kind.DEPTH:
        return Kind.DISPARITY
    if kind == Kind.DISPARITY:
        return Kind.DEPTH
    return Kind.GENERIC


def invert_grid(
    g: DepthGrid, floor: float = DEFAULT_RECIPROCAL_FLOOR
) -> tuple[DepthGrid, ValidityMask]:
    """Pixelwise reciprocal with sub-floor invalidation.

    Pixels with value >= ``floor`` become 1/value; everything else (including
    non-finite input) is set to NaN and reported invalid, so the output never
    contains infinities.  Depth flips to disparity and vice versa.
    """
    if floor <= 0:
        raise ValueError(f"reciprocal floor must be positive, got {floor}")
    v = g.values
    with np.errstate(invalid="ignore"):
        ok = v >= floor
    out = np.full(v.shape, np.nan, dtype=np.float64)
    out[ok] = 1.0 / v[ok]
    return DepthGrid(out, _flip_kind(g.kind)), ValidityMask(ok)


def apply_affine(g: DepthGrid, p: AlignmentParams) -> DepthGrid:
    """Pixelwise scale*value + shift; validity is unaffected."""
    return DepthGrid(g.values * p.scale + p.shift, g.kind)


def intersect_masks(a: ValidityMask, b: ValidityMask) -> ValidityMask:
    """Logical AND of two masks of identical dimensions."""
    if a.shape != b.shape:
        raise ValueError(f"mask dimensions differ: {a.shape} vs {b.shape}")
    return ValidityMask(a.bits & b.bits)
