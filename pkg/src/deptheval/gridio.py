"""Grid file formats: PFM (portable float map) and plain CSV.

PFM layout: a text header of three lines -- ``Pf`` (one channel) or ``PF``
(three channels), ``<width> <height>``, and a scale factor whose sign gives
the byte order (negative = little-endian) -- followed by raw 32-bit float
rows stored bottom-up.  Values are widened to float64 on read and narrowed
to float32 on write.

CSV layout: one text row per grid row, ``.`` as the decimal separator and
``nan`` for invalid pixels.
"""

from __future__ import annotations

import os

import numpy as np

from .align import PointMap
from .grid import DepthGrid, Kind, ValidityMask


def _read_pfm_header(f) -> tuple[str, int, int, bool]:
    magic = f.readline().strip().decode("ascii", errors="replace")
    if magic not in ("Pf", "PF"):
        raise ValueError(f"not a PFM file (magic {magic!r})")
    dims = f.readline().split()
    if len(dims) != 2:
        raise ValueError("malformed PFM dimension line")
    width, height = int(dims[0]), int(dims[1])
    if width < 1 or height < 1:
        raise ValueError(f"bad PFM dimensions {width}x{height}")
    scale = float(f.readline().strip())
    if scale == 0:
        raise ValueError("PFM scale factor must be nonzero")
    return magic, width, height, scale < 0


def _read_pfm_payload(path: str | os.PathLike) -> tuple[np.ndarray, int]:
    """Return the image as float64 (height, width, channels) in top-down order."""
    with open(path, "rb") as f:
        magic, width, height, little_endian = _read_pfm_header(f)
        channels = 3 if magic == "PF" else 1
        count = width * height * channels
        dtype = "<f4" if little_endian else ">f4"
        data = np.fromfile(f, dtype=dtype, count=count)
    if data.size != count:
        raise ValueError(f"truncated PFM payload: expected {count} floats, got {data.size}")
    img = data.astype(np.float64).reshape(height, width, channels)
    return img[::-1], channels  # rows are stored bottom-up


def read_pfm(path: str | os.PathLike, kind: Kind | str = Kind.GENERIC) -> tuple[DepthGrid, ValidityMask]:
    """Read a single-channel PFM; non-finite pixels come back invalid."""
    img, channels = _read_pfm_payload(path)
    if channels != 1:
        raise ValueError("expected single-channel PFM (magic 'Pf'), got 3-channel 'PF'")
    values = img[:, :, 0]
    return DepthGrid(values, kind), ValidityMask(np.isfinite(values))


def write_pfm(path: str | os.PathLike, grid: DepthGrid, mask: ValidityMask | None = None) -> None:
    """Write a single-channel little-endian PFM; masked-out pixels become NaN."""
    values = grid.values
    if mask is not None:
        if mask.shape != grid.shape:
            raise ValueError(f"mask dimensions differ: {mask.shape} vs {grid.shape}")
        values = np.where(mask.bits, values, np.nan)
    with open(path, "wb") as f:
        f.write(b"Pf\n")
        f.write(f"{grid.width} {grid.height}\n".encode("ascii"))
        f.write(b"-1.0\n")
        f.write(values[::-1].astype("<f4").tobytes())


def read_pointmap_pfm(path: str | os.PathLike) -> tuple[PointMap, ValidityMask]:
    """Read a 3-channel PFM as a point map (x, y, z in the color planes)."""
    img, channels = _read_pfm_payload(path)
    if channels != 3:
        raise ValueError("expected 3-channel PFM (magic 'PF') for a point map")
    return PointMap(img), ValidityMask(np.isfinite(img).all(axis=2))


def write_pointmap_pfm(path: str | os.PathLike, pm: PointMap) -> None:
    """Write a point map as a 3-channel little-endian PFM."""
    with open(path, "wb") as f:
        f.write(b"PF\n")
        f.write(f"{pm.width} {pm.height}\n".encode("ascii"))
        f.write(b"-1.0\n")
        f.write(pm.xyz[::-1].astype("<f4").tobytes())


def write_csv_grid(path: str | os.PathLike, grid: DepthGrid, mask: ValidityMask | None = None) -> None:
    """Write one CSV row per grid row; invalid pixels are written as ``nan``."""
    values = grid.values
    if mask is not None:
        if mask.shape != grid.shape:
            raise ValueError(f"mask dimensions differ: {mask.shape} vs {grid.shape}")
        values = np.where(mask.bits, values, np.nan)
    with open(path, "w", encoding="ascii", newline="\n") as f:
        for row in values:
            f.write(",".join(repr(float(v)) for v in row))
            f.write("\n")


def read_csv_grid(path: str | os.PathLike, kind: Kind | str = Kind.GENERIC) -> tuple[DepthGrid, ValidityMask]:
    """Read a CSV grid; ``nan`` cells (or any non-finite value) come back invalid."""
    rows: list[list[float]] = []
    with open(path, "r", encoding="ascii") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rows.append([float(tok) for tok in line.split(",")])
            except ValueError as exc:
                raise ValueError(f"{path}: bad number on line {lineno}: {exc}") from None
    if not rows:
        raise ValueError(f"{path}: empty grid")
    width = len(rows[0])
    for i, row in enumerate(rows, start=1):
        if len(row) != width:
            raise ValueError(f"{path}: ragged row {i}: {len(row)} cells, expected {width}")
    values = np.array(rows, dtype=np.float64)
    return DepthGrid(values, kind), ValidityMask(np.isfinite(values))
