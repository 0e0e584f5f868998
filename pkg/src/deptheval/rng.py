"""Seeded PRNG for reproducible synthetic experiments.

The generator is SplitMix64: a 64-bit counter advanced by the golden-gamma
constant, pushed through the usual two-round xor/multiply finalizer.  A
stream is fully determined by ``(seed, stream_id)``, so independent
substreams (one per disturbance level) give bitwise-identical results
whether levels run serially or in parallel.

Uniform doubles use the top 53 bits of a draw (``u = (x >> 11) * 2**-53``,
so ``u`` is in [0, 1)).  Gaussians use Box-Muller over two uniform draws --
the sine half of the pair is never cached, so every Gaussian consumes
exactly two uniforms and scalar and vectorized paths walk the same stream.

Cross-language bitwise equality is a non-goal; reproducibility within this
package is the contract.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_INV_2_53 = 1.0 / (1 << 53)

# Reserved stream for setup draws (base grids), distinct from per-level
# streams which use small ids 0, 1, 2, ...
SETUP_STREAM = 1 << 63


def _mix64(z: int) -> int:
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
    return z ^ (z >> 31)


def _mix64_array(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
    return z ^ (z >> np.uint64(31))


@dataclass(frozen=True)
class RngSpec:
    """(seed, stream_id) pair that fully determines a stream of draws."""

    seed: int
    stream_id: int = 0

    def make(self) -> "Prng":
        return Prng(self.seed, self.stream_id)


class Prng:
    """One SplitMix64 stream."""

    __slots__ = ("_state",)

    def __init__(self, seed: int, stream_id: int = 0):
        # The finalizer is a bijection, so distinct stream ids can never
        # collide for a fixed seed.
        self._state = _mix64((seed & _MASK64) ^ _mix64(stream_id & _MASK64))

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK64
        return _mix64(self._state)

    def next_u64_block(self, count: int) -> np.ndarray:
        """Vectorized draw of ``count`` words, identical to ``count`` scalar draws."""
        counters = np.uint64(self._state) + np.arange(1, count + 1, dtype=np.uint64) * np.uint64(
            _GOLDEN
        )
        self._state = (self._state + count * _GOLDEN) & _MASK64
        return _mix64_array(counters)

    def uniform01(self) -> float:
        return (self.next_u64() >> 11) * _INV_2_53

    def uniform01_block(self, count: int) -> np.ndarray:
        block = self.next_u64_block(count)
        return (block >> np.uint64(11)).astype(np.float64) * _INV_2_53


def uniform_draw(rng: Prng, lo: float, hi: float) -> float:
    """One double from [lo, hi)."""
    if not lo < hi:
        raise ValueError(f"need lo < hi, got [{lo}, {hi})")
    return lo + (hi - lo) * rng.uniform01()


def gaussian_draw(rng: Prng, sigma: float) -> float:
    """One zero-mean Gaussian; sigma = 0 returns exactly 0.0."""
    if sigma < 0:
        raise ValueError(f"sigma must be >= 0, got {sigma}")
    u1 = rng.uniform01()
    u2 = rng.uniform01()
    # 1 - u1 is in (0, 1], so the log is always finite.
    return sigma * (np.sqrt(-2.0 * np.log1p(-u1)) * np.cos(2.0 * np.pi * u2))


def uniform_grid(
    rng: Prng, shape: tuple[int, int], lo: float, hi: float, exclude_low: bool = False
) -> np.ndarray:
    """Grid of uniform draws from [lo, hi); ``exclude_low`` resamples exact-lo hits.

    The resampling pulls replacements from the same stream, so the open-low
    variant stays deterministic (a redraw happens with probability 2**-53
    per pixel and the reciprocal of every drawn value is well defined).
    """
    if not lo < hi:
        raise ValueError(f"need lo < hi, got [{lo}, {hi})")
    n = shape[0] * shape[1]
    vals = lo + (hi - lo) * rng.uniform01_block(n)
    if exclude_low:
        low = vals == lo
        while low.any():
            vals[low] = lo + (hi - lo) * rng.uniform01_block(int(low.sum()))
            low = vals == lo
    return vals.reshape(shape)


def gaussian_grid(rng: Prng, shape: tuple[int, int], sigma: float) -> np.ndarray:
    """Grid of zero-mean Gaussians, two uniforms consumed per pixel."""
    if sigma < 0:
        raise ValueError(f"sigma must be >= 0, got {sigma}")
    n = shape[0] * shape[1]
    block = rng.uniform01_block(2 * n)
    u1 = block[0::2]
    u2 = block[1::2]
    z = np.sqrt(-2.0 * np.log1p(-u1)) * np.cos(2.0 * np.pi * u2)
    return (sigma * z).reshape(shape)
