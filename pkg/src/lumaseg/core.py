"""Image and histogram data model shared by every other module.

Images are 8-bit interleaved RGB rasters; all computation happens on
real-valued single-channel planes with an explicitly declared value range,
so that channels with different native ranges (value in [0, 1], lightness
in [0, 100]) share one code path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def _freeze(arr: np.ndarray) -> np.ndarray:
    """Return a read-only copy so dataclass instances stay immutable."""
    out = np.array(arr, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class RgbImage:
    """Interleaved 8-bit three-channel raster, the external I/O type.

    ``pixels`` has shape (height, width, 3), dtype uint8, row-major.
    """

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim != 3 or px.shape[2] != 3:
            raise ValueError(f"expected (h, w, 3) pixel array, got shape {px.shape}")
        if px.shape[0] < 1 or px.shape[1] < 1:
            raise ValueError("image must be at least 1x1")
        if px.dtype != np.uint8:
            raise ValueError(f"expected uint8 pixels, got {px.dtype}")
        object.__setattr__(self, "pixels", _freeze(px))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def __eq__(self, other) -> bool:
        return isinstance(other, RgbImage) and np.array_equal(self.pixels, other.pixels)


@dataclass(frozen=True)
class ChannelPlane:
    """Single-channel real-valued raster in a declared (lo, hi) range."""

    values: np.ndarray
    range: tuple[float, float] = (0.0, 1.0)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.ndim != 2:
            raise ValueError(f"expected 2-d value array, got shape {vals.shape}")
        if vals.shape[0] < 1 or vals.shape[1] < 1:
            raise ValueError("plane must be at least 1x1")
        lo, hi = float(self.range[0]), float(self.range[1])
        if not lo < hi:
            raise ValueError(f"range lo must be < hi, got ({lo}, {hi})")
        if vals.size and (vals.min() < lo or vals.max() > hi):
            raise ValueError(
                f"plane values [{vals.min()}, {vals.max()}] fall outside "
                f"declared range ({lo}, {hi})"
            )
        object.__setattr__(self, "values", _freeze(vals))
        object.__setattr__(self, "range", (lo, hi))

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class Histogram:
    """Binned counts over a channel plane.

    Counts are real-valued, not integer: contrast-limited clipping at a
    fractional level produces fractional counts and needs no special case.
    """

    counts: np.ndarray
    source_range: tuple[float, float] = (0.0, 1.0)

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.float64)
        if counts.ndim != 1 or counts.size < 1:
            raise ValueError("counts must be a non-empty 1-d array")
        if counts.min() < 0:
            raise ValueError("histogram counts must be non-negative")
        lo, hi = float(self.source_range[0]), float(self.source_range[1])
        if not lo < hi:
            raise ValueError(f"source_range lo must be < hi, got ({lo}, {hi})")
        object.__setattr__(self, "counts", _freeze(counts))
        object.__setattr__(self, "source_range", (lo, hi))

    @property
    def bin_count(self) -> int:
        return self.counts.size

    @property
    def total(self) -> float:
        return float(self.counts.sum())


@dataclass(frozen=True)
class Cdf:
    """Cumulative probabilities per bin; non-decreasing, ending at 1."""

    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.ndim != 1 or vals.size < 1:
            raise ValueError("cdf values must be a non-empty 1-d array")
        if np.any(np.diff(vals) < 0):
            raise ValueError("cdf values must be non-decreasing")
        if abs(vals[-1] - 1.0) > 1e-9:
            raise ValueError(f"cdf must end at 1, got {vals[-1]}")
        object.__setattr__(self, "values", _freeze(vals))

    @property
    def bin_count(self) -> int:
        return self.values.size


def bin_indices(plane: ChannelPlane, bin_count: int) -> np.ndarray:
    """Map every sample to its bin index.

    Bins are half-open over the declared range, with the top edge folded
    into the last bin so every in-range value has exactly one bin.
    """
    if bin_count < 2:
        raise ValueError(f"bin_count must be >= 2, got {bin_count}")
    lo, hi = plane.range
    scaled = (plane.values - lo) / (hi - lo) * bin_count
    idx = np.floor(scaled).astype(np.int64)
    return np.clip(idx, 0, bin_count - 1)


def build_histogram(plane: ChannelPlane, bin_count: int = 256) -> Histogram:
    """Count samples of ``plane`` into ``bin_count`` equal-width bins."""
    if plane.values.size == 0:
        raise ValueError("cannot histogram an empty plane")
    idx = bin_indices(plane, bin_count)
    counts = np.bincount(idx.ravel(), minlength=bin_count).astype(np.float64)
    return Histogram(counts=counts, source_range=plane.range)


def to_pdf(h: Histogram) -> np.ndarray:
    """Normalize histogram counts to per-bin probabilities."""
    total = h.counts.sum()
    if total <= 0:
        raise ValueError("cannot normalize an all-zero histogram")
    return h.counts / total


def to_cdf(h: Histogram) -> Cdf:
    """Running sum of the pdf.

    The cumulative counts are divided by their own final value, so the
    last cdf entry is exactly 1.0 and integral counts stay exact.
    """
    cum = np.cumsum(h.counts)
    if cum[-1] <= 0:
        raise ValueError("cannot normalize an all-zero histogram")
    return Cdf(values=cum / cum[-1])


def split_channels(img: RgbImage) -> tuple[ChannelPlane, ChannelPlane, ChannelPlane]:
    """Split an RGB image into three [0, 1] planes (sample / 255)."""
    scaled = img.pixels.astype(np.float64) / 255.0
    return tuple(ChannelPlane(values=scaled[:, :, c]) for c in range(3))


def merge_channels(r: ChannelPlane, g: ChannelPlane, b: ChannelPlane) -> RgbImage:
    """Quantize three [0, 1] planes back to an 8-bit RGB image.

    Samples are rounded to the nearest count and clamped to [0, 255], so
    small out-of-range drift from upstream arithmetic is tolerated.
    """
    shapes = {r.values.shape, g.values.shape, b.values.shape}
    if len(shapes) != 1:
        raise ValueError(f"channel dimensions differ: {sorted(shapes)}")
    stacked = np.stack([r.values, g.values, b.values], axis=-1)
    quantized = np.clip(np.rint(stacked * 255.0), 0, 255).astype(np.uint8)
    return RgbImage(pixels=quantized)
