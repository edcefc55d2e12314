"""Global contrast enhancement: histogram equalization and specification.

Both techniques are built on one primitive, the inverse-CDF lookup: source
bin k is sent to the smallest target bin z whose cumulative probability
reaches the source's. Equalization is specification against a uniform
target, so the two reduce to each other exactly, bin for bin, rather than
only up to rounding.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import ChannelPlane, Histogram, bin_indices, build_histogram, to_cdf


@dataclass(frozen=True)
class IntensityMap:
    """Per-bin output bin index; non-decreasing because it is CDF-derived."""

    table: np.ndarray

    def __post_init__(self):
        table = np.asarray(self.table, dtype=np.int64)
        if table.ndim != 1 or table.size < 1:
            raise ValueError("table must be a non-empty 1-d array")
        if np.any(np.diff(table) < 0):
            raise ValueError("intensity map table must be non-decreasing")
        if table.min() < 0 or table.max() > table.size - 1:
            raise ValueError("table entries must lie in [0, bin_count - 1]")
        frozen = table.copy()
        frozen.setflags(write=False)
        object.__setattr__(self, "table", frozen)

    @property
    def bin_count(self) -> int:
        return self.table.size


def specification_map(source: Histogram, target: Histogram) -> IntensityMap:
    """Map source bins onto target bins by matching cumulative probability.

    Source bin k goes to the smallest z with target_cdf[z] >= source_cdf[k].
    Ties inherent to flat CDF stretches resolve to the smallest qualifying
    bin, the usual group-mapping rule.
    """
    if source.bin_count != target.bin_count:
        raise ValueError(
            f"bin counts differ: source {source.bin_count}, target {target.bin_count}"
        )
    source_cdf = to_cdf(source).values
    target_cdf = to_cdf(target).values
    table = np.searchsorted(target_cdf, source_cdf, side="left")
    return IntensityMap(table=np.clip(table, 0, target.bin_count - 1))


def equalization_map(h: Histogram) -> IntensityMap:
    """Equalization as specification against an exactly uniform target."""
    uniform = Histogram(counts=np.ones(h.bin_count), source_range=h.source_range)
    return specification_map(h, uniform)


def apply_map(plane: ChannelPlane, m: IntensityMap) -> ChannelPlane:
    """Bin each sample, push it through the table, return bin centers.

    Output samples sit at the representative center of their mapped bin,
    so the output range equals the input range and repeated application
    is stable.
    """
    lo, hi = plane.range
    idx = bin_indices(plane, m.bin_count)
    mapped = m.table[idx]
    out = lo + (mapped + 0.5) * (hi - lo) / m.bin_count
    return ChannelPlane(values=out, range=plane.range)


def equalize(plane: ChannelPlane, bin_count: int = 256) -> ChannelPlane:
    """Histogram-equalize a plane in place of its full declared range."""
    return apply_map(plane, equalization_map(build_histogram(plane, bin_count)))


def specify(plane: ChannelPlane, target: Histogram, bin_count: int | None = None) -> ChannelPlane:
    """Remap a plane so its histogram approximates the target's shape.

    The target is shape-only: its counts are normalized internally and its
    own source_range is ignored in favor of the plane's.
    """
    if bin_count is not None and bin_count != target.bin_count:
        raise ValueError(
            f"bin_count {bin_count} does not match target histogram ({target.bin_count})"
        )
    source = build_histogram(plane, target.bin_count)
    return apply_map(plane, specification_map(source, target))


def gaussian_target(bin_count: int = 256, sigma_bins: float | None = None) -> Histogram:
    """Bell-shaped target histogram centered on the middle bin.

    The default width scales with the bin count (48 bins at 256). Used as
    the stock target when none is supplied for histogram matching.
    """
    if sigma_bins is None:
        sigma_bins = bin_count * 48.0 / 256.0
    mean = (bin_count - 1) / 2.0
    k = np.arange(bin_count, dtype=np.float64)
    counts = np.exp(-0.5 * ((k - mean) / sigma_bins) ** 2)
    return Histogram(counts=counts / counts.sum())


def load_target_histogram(path: str | Path, bin_count: int | None = None) -> Histogram:
    """Load a target histogram from a CSV file of non-negative values.

    Values may be laid out one per line or comma-separated; they are
    normalized downstream, so any positive scale works.
    """
    values: list[float] = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            for cell in row:
                cell = cell.strip()
                if cell:
                    values.append(float(cell))
    if len(values) < 2:
        raise ValueError(f"{path}: expected at least 2 histogram values, got {len(values)}")
    counts = np.asarray(values, dtype=np.float64)
    if counts.min() < 0:
        raise ValueError(f"{path}: histogram values must be non-negative")
    if bin_count is not None and counts.size != bin_count:
        raise ValueError(f"{path}: expected {bin_count} values, got {counts.size}")
    return Histogram(counts=counts)
