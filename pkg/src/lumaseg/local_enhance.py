"""Local contrast enhancement: per-pixel AHE and tiled, clip-limited CLAHE.

The CLAHE variant here determines its effective clipping level by binary
search: it finds the level M at which clipping plus equal redistribution
of the excess lands the histogram ceiling exactly on the requested budget,
instead of clipping at the budget and iterating the overflow.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ChannelPlane, Histogram, bin_indices
from .global_enhance import equalization_map


@dataclass(frozen=True)
class AheParams:
    """Per-pixel equalization over a (2r+1) x (2r+1) contextual region."""

    window_radius: int
    bin_count: int = 256

    def __post_init__(self):
        if self.window_radius < 1:
            raise ValueError(f"window_radius must be >= 1, got {self.window_radius}")
        if self.bin_count < 2:
            raise ValueError(f"bin_count must be >= 2, got {self.bin_count}")


@dataclass(frozen=True)
class ClaheParams:
    """Tile grid, contrast budget, and search tolerance.

    ``clip_limit`` is a multiple of the mean tile bin count; 1.0 is the
    conservation floor (the histogram flattens to uniform), larger values
    allow progressively more contrast. ``epsilon`` defaults to 1e-3 times
    the mean tile bin count, which keeps the stopping rule scale-free.
    """

    tiles_x: int = 8
    tiles_y: int = 8
    clip_limit: float = 2.0
    bin_count: int = 256
    epsilon: float | None = None

    def __post_init__(self):
        if self.tiles_x < 1 or self.tiles_y < 1:
            raise ValueError("tile counts must be >= 1")
        if self.clip_limit < 1.0:
            raise ValueError(f"clip_limit must be >= 1, got {self.clip_limit}")
        if self.bin_count < 2:
            raise ValueError(f"bin_count must be >= 2, got {self.bin_count}")
        if self.epsilon is not None and not self.epsilon > 0:
            raise ValueError(f"epsilon must be > 0, got {self.epsilon}")


@dataclass(frozen=True)
class ClipSearchResult:
    m: float
    excess_total: float
    iterations: int


def excess_above(counts: np.ndarray, m: float) -> float:
    """Total histogram mass above level m."""
    return float(np.maximum(counts - m, 0.0).sum())


def bsb_clip_search(h: Histogram, clip_level_counts: float, epsilon: float) -> ClipSearchResult:
    """Binary-search the clipping level matching a post-redistribution budget.

    Searches M in [0, max count] for the root of
    M + excess(M)/bin_count = clip_level_counts, so that clipping at M and
    spreading the excess equally tops every bin out at the budget. The
    residual at the returned M is at most epsilon and the search runs at
    most ceil(log2(max_count / epsilon)) + 1 iterations.
    """
    if clip_level_counts <= 0:
        raise ValueError(f"clip level must be positive, got {clip_level_counts}")
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    counts = h.counts
    total = counts.sum()
    if total <= 0:
        raise ValueError("cannot search an all-zero histogram")

    max_count = float(counts.max())
    mean_count = float(total) / h.bin_count
    if clip_level_counts >= max_count:
        # no bin exceeds the budget, nothing to clip
        return ClipSearchResult(m=max_count, excess_total=0.0, iterations=0)
    if clip_level_counts < mean_count:
        raise ValueError(
            f"clip level {clip_level_counts} is below the mean bin count "
            f"{mean_count}; redistribution cannot fit under the budget"
        )

    top = max_count
    bottom = 0.0
    m = 0.5 * (top + bottom)
    iterations = 0
    exact = False
    while top - bottom >= epsilon:
        iterations += 1
        m = 0.5 * (top + bottom)
        filled = m + excess_above(counts, m) / h.bin_count
        if filled > clip_level_counts:
            top = m
        elif filled < clip_level_counts:
            bottom = m
        else:
            exact = True
            break
    if not exact:
        m = 0.5 * (top + bottom)
    return ClipSearchResult(m=m, excess_total=excess_above(counts, m), iterations=iterations)


def clip_and_redistribute(h: Histogram, m: float) -> Histogram:
    """Clip the histogram at m and spread the excess equally over all bins."""
    if m < 0:
        raise ValueError(f"clip level must be >= 0, got {m}")
    clipped = np.minimum(h.counts, m)
    excess = float((h.counts - clipped).sum())
    return Histogram(counts=clipped + excess / h.bin_count, source_range=h.source_range)


def ahe(plane: ChannelPlane, p: AheParams) -> ChannelPlane:
    """Adaptive histogram equalization with true per-pixel windows.

    Each pixel is remapped through the equalization map of its own
    contextual region. Windows shrink at the borders rather than padding,
    and the histogram is updated incrementally as the window slides along
    a row, so the cost per pixel is O(bins) rather than O(window area).
    """
    height, width = plane.values.shape
    if height * width <= 1:
        raise ValueError("AHE needs a plane larger than 1x1")
    bins = bin_indices(plane, p.bin_count)
    lo, hi = plane.range
    r = p.window_radius
    nbins = p.bin_count

    # cumulative probability thresholds of the uniform target
    uniform_cdf = np.cumsum(np.ones(nbins)) / nbins

    out_bins = np.empty((height, width), dtype=np.int64)
    hist = np.empty(nbins, dtype=np.int64)
    for y in range(height):
        y0 = max(0, y - r)
        y1 = min(height, y + r + 1)
        x_hi = min(width, r + 1)
        hist[:] = np.bincount(bins[y0:y1, 0:x_hi].ravel(), minlength=nbins)
        npix = (y1 - y0) * x_hi
        for x in range(width):
            if x > 0:
                enter = x + r
                if enter < width:
                    col = bins[y0:y1, enter]
                    np.add.at(hist, col, 1)
                    npix += y1 - y0
                leave = x - r - 1
                if leave >= 0:
                    col = bins[y0:y1, leave]
                    np.subtract.at(hist, col, 1)
                    npix -= y1 - y0
            b = bins[y, x]
            s = int(hist[: b + 1].sum()) / npix
            out_bins[y, x] = np.searchsorted(uniform_cdf, s, side="left")
    out_bins = np.clip(out_bins, 0, nbins - 1)
    out = lo + (out_bins + 0.5) * (hi - lo) / nbins
    return ChannelPlane(values=out, range=plane.range)


def _tile_bounds(extent: int, tiles: int) -> list[tuple[int, int]]:
    """Split [0, extent) into ``tiles`` spans whose sizes differ by <= 1."""
    base, rem = divmod(extent, tiles)
    bounds = []
    start = 0
    for t in range(tiles):
        size = base + (1 if t < rem else 0)
        bounds.append((start, start + size))
        start += size
    return bounds


def clahe(plane: ChannelPlane, p: ClaheParams) -> ChannelPlane:
    """Clip-limited adaptive equalization over a tile grid.

    Per tile: histogram, binary-search clip level, equal redistribution,
    equalization map. Each pixel's output blends the four nearest tile
    maps bilinearly by its distance to their tile centers; pixels outside
    the outer ring of centers fall back to the nearest row or column.
    """
    height, width = plane.values.shape
    if height < p.tiles_y or width < p.tiles_x:
        raise ValueError(
            f"tile grid {p.tiles_y}x{p.tiles_x} does not fit a {height}x{width} plane"
        )
    lo, hi = plane.range
    nbins = p.bin_count
    bins = bin_indices(plane, nbins)

    rows = _tile_bounds(height, p.tiles_y)
    cols = _tile_bounds(width, p.tiles_x)

    # per-tile output values indexed by input bin
    tile_values = np.empty((p.tiles_y, p.tiles_x, nbins), dtype=np.float64)
    for ty, (r0, r1) in enumerate(rows):
        for tx, (c0, c1) in enumerate(cols):
            counts = np.bincount(bins[r0:r1, c0:c1].ravel(), minlength=nbins)
            hist = Histogram(counts=counts.astype(np.float64), source_range=plane.range)
            npix = (r1 - r0) * (c1 - c0)
            budget = p.clip_limit * npix / nbins
            eps = p.epsilon if p.epsilon is not None else 1e-3 * npix / nbins
            m = bsb_clip_search(hist, budget, eps).m
            table = equalization_map(clip_and_redistribute(hist, m)).table
            tile_values[ty, tx] = lo + (table + 0.5) * (hi - lo) / nbins

    cy = np.array([(r0 + r1 - 1) / 2.0 for r0, r1 in rows])
    cx = np.array([(c0 + c1 - 1) / 2.0 for c0, c1 in cols])
    y0, y1, wy = _blend_axis(np.arange(height, dtype=np.float64), cy)
    x0, x1, wx = _blend_axis(np.arange(width, dtype=np.float64), cx)

    wy = wy[:, None]
    wx = wx[None, :]
    ul = tile_values[y0[:, None], x0[None, :], bins]
    ur = tile_values[y0[:, None], x1[None, :], bins]
    ll = tile_values[y1[:, None], x0[None, :], bins]
    lr = tile_values[y1[:, None], x1[None, :], bins]
    out = (1.0 - wy) * ((1.0 - wx) * ul + wx * ur) + wy * ((1.0 - wx) * ll + wx * lr)
    return ChannelPlane(values=np.clip(out, lo, hi), range=plane.range)


def _blend_axis(coords: np.ndarray, centers: np.ndarray):
    """Bracketing center indices and blend weight for each coordinate."""
    hi_idx = np.searchsorted(centers, coords, side="left")
    lo_idx = np.clip(hi_idx - 1, 0, centers.size - 1)
    hi_idx = np.clip(hi_idx, 0, centers.size - 1)
    span = centers[hi_idx] - centers[lo_idx]
    safe = np.where(span > 0, span, 1.0)
    weight = np.where(span > 0, (coords - centers[lo_idx]) / safe, 0.0)
    return lo_idx, hi_idx, weight
