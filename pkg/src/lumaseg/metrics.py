"""Quality measures: pooled-histogram Shannon entropy and windowed MSSIM."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import RgbImage

GRAY_WEIGHTS = (0.299, 0.587, 0.114)


@dataclass(frozen=True)
class SsimParams:
    """Square uniform windows with the usual stabilizer constants."""

    window: int = 8
    k1: float = 0.01
    k2: float = 0.03
    dynamic_range: float = 255.0

    def __post_init__(self):
        if self.window < 2:
            raise ValueError(f"window must be >= 2, got {self.window}")
        if self.k1 <= 0 or self.k2 <= 0:
            raise ValueError("k1 and k2 must be positive")


def entropy(img: RgbImage, per_channel: bool = False) -> float:
    """Shannon entropy of the intensity histogram, in bits.

    All R, G, B samples are pooled into one 256-bin histogram, treating
    the color image as a stack of gray samples. ``per_channel`` averages
    three per-channel entropies instead, kept for comparison only.
    """
    if per_channel:
        return float(
            np.mean([_entropy_of_counts(np.bincount(img.pixels[:, :, c].ravel(), minlength=256)) for c in range(3)])
        )
    counts = np.bincount(img.pixels.ravel(), minlength=256)
    return _entropy_of_counts(counts)


def _entropy_of_counts(counts: np.ndarray) -> float:
    total = counts.sum()
    probs = counts[counts > 0] / total
    return float(-(probs * np.log2(probs)).sum())


def ssim_window(a: np.ndarray, b: np.ndarray, p: SsimParams = SsimParams()) -> float:
    """Single-scale structural similarity of two equal-size gray windows.

    Sample statistics use 1/n normalization. Identical windows score 1.0
    exactly because numerator and denominator become the same expression.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"window shapes differ: {a.shape} vs {b.shape}")
    c1 = (p.k1 * p.dynamic_range) ** 2
    c2 = (p.k2 * p.dynamic_range) ** 2
    mu_a = a.mean()
    mu_b = b.mean()
    var_a = ((a - mu_a) ** 2).mean()
    var_b = ((b - mu_b) ** 2).mean()
    cov = ((a - mu_a) * (b - mu_b)).mean()
    return float(
        ((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2))
        / ((mu_a**2 + mu_b**2 + c1) * (var_a + var_b + c2))
    )


def to_gray(img: RgbImage) -> np.ndarray:
    """Luma-weighted gray plane on the 0..255 scale, unquantized."""
    px = img.pixels.astype(np.float64)
    wr, wg, wb = GRAY_WEIGHTS
    return px[:, :, 0] * wr + px[:, :, 1] * wg + px[:, :, 2] * wb


def mssim(img1: RgbImage, img2: RgbImage, p: SsimParams = SsimParams()) -> float:
    """Mean SSIM over non-overlapping gray windows.

    Images are tiled into window x window blocks; partial blocks at the
    right and bottom edges are dropped.
    """
    if (img1.height, img1.width) != (img2.height, img2.width):
        raise ValueError(
            f"image dimensions differ: {img1.height}x{img1.width} vs {img2.height}x{img2.width}"
        )
    if img1.height < p.window or img1.width < p.window:
        raise ValueError(
            f"images must be at least {p.window}x{p.window} for window size {p.window}"
        )
    g1 = to_gray(img1)
    g2 = to_gray(img2)
    w = p.window
    scores = []
    for ty in range(img1.height // w):
        for tx in range(img1.width // w):
            r0, c0 = ty * w, tx * w
            scores.append(ssim_window(g1[r0 : r0 + w, c0 : c0 + w], g2[r0 : r0 + w, c0 : c0 + w], p))
    return float(np.mean(scores))


def mse(img1: RgbImage, img2: RgbImage) -> float:
    """Mean squared error over raw 8-bit samples; debug output only."""
    if img1.pixels.shape != img2.pixels.shape:
        raise ValueError("image dimensions differ")
    diff = img1.pixels.astype(np.float64) - img2.pixels.astype(np.float64)
    return float((diff**2).mean())
