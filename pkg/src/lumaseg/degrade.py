"""Seeded noise injection for robustness experiments.

Both models corrupt the RGB image before any color space conversion and
are bit-reproducible given (image, parameters, seed). The generator is
numpy's default_rng (PCG64); its identity is recorded in report metadata.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import RgbImage

RNG_NAME = "numpy.random.default_rng (PCG64)"


@dataclass(frozen=True)
class SaltPepperNoise:
    """Whole-pixel corruption to pure black or pure white."""

    density: float
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.density <= 1.0:
            raise ValueError(f"density must be in [0, 1], got {self.density}")

    def apply(self, img: RgbImage) -> RgbImage:
        return add_salt_pepper(img, self.density, self.seed)

    def label(self) -> str:
        return f"salt-pepper:{self.density:g}"


@dataclass(frozen=True)
class GaussianNoise:
    """Additive i.i.d. Gaussian noise on the normalized [0, 1] scale."""

    mean: float = 0.0
    variance: float = 0.01
    seed: int = 0

    def __post_init__(self):
        if self.variance < 0:
            raise ValueError(f"variance must be >= 0, got {self.variance}")

    def apply(self, img: RgbImage) -> RgbImage:
        return add_gaussian(img, self.mean, self.variance, self.seed)

    def label(self) -> str:
        return f"gaussian:{self.mean:g}:{self.variance:g}"


NoiseSpec = SaltPepperNoise | GaussianNoise


def add_salt_pepper(img: RgbImage, density: float, seed: int) -> RgbImage:
    """Corrupt each pixel independently with the given probability.

    A corrupted pixel becomes (0,0,0) or (255,255,255) with equal chance;
    all three channels flip together, which is what gives the speckled
    look rather than colored confetti.
    """
    if not 0.0 <= density <= 1.0:
        raise ValueError(f"density must be in [0, 1], got {density}")
    rng = np.random.default_rng(seed)
    h, w = img.height, img.width
    corrupted = rng.random((h, w)) < density
    salt = rng.random((h, w)) < 0.5
    out = np.array(img.pixels)
    out[corrupted & salt] = 255
    out[corrupted & ~salt] = 0
    return RgbImage(pixels=out)


def add_gaussian(img: RgbImage, mean: float, variance: float, seed: int) -> RgbImage:
    """Add N(mean, variance) per channel on the [0, 1] scale and requantize."""
    if variance < 0:
        raise ValueError(f"variance must be >= 0, got {variance}")
    rng = np.random.default_rng(seed)
    noise = rng.normal(mean, np.sqrt(variance), size=img.pixels.shape)
    shifted = img.pixels.astype(np.float64) / 255.0 + noise
    out = np.clip(np.rint(np.clip(shifted, 0.0, 1.0) * 255.0), 0, 255).astype(np.uint8)
    return RgbImage(pixels=out)


def parse_noise_spec(text: str, seed: int = 0) -> NoiseSpec:
    """Parse a CLI noise spec: ``salt-pepper:0.2`` or ``gaussian:0:0.01``."""
    parts = text.split(":")
    kind = parts[0].strip().lower()
    try:
        if kind in ("salt-pepper", "saltpepper", "sp") and len(parts) == 2:
            return SaltPepperNoise(density=float(parts[1]), seed=seed)
        if kind in ("gaussian", "gauss") and len(parts) == 3:
            return GaussianNoise(mean=float(parts[1]), variance=float(parts[2]), seed=seed)
    except ValueError as exc:
        raise ValueError(f"bad noise spec {text!r}: {exc}") from None
    raise ValueError(
        f"bad noise spec {text!r}; expected salt-pepper:<density> or gaussian:<mean>:<variance>"
    )
