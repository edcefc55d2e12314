"""Deterministic synthetic test scenes.

Stand-ins for the usual photographic test material: a low-contrast gray
ramp, a two-tone blob image with an obvious 2-cluster structure, and a
multi-colored "produce on a table" scene with compressed contrast and
mild texture, which is the default subject for the experiment suites.
Every generator is a pure function of its arguments.
"""

from __future__ import annotations

import numpy as np

from .core import RgbImage


def low_contrast_ramp(width: int = 128, height: int = 128) -> RgbImage:
    """Horizontal gray ramp with luma compressed into [0.4, 0.6]."""
    ramp = np.linspace(0.4, 0.6, width)
    v = np.tile(ramp, (height, 1))
    gray = np.rint(v * 255.0).astype(np.uint8)
    return RgbImage(pixels=np.stack([gray, gray, gray], axis=-1))


def two_tone_blobs(width: int = 128, height: int = 128, seed: int = 7) -> RgbImage:
    """Exactly two flat colors: elliptical blobs on a plain background."""
    rng = np.random.default_rng(seed)
    background = np.array([60, 70, 90], dtype=np.uint8)
    foreground = np.array([200, 160, 40], dtype=np.uint8)
    out = np.empty((height, width, 3), dtype=np.uint8)
    out[:] = background
    yy, xx = np.mgrid[0:height, 0:width]
    for _ in range(3):
        cx = rng.uniform(0.2, 0.8) * width
        cy = rng.uniform(0.2, 0.8) * height
        rx = rng.uniform(0.1, 0.2) * width
        ry = rng.uniform(0.1, 0.2) * height
        mask = ((xx - cx) / rx) ** 2 + ((yy - cy) / ry) ** 2 <= 1.0
        out[mask] = foreground
    return RgbImage(pixels=out)


def peppers_scene(width: int = 128, height: int = 128, seed: int = 11) -> RgbImage:
    """Colored produce-like blobs under uneven, muted lighting.

    Several saturated elliptical bodies on a dark olive background, an
    illumination gradient that squeezes global contrast, and a touch of
    seeded texture so local histograms are not degenerate.
    """
    rng = np.random.default_rng(seed)
    colors = np.array(
        [
            [186, 38, 28],   # red
            [46, 142, 36],   # green
            [206, 176, 34],  # yellow
            [122, 44, 128],  # purple
            [212, 118, 24],  # orange
            [162, 28, 52],   # dark red
        ],
        dtype=np.float64,
    )
    base = np.empty((height, width, 3), dtype=np.float64)
    base[:] = np.array([44.0, 52.0, 30.0])

    yy, xx = np.mgrid[0:height, 0:width]
    for i in range(9):
        color = colors[i % len(colors)]
        cx = rng.uniform(0.12, 0.88) * width
        cy = rng.uniform(0.12, 0.88) * height
        rx = rng.uniform(0.10, 0.22) * width
        ry = rng.uniform(0.10, 0.22) * height
        angle = rng.uniform(0.0, np.pi)
        dx = (xx - cx) * np.cos(angle) + (yy - cy) * np.sin(angle)
        dy = -(xx - cx) * np.sin(angle) + (yy - cy) * np.cos(angle)
        mask = (dx / rx) ** 2 + (dy / ry) ** 2 <= 1.0
        # simple top-left shading inside each body
        shade = 0.75 + 0.25 * ((dx / rx + 1.0) / 2.0)
        base[mask] = color * shade[mask, None]

    # uneven scene illumination, compressing global contrast
    gx = xx / max(width - 1, 1)
    gy = yy / max(height - 1, 1)
    illum = 0.55 + 0.35 * (0.6 * gx + 0.4 * (1.0 - gy))
    base *= illum[:, :, None]

    texture = rng.normal(0.0, 4.0, size=base.shape)
    out = np.clip(np.rint(base + texture), 0, 255).astype(np.uint8)
    return RgbImage(pixels=out)


BUILTIN_IMAGES = {
    "ramp": low_contrast_ramp,
    "blobs": two_tone_blobs,
    "peppers": peppers_scene,
}


def synthetic_image(name: str, width: int = 128, height: int = 128) -> RgbImage:
    """Look up a bundled scene by name (``ramp``, ``blobs``, ``peppers``)."""
    try:
        generator = BUILTIN_IMAGES[name]
    except KeyError:
        known = ", ".join(sorted(BUILTIN_IMAGES))
        raise ValueError(f"unknown synthetic image {name!r}; known: {known}") from None
    return generator(width=width, height=height)
