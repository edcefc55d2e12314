"""RGB conversions to and from the two working color spaces, HSV and LAB.

Both spaces separate a luma channel (V, L) from chroma (H+S, a+b), which
is what lets enhancement touch brightness without shifting colors. Hue is
stored in radians in [0, 2*pi). Conversions are defined relative to sRGB
with the D65 white point.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .core import ChannelPlane, RgbImage

TAU = math.tau

HSV_LUMA_RANGE = (0.0, 1.0)
LAB_LUMA_RANGE = (0.0, 100.0)
LAB_CHROMA_RANGE = (-128.0, 127.0)

# sRGB <-> XYZ (D65, 2 degree observer)
_RGB_TO_XYZ = np.array(
    [
        [0.4124564, 0.3575761, 0.1804375],
        [0.2126729, 0.7151522, 0.0721750],
        [0.0193339, 0.1191920, 0.9503041],
    ]
)
_XYZ_TO_RGB = np.array(
    [
        [3.2404542, -1.5371385, -0.4985314],
        [-0.9692660, 1.8760108, 0.0415560],
        [0.0556434, -0.2040259, 1.0572252],
    ]
)
_WHITE = np.array([0.95047, 1.0, 1.08883])

_DELTA = 6.0 / 29.0  # lightness-function toe threshold


class ColorSpace(enum.Enum):
    HSV = "hsv"
    LAB = "lab"


@dataclass(frozen=True)
class HsvImage:
    h: ChannelPlane
    s: ChannelPlane
    v: ChannelPlane

    def __post_init__(self):
        if not (self.h.values.shape == self.s.values.shape == self.v.values.shape):
            raise ValueError("H, S, V planes must share dimensions")
        if self.h.range != (0.0, TAU) or self.s.range != (0.0, 1.0) or self.v.range != (0.0, 1.0):
            raise ValueError("HSV planes must carry ranges (0, 2*pi), (0, 1), (0, 1)")

    @property
    def width(self) -> int:
        return self.v.width

    @property
    def height(self) -> int:
        return self.v.height


@dataclass(frozen=True)
class LabImage:
    l: ChannelPlane
    a: ChannelPlane
    b: ChannelPlane

    def __post_init__(self):
        if not (self.l.values.shape == self.a.values.shape == self.b.values.shape):
            raise ValueError("L, a, b planes must share dimensions")
        if self.l.range != LAB_LUMA_RANGE:
            raise ValueError("L plane must carry range (0, 100)")
        if self.a.range != LAB_CHROMA_RANGE or self.b.range != LAB_CHROMA_RANGE:
            raise ValueError("a and b planes must carry range (-128, 127)")

    @property
    def width(self) -> int:
        return self.l.width

    @property
    def height(self) -> int:
        return self.l.height


def rgb_to_hsv(img: RgbImage) -> HsvImage:
    """Hexcone conversion; hue 0 for achromatic pixels by convention."""
    rgb = img.pixels.astype(np.float64) / 255.0
    r, g, b = rgb[:, :, 0], rgb[:, :, 1], rgb[:, :, 2]
    v = rgb.max(axis=2)
    c = v - rgb.min(axis=2)

    with np.errstate(invalid="ignore", divide="ignore"):
        s = np.where(v > 0, c / np.where(v > 0, v, 1.0), 0.0)
        safe_c = np.where(c > 0, c, 1.0)
        sector = np.select(
            [c == 0, v == r, v == g],
            [0.0, ((g - b) / safe_c) % 6.0, (b - r) / safe_c + 2.0],
            default=(r - g) / safe_c + 4.0,
        )
    h = sector * (TAU / 6.0)
    h = np.where(h >= TAU, 0.0, h)  # fold rounding spill at the seam
    return HsvImage(
        h=ChannelPlane(h, (0.0, TAU)),
        s=ChannelPlane(s, (0.0, 1.0)),
        v=ChannelPlane(v, (0.0, 1.0)),
    )


def hsv_to_rgb(img: HsvImage) -> RgbImage:
    """Inverse hexcone conversion back to quantized 8-bit RGB."""
    h, s, v = img.h.values, img.s.values, img.v.values
    hp = (h / (TAU / 6.0)) % 6.0
    i = np.clip(np.floor(hp).astype(np.int64), 0, 5)
    f = hp - i
    p = v * (1.0 - s)
    q = v * (1.0 - s * f)
    t = v * (1.0 - s * (1.0 - f))

    # one (r, g, b) choice per hue sector
    r = np.choose(i, [v, q, p, p, t, v])
    g = np.choose(i, [t, v, v, q, p, p])
    b = np.choose(i, [p, p, t, v, v, q])
    return merge_rgb01(r, g, b)


def rgb_to_lab(img: RgbImage) -> LabImage:
    """sRGB decompanding, XYZ (D65), then CIELAB with the linear toe."""
    rgb = img.pixels.astype(np.float64) / 255.0
    linear = _srgb_to_linear(rgb)
    xyz = linear @ _RGB_TO_XYZ.T
    fxyz = _lab_f(xyz / _WHITE)
    fx, fy, fz = fxyz[:, :, 0], fxyz[:, :, 1], fxyz[:, :, 2]
    l_plane = np.clip(116.0 * fy - 16.0, 0.0, 100.0)
    a_plane = np.clip(500.0 * (fx - fy), -128.0, 127.0)
    b_plane = np.clip(200.0 * (fy - fz), -128.0, 127.0)
    return LabImage(
        l=ChannelPlane(l_plane, LAB_LUMA_RANGE),
        a=ChannelPlane(a_plane, LAB_CHROMA_RANGE),
        b=ChannelPlane(b_plane, LAB_CHROMA_RANGE),
    )


def lab_to_rgb(img: LabImage) -> RgbImage:
    """Inverse CIELAB; out-of-gamut values are clamped in linear RGB."""
    l, a, b = img.l.values, img.a.values, img.b.values
    fy = (l + 16.0) / 116.0
    fx = fy + a / 500.0
    fz = fy - b / 200.0
    xyz = np.stack([_lab_f_inv(fx), _lab_f_inv(fy), _lab_f_inv(fz)], axis=-1) * _WHITE
    linear = np.clip(xyz @ _XYZ_TO_RGB.T, 0.0, 1.0)
    srgb = _linear_to_srgb(linear)
    return merge_rgb01(srgb[:, :, 0], srgb[:, :, 1], srgb[:, :, 2])


def luma_plane(img: HsvImage | LabImage) -> ChannelPlane:
    """Copy of the image's luma channel with its native range."""
    if isinstance(img, HsvImage):
        return ChannelPlane(img.v.values, HSV_LUMA_RANGE)
    if isinstance(img, LabImage):
        return ChannelPlane(img.l.values, LAB_LUMA_RANGE)
    raise TypeError(f"expected HsvImage or LabImage, got {type(img).__name__}")


def replace_luma(img: HsvImage | LabImage, new_luma: ChannelPlane) -> HsvImage | LabImage:
    """Swap in a new luma plane; chroma planes are reused untouched."""
    if isinstance(img, HsvImage):
        native = HSV_LUMA_RANGE
    elif isinstance(img, LabImage):
        native = LAB_LUMA_RANGE
    else:
        raise TypeError(f"expected HsvImage or LabImage, got {type(img).__name__}")
    if new_luma.values.shape != (img.height, img.width):
        raise ValueError(
            f"luma dimensions {new_luma.values.shape} do not match image "
            f"({img.height}, {img.width})"
        )
    if new_luma.range != native:
        raise ValueError(f"luma range {new_luma.range} does not match native {native}")
    if isinstance(img, HsvImage):
        return HsvImage(h=img.h, s=img.s, v=new_luma)
    return LabImage(l=new_luma, a=img.a, b=img.b)


def convert_from_rgb(img: RgbImage, space: ColorSpace) -> HsvImage | LabImage:
    return rgb_to_hsv(img) if space is ColorSpace.HSV else rgb_to_lab(img)


def convert_to_rgb(img: HsvImage | LabImage) -> RgbImage:
    return hsv_to_rgb(img) if isinstance(img, HsvImage) else lab_to_rgb(img)


def merge_rgb01(r: np.ndarray, g: np.ndarray, b: np.ndarray) -> RgbImage:
    stacked = np.stack([r, g, b], axis=-1)
    return RgbImage(pixels=np.clip(np.rint(stacked * 255.0), 0, 255).astype(np.uint8))


def _srgb_to_linear(c: np.ndarray) -> np.ndarray:
    return np.where(c <= 0.04045, c / 12.92, ((c + 0.055) / 1.055) ** 2.4)


def _linear_to_srgb(c: np.ndarray) -> np.ndarray:
    c = np.clip(c, 0.0, 1.0)
    return np.where(c <= 0.0031308, c * 12.92, 1.055 * c ** (1.0 / 2.4) - 0.055)


def _lab_f(t: np.ndarray) -> np.ndarray:
    return np.where(t > _DELTA**3, np.cbrt(t), t / (3.0 * _DELTA**2) + 4.0 / 29.0)


def _lab_f_inv(f: np.ndarray) -> np.ndarray:
    return np.where(f > _DELTA, f**3, 3.0 * _DELTA**2 * (f - 4.0 / 29.0))
