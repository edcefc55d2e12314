"""Reading and writing image files.

Supported formats: 8-bit RGB PNG (alpha stripped on read), binary PPM
(P6), and binary PGM (P5) for label rasters. Only this module touches the
filesystem; everything else works on in-memory types.
"""

from __future__ import annotations

import re
from pathlib import Path

import numpy as np
from PIL import Image

from .core import RgbImage


def read_image(path: str | Path) -> RgbImage:
    """Read a PNG or PPM file as an 8-bit RGB image."""
    path = Path(path)
    if path.suffix.lower() in (".ppm", ".pnm"):
        return read_ppm(path)
    with Image.open(path) as im:
        rgb = im.convert("RGB")
        return RgbImage(pixels=np.asarray(rgb, dtype=np.uint8))


def write_image(img: RgbImage, path: str | Path) -> None:
    """Write an RGB image; the suffix selects PNG or PPM."""
    path = Path(path)
    if path.suffix.lower() in (".ppm", ".pnm"):
        write_ppm(img, path)
        return
    Image.fromarray(np.asarray(img.pixels), mode="RGB").save(path, format="PNG")


def read_ppm(path: str | Path) -> RgbImage:
    """Read a binary (P6) PPM file with maxval 255."""
    data = Path(path).read_bytes()
    header, offset = _parse_netpbm_header(data, b"P6", path)
    width, height, maxval = header
    if maxval != 255:
        raise ValueError(f"{path}: only maxval 255 supported, got {maxval}")
    expected = width * height * 3
    raster = data[offset : offset + expected]
    if len(raster) != expected:
        raise ValueError(f"{path}: truncated raster, expected {expected} bytes")
    pixels = np.frombuffer(raster, dtype=np.uint8).reshape(height, width, 3)
    return RgbImage(pixels=pixels)


def write_ppm(img: RgbImage, path: str | Path) -> None:
    header = f"P6\n{img.width} {img.height}\n255\n".encode("ascii")
    Path(path).write_bytes(header + img.pixels.tobytes())


def write_pgm(gray: np.ndarray, path: str | Path) -> None:
    """Write a 2-d uint8 array as a binary (P5) PGM file."""
    arr = np.asarray(gray)
    if arr.ndim != 2 or arr.dtype != np.uint8:
        raise ValueError(f"expected 2-d uint8 array, got {arr.shape} {arr.dtype}")
    header = f"P5\n{arr.shape[1]} {arr.shape[0]}\n255\n".encode("ascii")
    Path(path).write_bytes(header + arr.tobytes())


def read_pgm(path: str | Path) -> np.ndarray:
    data = Path(path).read_bytes()
    (width, height, maxval), offset = _parse_netpbm_header(data, b"P5", path)
    if maxval != 255:
        raise ValueError(f"{path}: only maxval 255 supported, got {maxval}")
    raster = data[offset : offset + width * height]
    if len(raster) != width * height:
        raise ValueError(f"{path}: truncated raster")
    return np.frombuffer(raster, dtype=np.uint8).reshape(height, width).copy()


def _parse_netpbm_header(data: bytes, magic: bytes, path) -> tuple[tuple[int, int, int], int]:
    """Parse a netpbm header, returning ((w, h, maxval), raster offset).

    Comments (# to end of line) may appear between tokens, per the format.
    """
    if not data.startswith(magic):
        raise ValueError(f"{path}: not a {magic.decode()} file")
    pos = len(magic)
    fields: list[int] = []
    while len(fields) < 3:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos : pos + 1] == b"#":
            eol = data.find(b"\n", pos)
            pos = len(data) if eol == -1 else eol + 1
            continue
        m = re.match(rb"\d+", data[pos:])
        if not m:
            raise ValueError(f"{path}: malformed netpbm header")
        fields.append(int(m.group()))
        pos += m.end()
    # exactly one whitespace byte separates the header from the raster
    pos += 1
    return (fields[0], fields[1], fields[2]), pos
