"""K-Means color segmentation over pixels of the working color space."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .colorspace import ColorSpace, HsvImage, LabImage, convert_from_rgb
from .core import RgbImage
from . import imageio


class FeatureMode(enum.Enum):
    """Which channels feed the clusterer.

    CHROMA_LUMA uses everything; CHROMA drops the luma column; RAW skips
    the hue wraparound embedding and feeds channels as plain scalars, kept
    for ablation.
    """

    CHROMA_LUMA = "chroma-luma"
    CHROMA = "chroma"
    RAW = "raw"


@dataclass(frozen=True)
class FeatureMatrix:
    """One row per pixel, one column per feature, all scaled to [0, 1]."""

    values: np.ndarray
    width: int
    height: int
    provenance: str

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.ndim != 2 or vals.shape[1] < 1:
            raise ValueError(f"expected (rows, cols) feature array, got {vals.shape}")
        if vals.shape[0] != self.width * self.height:
            raise ValueError(
                f"{vals.shape[0]} rows but width*height = {self.width * self.height}"
            )
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)


@dataclass(frozen=True)
class KMeansParams:
    k: int = 4
    max_iters: int = 100
    tol: float = 0.0
    seed: int = 0
    restarts: int = 5

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")
        if self.tol < 0:
            raise ValueError(f"tol must be >= 0, got {self.tol}")
        if self.restarts < 1:
            raise ValueError(f"restarts must be >= 1, got {self.restarts}")


@dataclass(frozen=True)
class LabelMap:
    """Per-pixel cluster assignment plus the centers and final objective."""

    labels: np.ndarray
    centers: np.ndarray
    objective: float
    width: int
    height: int

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64)
        if labels.shape != (self.height, self.width):
            raise ValueError(f"labels shape {labels.shape} != ({self.height}, {self.width})")
        centers = np.asarray(self.centers, dtype=np.float64)
        if labels.size and (labels.min() < 0 or labels.max() >= centers.shape[0]):
            raise ValueError("labels must lie in [0, k)")
        labels = labels.copy()
        labels.setflags(write=False)
        centers = centers.copy()
        centers.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "centers", centers)

    @property
    def k(self) -> int:
        return self.centers.shape[0]


def extract_features(img: HsvImage | LabImage, mode: FeatureMode = FeatureMode.CHROMA_LUMA) -> FeatureMatrix:
    """Flatten an image into clusterable rows.

    Hue is embedded as (cos H, sin H) scaled by saturation, so the angular
    seam disappears and achromatic pixels do not scatter by a meaningless
    hue; the embedded coordinates are then rescaled from [-1, 1] to [0, 1].
    """
    if isinstance(img, HsvImage):
        h = img.h.values.ravel()
        s = img.s.values.ravel()
        v = img.v.values.ravel()
        if mode is FeatureMode.RAW:
            cols = [h / img.h.range[1], s, v]
            provenance = "hsv:h,s,v"
        else:
            cos_h = (s * np.cos(h) + 1.0) / 2.0
            sin_h = (s * np.sin(h) + 1.0) / 2.0
            if mode is FeatureMode.CHROMA:
                cols = [cos_h, sin_h, s]
                provenance = "hsv:s*cos_h,s*sin_h,s"
            else:
                cols = [cos_h, sin_h, s, v]
                provenance = "hsv:s*cos_h,s*sin_h,s,v"
    elif isinstance(img, LabImage):
        l = img.l.values.ravel() / 100.0
        a = (img.a.values.ravel() + 128.0) / 256.0
        b = (img.b.values.ravel() + 128.0) / 256.0
        if mode is FeatureMode.CHROMA:
            cols = [a, b]
            provenance = "lab:a,b"
        else:
            cols = [l, a, b]
            provenance = "lab:l,a,b"
    else:
        raise TypeError(f"expected HsvImage or LabImage, got {type(img).__name__}")
    return FeatureMatrix(
        values=np.column_stack(cols),
        width=img.width,
        height=img.height,
        provenance=provenance,
    )


def kmeans(f: FeatureMatrix, p: KMeansParams) -> LabelMap:
    """Lloyd's algorithm, best of ``restarts`` seeded initializations.

    Assignment breaks ties toward the lowest center index, empty clusters
    are reseeded at the point farthest from its current center, and labels
    are renumbered by first pixel occurrence so identical partitions
    compare equal regardless of seeding order.
    """
    X = f.values
    distinct = np.unique(X, axis=0).shape[0]
    if p.k > distinct:
        raise ValueError(f"k={p.k} exceeds the {distinct} distinct feature rows")

    rng = np.random.default_rng(p.seed)
    best_labels = None
    best_centers = None
    best_obj = np.inf
    for _ in range(p.restarts):
        labels, centers, obj = _lloyd(X, _seed_centers(X, p.k, rng), p.max_iters, p.tol)
        if obj < best_obj:
            best_labels, best_centers, best_obj = labels, centers, obj

    labels, centers = _canonicalize(best_labels, best_centers)
    return LabelMap(
        labels=labels.reshape(f.height, f.width),
        centers=centers,
        objective=float(best_obj),
        width=f.width,
        height=f.height,
    )


def _seed_centers(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """Greedy D^2-weighted seeding from a random first center."""
    n = X.shape[0]
    centers = np.empty((k, X.shape[1]))
    centers[0] = X[rng.integers(n)]
    d2 = ((X - centers[0]) ** 2).sum(axis=1)
    for j in range(1, k):
        total = d2.sum()
        if total > 0:
            idx = rng.choice(n, p=d2 / total)
        else:
            idx = rng.integers(n)
        centers[j] = X[idx]
        d2 = np.minimum(d2, ((X - centers[j]) ** 2).sum(axis=1))
    return centers


def _lloyd(X: np.ndarray, centers: np.ndarray, max_iters: int, tol: float):
    n, k = X.shape[0], centers.shape[0]
    prev_obj = np.inf
    prev_labels = None
    labels = None
    obj = np.inf
    for _ in range(max_iters):
        d2 = ((X[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        labels = np.argmin(d2, axis=1)  # argmin takes the first minimum: lowest index wins
        d2min = d2[np.arange(n), labels]
        obj = float(d2min.sum())
        assert obj <= prev_obj * (1 + 1e-12) + 1e-12, "objective increased"

        reseeded = False
        new_centers = np.empty_like(centers)
        for j in range(k):
            members = labels == j
            if members.any():
                new_centers[j] = X[members].mean(axis=0)
            else:
                far = int(np.argmax(d2min))
                new_centers[j] = X[far]
                d2min = d2min.copy()
                d2min[far] = 0.0
                reseeded = True

        stable = prev_labels is not None and np.array_equal(labels, prev_labels)
        small_step = tol > 0 and np.isfinite(prev_obj) and (prev_obj - obj) <= tol * max(obj, 1e-300)
        if not reseeded and (stable or small_step):
            centers = new_centers  # means of the final assignment
            break
        centers = new_centers
        prev_obj = obj
        prev_labels = labels
    return labels, centers, obj


def _canonicalize(labels: np.ndarray, centers: np.ndarray):
    """Renumber labels in order of first occurrence; reorder centers to match."""
    k = centers.shape[0]
    _, first_idx = np.unique(labels, return_index=True)
    used = labels[np.sort(first_idx)]
    order = list(used) + [j for j in range(k) if j not in set(used.tolist())]
    remap = np.empty(k, dtype=np.int64)
    for new, old in enumerate(order):
        remap[old] = new
    return remap[labels], centers[order]


def segment_image(
    img: RgbImage,
    space: ColorSpace,
    p: KMeansParams,
    mode: FeatureMode = FeatureMode.CHROMA_LUMA,
) -> LabelMap:
    """Convert to the working space, extract features, cluster."""
    converted = convert_from_rgb(img, space)
    return kmeans(extract_features(converted, mode), p)


def render_segmentation(img: RgbImage, lm: LabelMap) -> RgbImage:
    """Recolor every pixel with the mean RGB color of its cluster."""
    if (lm.height, lm.width) != (img.height, img.width):
        raise ValueError(
            f"label map {lm.height}x{lm.width} does not match image {img.height}x{img.width}"
        )
    pixels = img.pixels.reshape(-1, 3).astype(np.float64)
    labels = lm.labels.ravel()
    out = np.empty_like(pixels)
    for j in np.unique(labels):
        members = labels == j
        out[members] = pixels[members].mean(axis=0)
    quantized = np.clip(np.rint(out), 0, 255).astype(np.uint8)
    return RgbImage(pixels=quantized.reshape(img.height, img.width, 3))


def save_label_map(lm: LabelMap, path) -> None:
    """Serialize the raw labels as a binary PGM (P5) raster."""
    if lm.k > 256:
        raise ValueError(f"cannot store {lm.k} labels in an 8-bit PGM")
    imageio.write_pgm(lm.labels.astype(np.uint8), path)
