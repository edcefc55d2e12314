"""Experiment suites: enhancement comparison and enhance-then-segment.

A suite walks the full matrix of images x color spaces x techniques
(x noise conditions when configured), writes every intermediate artifact,
and emits one CSV report row per cell plus a JSON metadata sidecar. Rows
appear in deterministic matrix order and all content except measured
runtimes is a pure function of (inputs, config, seed).
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .colorspace import ColorSpace, convert_from_rgb, convert_to_rgb, luma_plane, replace_luma
from .core import ChannelPlane, Histogram, RgbImage, build_histogram
from .degrade import RNG_NAME, GaussianNoise, NoiseSpec, SaltPepperNoise
from .global_enhance import equalize, gaussian_target, load_target_histogram, specify
from .imageio import read_image, write_image
from .local_enhance import AheParams, ClaheParams, ahe, clahe
from .metrics import SsimParams, entropy, mssim
from .segment import FeatureMode, KMeansParams, render_segmentation, save_label_map, segment_image
from .synthetic import synthetic_image

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

REPORT_HEADER = ("image_id", "color_space", "technique", "noise", "entropy_bits", "mssim", "runtime_ms")
HIST_HEADER = ("bin_index", "count_before", "count_after")


@dataclass(frozen=True)
class HistEq:
    bin_count: int = 256

    def label(self) -> str:
        return "hist-eq"


@dataclass(frozen=True)
class HistSpec:
    """Histogram matching; falls back to the stock bell-shaped target."""

    target: Histogram | None = None
    bin_count: int = 256

    def label(self) -> str:
        return "hist-spec"


@dataclass(frozen=True)
class Ahe:
    params: AheParams = AheParams(window_radius=8)

    def label(self) -> str:
        return "ahe"


@dataclass(frozen=True)
class BsbClahe:
    params: ClaheParams = ClaheParams()

    def label(self) -> str:
        return "bsb-clahe"


Technique = HistEq | HistSpec | Ahe | BsbClahe

TECHNIQUE_NAMES = ("hist-eq", "hist-spec", "ahe", "bsb-clahe")


def apply_technique(plane: ChannelPlane, t: Technique) -> ChannelPlane:
    if isinstance(t, HistEq):
        return equalize(plane, t.bin_count)
    if isinstance(t, HistSpec):
        target = t.target if t.target is not None else gaussian_target(t.bin_count)
        return specify(plane, target)
    if isinstance(t, Ahe):
        return ahe(plane, t.params)
    if isinstance(t, BsbClahe):
        return clahe(plane, t.params)
    raise TypeError(f"unknown technique {t!r}")


def technique_bin_count(t: Technique) -> int:
    if isinstance(t, (HistEq, HistSpec)):
        return t.bin_count
    return t.params.bin_count


def enhance_image(img: RgbImage, space: ColorSpace, t: Technique) -> RgbImage:
    """Enhance only the luma channel of ``img`` in the given color space.

    Chroma planes pass through the round trip untouched, so colors shift
    only through the final quantization back to 8-bit RGB.
    """
    converted = convert_from_rgb(img, space)
    enhanced_luma = apply_technique(luma_plane(converted), t)
    return convert_to_rgb(replace_luma(converted, enhanced_luma))


@dataclass(frozen=True)
class ImageSource:
    """An input image: a file path or a bundled ``synthetic:<name>`` scene."""

    image_id: str
    path: str

    def load(self) -> RgbImage:
        if self.path.startswith("synthetic:"):
            return synthetic_image(self.path.split(":", 1)[1])
        return read_image(self.path)


@dataclass(frozen=True)
class ExperimentConfig:
    images: tuple[ImageSource, ...]
    output_dir: Path
    color_spaces: tuple[ColorSpace, ...] = (ColorSpace.HSV, ColorSpace.LAB)
    techniques: tuple[Technique, ...] = (HistEq(), HistSpec(), Ahe(), BsbClahe())
    noise: NoiseSpec | None = None
    segmentation: KMeansParams | None = None
    segmentation_images: tuple[ImageSource, ...] | None = None
    feature_mode: FeatureMode = FeatureMode.CHROMA_LUMA
    ssim: SsimParams = SsimParams()
    seed: int = 0

    def __post_init__(self):
        if not self.images:
            raise ValueError("config needs at least one image")
        if not self.color_spaces:
            raise ValueError("config needs at least one color space")
        if not self.techniques:
            raise ValueError("config needs at least one technique")
        object.__setattr__(self, "output_dir", Path(self.output_dir))

    @property
    def noise_conditions(self) -> tuple[NoiseSpec | None, ...]:
        return (None,) if self.noise is None else (None, self.noise)


@dataclass(frozen=True)
class QualityRow:
    image_id: str
    color_space: str
    technique: str
    noise: str
    entropy_bits: float | None = None
    mssim: float | None = None
    runtime_ms: float = 0.0
    error: str | None = None


@dataclass(frozen=True)
class ExperimentReport:
    rows: tuple[QualityRow, ...]
    metadata: dict = field(default_factory=dict)


def default_config(output_dir: str | Path, seed: int = 0) -> ExperimentConfig:
    """The stock suite over the bundled scenes.

    Enhancement runs on all three synthetic images; segmentation runs on
    the multi-colored scene only (the two-tone image has too few distinct
    colors for the default cluster count).
    """
    images = (
        ImageSource("peppers", "synthetic:peppers"),
        ImageSource("ramp", "synthetic:ramp"),
        ImageSource("blobs", "synthetic:blobs"),
    )
    return ExperimentConfig(
        images=images,
        output_dir=Path(output_dir),
        noise=GaussianNoise(mean=0.0, variance=0.01, seed=seed),
        segmentation=KMeansParams(k=4, seed=seed),
        segmentation_images=(images[0],),
        seed=seed,
    )


def _cell_stem(image_id: str, space: ColorSpace, tech: Technique, cond: NoiseSpec | None) -> str:
    stem = f"{image_id}__{space.value}__{tech.label()}"
    if cond is not None:
        stem += "__" + cond.label().replace(":", "-")
    return stem


def _error_rows(
    image_id: str,
    conditions: tuple[NoiseSpec | None, ...],
    spaces: tuple[ColorSpace, ...],
    techniques: tuple[Technique, ...],
    message: str,
) -> list[QualityRow]:
    return [
        QualityRow(
            image_id=image_id,
            color_space=space.value,
            technique=tech.label(),
            noise="none" if cond is None else cond.label(),
            error=message,
        )
        for cond in conditions
        for space in spaces
        for tech in techniques
    ]


def run_enhancement_suite(cfg: ExperimentConfig) -> ExperimentReport:
    """Enhance every matrix cell; write images, histogram CSVs, entropy rows."""
    out = cfg.output_dir
    out.mkdir(parents=True, exist_ok=True)
    rows: list[QualityRow] = []
    for src in cfg.images:
        try:
            base = src.load()
        except (OSError, ValueError) as exc:
            rows.extend(
                _error_rows(
                    src.image_id,
                    cfg.noise_conditions,
                    cfg.color_spaces,
                    cfg.techniques,
                    f"unreadable image: {exc}",
                )
            )
            continue
        for cond in cfg.noise_conditions:
            work = cond.apply(base) if cond is not None else base
            for space in cfg.color_spaces:
                for tech in cfg.techniques:
                    noise_label = "none" if cond is None else cond.label()
                    stem = _cell_stem(src.image_id, space, tech, cond)
                    start = time.perf_counter()
                    try:
                        converted = convert_from_rgb(work, space)
                        luma_before = luma_plane(converted)
                        luma_after = apply_technique(luma_before, tech)
                        enhanced = convert_to_rgb(replace_luma(converted, luma_after))
                        runtime_ms = (time.perf_counter() - start) * 1000.0
                        write_image(enhanced, out / f"{stem}.png")
                        bins = technique_bin_count(tech)
                        _write_hist_csv(
                            out / f"{stem}__hist.csv",
                            build_histogram(luma_before, bins),
                            build_histogram(luma_after, bins),
                        )
                        rows.append(
                            QualityRow(
                                image_id=src.image_id,
                                color_space=space.value,
                                technique=tech.label(),
                                noise=noise_label,
                                entropy_bits=entropy(enhanced),
                                runtime_ms=runtime_ms,
                            )
                        )
                    except (OSError, ValueError) as exc:
                        rows.append(
                            QualityRow(
                                image_id=src.image_id,
                                color_space=space.value,
                                technique=tech.label(),
                                noise=noise_label,
                                runtime_ms=(time.perf_counter() - start) * 1000.0,
                                error=str(exc),
                            )
                        )
    return ExperimentReport(rows=tuple(rows), metadata=_metadata(cfg, suite="enhancement"))


def run_segmentation_suite(cfg: ExperimentConfig) -> ExperimentReport:
    """Noise, enhance, segment, render, and score each matrix cell.

    The similarity column compares the rendered segmentation against the
    clean original, so the noisy condition is judged by how well the
    pipeline recovers the uncorrupted scene.
    """
    if cfg.segmentation is None:
        raise ValueError("segmentation suite needs segmentation parameters")
    out = cfg.output_dir
    out.mkdir(parents=True, exist_ok=True)
    images = cfg.segmentation_images if cfg.segmentation_images is not None else cfg.images
    rows: list[QualityRow] = []
    for src in images:
        try:
            base = src.load()
        except (OSError, ValueError) as exc:
            rows.extend(
                _error_rows(
                    src.image_id,
                    cfg.noise_conditions,
                    cfg.color_spaces,
                    cfg.techniques,
                    f"unreadable image: {exc}",
                )
            )
            continue
        for cond in cfg.noise_conditions:
            work = cond.apply(base) if cond is not None else base
            for space in cfg.color_spaces:
                for tech in cfg.techniques:
                    noise_label = "none" if cond is None else cond.label()
                    stem = _cell_stem(src.image_id, space, tech, cond)
                    start = time.perf_counter()
                    try:
                        enhanced = enhance_image(work, space, tech)
                        label_map = segment_image(enhanced, space, cfg.segmentation, cfg.feature_mode)
                        rendered = render_segmentation(enhanced, label_map)
                        score = mssim(base, rendered, cfg.ssim)
                        runtime_ms = (time.perf_counter() - start) * 1000.0
                        write_image(rendered, out / f"{stem}__seg.png")
                        save_label_map(label_map, out / f"{stem}__labels.pgm")
                        rows.append(
                            QualityRow(
                                image_id=src.image_id,
                                color_space=space.value,
                                technique=tech.label(),
                                noise=noise_label,
                                mssim=score,
                                runtime_ms=runtime_ms,
                            )
                        )
                    except (OSError, ValueError) as exc:
                        rows.append(
                            QualityRow(
                                image_id=src.image_id,
                                color_space=space.value,
                                technique=tech.label(),
                                noise=noise_label,
                                runtime_ms=(time.perf_counter() - start) * 1000.0,
                                error=str(exc),
                            )
                        )
    return ExperimentReport(rows=tuple(rows), metadata=_metadata(cfg, suite="segmentation"))


def _metadata(cfg: ExperimentConfig, suite: str) -> dict:
    techniques = []
    for t in cfg.techniques:
        entry: dict = {"name": t.label(), "bin_count": technique_bin_count(t)}
        if isinstance(t, Ahe):
            entry["window_radius"] = t.params.window_radius
        if isinstance(t, BsbClahe):
            entry.update(
                tiles_x=t.params.tiles_x,
                tiles_y=t.params.tiles_y,
                clip_limit=t.params.clip_limit,
                epsilon=t.params.epsilon,
            )
        if isinstance(t, HistSpec):
            entry["target"] = "custom" if t.target is not None else "gaussian(center, sigma=48/256*bins)"
        techniques.append(entry)
    meta = {
        "tool": "lumaseg",
        "version": __version__,
        "suite": suite,
        "seed": cfg.seed,
        "rng": RNG_NAME,
        "color_spaces": [s.value for s in cfg.color_spaces],
        "techniques": techniques,
        "noise": cfg.noise.label() if cfg.noise is not None else "none",
        "ssim": {
            "window": cfg.ssim.window,
            "k1": cfg.ssim.k1,
            "k2": cfg.ssim.k2,
            "dynamic_range": cfg.ssim.dynamic_range,
            "windowing": "non-overlapping uniform tiles, partial edges dropped",
        },
        "entropy": "pooled rgb samples, 256 bins",
        "feature_mode": cfg.feature_mode.value,
    }
    if cfg.segmentation is not None:
        meta["segmentation"] = {
            "k": cfg.segmentation.k,
            "max_iters": cfg.segmentation.max_iters,
            "tol": cfg.segmentation.tol,
            "seed": cfg.segmentation.seed,
            "restarts": cfg.segmentation.restarts,
        }
    return meta


def _format_metric(value: float | None, error: str | None) -> str:
    if error is not None:
        return "error"
    if value is None:
        return ""
    return f"{value:.6f}"


def _write_hist_csv(path: Path, before: Histogram, after: Histogram) -> None:
    lines = [",".join(HIST_HEADER)]
    for i in range(before.bin_count):
        lines.append(f"{i},{before.counts[i]:g},{after.counts[i]:g}")
    path.write_text("\n".join(lines) + "\n")


def report_csv_text(report: ExperimentReport) -> str:
    lines = [",".join(REPORT_HEADER)]
    for row in report.rows:
        lines.append(
            ",".join(
                (
                    row.image_id,
                    row.color_space,
                    row.technique,
                    row.noise,
                    _format_metric(row.entropy_bits, row.error),
                    _format_metric(row.mssim, row.error),
                    f"{row.runtime_ms:.1f}",
                )
            )
        )
    return "\n".join(lines) + "\n"


def write_report(report: ExperimentReport, csv_path: str | Path, meta_path: str | Path | None = None) -> None:
    Path(csv_path).write_text(report_csv_text(report))
    if meta_path is not None:
        meta = dict(report.metadata)
        errors = [
            {
                "image_id": r.image_id,
                "color_space": r.color_space,
                "technique": r.technique,
                "noise": r.noise,
                "message": r.error,
            }
            for r in report.rows
            if r.error is not None
        ]
        if errors:
            meta["errors"] = errors
        Path(meta_path).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")


def load_config(path: str | Path, **overrides) -> ExperimentConfig:
    """Build an ExperimentConfig from a TOML file.

    Recognized keyword overrides (``output_dir``, ``seed``, ...) win over
    the file, which is how CLI flags take precedence.
    """
    with open(path, "rb") as fh:
        raw = tomllib.load(fh)
    return config_from_dict(raw, **overrides)


def config_from_dict(raw: dict, **overrides) -> ExperimentConfig:
    data = dict(raw)
    data.update({k: v for k, v in overrides.items() if v is not None})

    seed = int(data.get("seed", 0))
    if "output_dir" not in data:
        raise ValueError("config needs an output_dir")
    bin_count = int(data.get("bin_count", 256))

    images = tuple(
        ImageSource(image_id=str(entry["id"]), path=str(entry["path"]))
        for entry in data.get("images", [])
    )
    spaces = tuple(ColorSpace(s.lower()) for s in data.get("color_spaces", ["hsv", "lab"]))

    ahe_cfg = data.get("ahe", {})
    clahe_cfg = data.get("clahe", {})
    spec_cfg = data.get("hist_spec", {})
    techniques = tuple(
        build_technique(
            name,
            bin_count=bin_count,
            window_radius=int(ahe_cfg.get("window_radius", 8)),
            tiles_x=int(clahe_cfg.get("tiles_x", 8)),
            tiles_y=int(clahe_cfg.get("tiles_y", 8)),
            clip_limit=float(clahe_cfg.get("clip_limit", 2.0)),
            epsilon=clahe_cfg.get("epsilon"),
            target_csv=spec_cfg.get("target_csv"),
        )
        for name in data.get("techniques", list(TECHNIQUE_NAMES))
    )

    noise = None
    if "noise" in data:
        ncfg = data["noise"]
        nseed = int(ncfg.get("seed", seed))
        kind = ncfg.get("kind", "gaussian")
        if kind == "gaussian":
            noise = GaussianNoise(
                mean=float(ncfg.get("mean", 0.0)),
                variance=float(ncfg.get("variance", 0.01)),
                seed=nseed,
            )
        elif kind in ("salt-pepper", "saltpepper"):
            noise = SaltPepperNoise(density=float(ncfg.get("density", 0.2)), seed=nseed)
        else:
            raise ValueError(f"unknown noise kind {kind!r}")

    segmentation = None
    mode = FeatureMode.CHROMA_LUMA
    if "segmentation" in data:
        scfg = data["segmentation"]
        segmentation = KMeansParams(
            k=int(scfg.get("k", 4)),
            max_iters=int(scfg.get("max_iters", 100)),
            tol=float(scfg.get("tol", 0.0)),
            seed=int(scfg.get("seed", seed)),
            restarts=int(scfg.get("restarts", 5)),
        )
        mode = FeatureMode(scfg.get("mode", "chroma-luma"))

    seg_images = None
    if "segmentation_images" in data:
        seg_images = tuple(
            ImageSource(image_id=str(entry["id"]), path=str(entry["path"]))
            for entry in data["segmentation_images"]
        )

    return ExperimentConfig(
        images=images,
        output_dir=Path(data["output_dir"]),
        color_spaces=spaces,
        techniques=techniques,
        noise=noise,
        segmentation=segmentation,
        segmentation_images=seg_images,
        feature_mode=mode,
        seed=seed,
    )


def build_technique(
    name: str,
    bin_count: int = 256,
    window_radius: int = 8,
    tiles_x: int = 8,
    tiles_y: int = 8,
    clip_limit: float = 2.0,
    epsilon: float | None = None,
    target_csv: str | None = None,
) -> Technique:
    name = name.lower()
    if name == "hist-eq":
        return HistEq(bin_count=bin_count)
    if name == "hist-spec":
        target = load_target_histogram(target_csv, bin_count) if target_csv else None
        return HistSpec(target=target, bin_count=bin_count)
    if name == "ahe":
        return Ahe(params=AheParams(window_radius=window_radius, bin_count=bin_count))
    if name == "bsb-clahe":
        return BsbClahe(
            params=ClaheParams(
                tiles_x=tiles_x,
                tiles_y=tiles_y,
                clip_limit=clip_limit,
                bin_count=bin_count,
                epsilon=None if epsilon is None else float(epsilon),
            )
        )
    raise ValueError(f"unknown technique {name!r}; expected one of {', '.join(TECHNIQUE_NAMES)}")
