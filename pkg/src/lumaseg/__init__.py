"""Luma-channel contrast enhancement and color image segmentation toolkit."""

__version__ = "0.1.0"

from .core import (
    Cdf,
    ChannelPlane,
    Histogram,
    RgbImage,
    build_histogram,
    merge_channels,
    split_channels,
    to_cdf,
    to_pdf,
)
from .colorspace import (
    ColorSpace,
    HsvImage,
    LabImage,
    hsv_to_rgb,
    lab_to_rgb,
    luma_plane,
    replace_luma,
    rgb_to_hsv,
    rgb_to_lab,
)
from .global_enhance import (
    IntensityMap,
    apply_map,
    equalization_map,
    equalize,
    gaussian_target,
    load_target_histogram,
    specification_map,
    specify,
)
from .local_enhance import (
    AheParams,
    ClaheParams,
    ClipSearchResult,
    ahe,
    bsb_clip_search,
    clahe,
    clip_and_redistribute,
)
from .degrade import GaussianNoise, SaltPepperNoise, add_gaussian, add_salt_pepper
from .segment import (
    FeatureMatrix,
    FeatureMode,
    KMeansParams,
    LabelMap,
    extract_features,
    kmeans,
    render_segmentation,
    segment_image,
)
from .metrics import SsimParams, entropy, mse, mssim, ssim_window
from .pipeline import (
    Ahe,
    BsbClahe,
    ExperimentConfig,
    ExperimentReport,
    HistEq,
    HistSpec,
    ImageSource,
    QualityRow,
    default_config,
    enhance_image,
    run_enhancement_suite,
    run_segmentation_suite,
    write_report,
)
from .synthetic import low_contrast_ramp, peppers_scene, synthetic_image, two_tone_blobs

__all__ = [
    "__version__",
    "RgbImage", "ChannelPlane", "Histogram", "Cdf",
    "build_histogram", "to_pdf", "to_cdf", "split_channels", "merge_channels",
    "ColorSpace", "HsvImage", "LabImage",
    "rgb_to_hsv", "hsv_to_rgb", "rgb_to_lab", "lab_to_rgb", "luma_plane", "replace_luma",
    "IntensityMap", "equalization_map", "apply_map", "specification_map",
    "equalize", "specify", "gaussian_target", "load_target_histogram",
    "AheParams", "ClaheParams", "ClipSearchResult",
    "ahe", "bsb_clip_search", "clip_and_redistribute", "clahe",
    "SaltPepperNoise", "GaussianNoise", "add_salt_pepper", "add_gaussian",
    "FeatureMode", "FeatureMatrix", "KMeansParams", "LabelMap",
    "extract_features", "kmeans", "segment_image", "render_segmentation",
    "SsimParams", "entropy", "ssim_window", "mssim", "mse",
    "HistEq", "HistSpec", "Ahe", "BsbClahe",
    "ImageSource", "ExperimentConfig", "ExperimentReport", "QualityRow",
    "enhance_image", "run_enhancement_suite", "run_segmentation_suite",
    "write_report", "default_config",
    "synthetic_image", "low_contrast_ramp", "two_tone_blobs", "peppers_scene",
]
