"""Command line front end.

Subcommands: enhance, segment, suite, histogram, noise, metrics. Exit
codes: 0 success, 2 usage or input validation error, 1 processing error.
Inputs may name a file or a bundled scene (``synthetic:peppers``). The
LUMASEG_OUT_DIR environment variable supplies the default suite output
directory.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .colorspace import ColorSpace, convert_from_rgb, luma_plane
from .core import RgbImage, build_histogram
from .degrade import parse_noise_spec
from .imageio import read_image, write_image
from .metrics import SsimParams, entropy, mse, mssim
from .pipeline import (
    TECHNIQUE_NAMES,
    ImageSource,
    build_technique,
    default_config,
    enhance_image,
    load_config,
    run_enhancement_suite,
    run_segmentation_suite,
    write_report,
)
from .segment import FeatureMode, KMeansParams, render_segmentation, save_label_map, segment_image
from .synthetic import synthetic_image


def _load_input(path: str) -> RgbImage:
    if path.startswith("synthetic:"):
        return synthetic_image(path.split(":", 1)[1])
    return read_image(path)


def _technique_from_args(args) -> object:
    return build_technique(
        args.technique,
        bin_count=args.bins,
        window_radius=args.window_radius,
        tiles_x=args.tiles_x,
        tiles_y=args.tiles_y,
        clip_limit=args.clip_limit,
        epsilon=args.epsilon,
        target_csv=args.target_hist,
    )


def _add_technique_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--technique", required=True, choices=TECHNIQUE_NAMES)
    p.add_argument("--bins", type=int, default=256, help="histogram bin count")
    p.add_argument("--window-radius", type=int, default=8, help="AHE contextual region radius")
    p.add_argument("--tiles-x", type=int, default=8, help="CLAHE tile columns")
    p.add_argument("--tiles-y", type=int, default=8, help="CLAHE tile rows")
    p.add_argument("--clip-limit", type=float, default=2.0, help="CLAHE budget, multiple of mean bin count")
    p.add_argument("--epsilon", type=float, default=None, help="CLAHE clip search tolerance")
    p.add_argument("--target-hist", default=None, help="CSV target histogram for hist-spec")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lumaseg", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enhance", help="enhance the luma channel of one image")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--space", required=True, choices=["hsv", "lab"])
    _add_technique_flags(p)
    p.add_argument("--out", required=True)

    p = sub.add_parser("segment", help="k-means color segmentation")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--space", required=True, choices=["hsv", "lab"])
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=5)
    p.add_argument("--max-iters", type=int, default=100)
    p.add_argument("--mode", default="chroma-luma", choices=[m.value for m in FeatureMode])
    p.add_argument("--out-render", required=True, help="cluster-colored PNG")
    p.add_argument("--out-labels", default=None, help="label raster PGM")

    p = sub.add_parser("suite", help="run the experiment suites from a config")
    p.add_argument("--config", default=None, help="TOML experiment config")
    p.add_argument("--out-dir", default=None, help="output directory (flag wins over config)")
    p.add_argument("--seed", type=int, default=None, help="seed (flag wins over config)")

    p = sub.add_parser("histogram", help="luma histogram of an image as CSV")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--space", required=True, choices=["hsv", "lab"])
    p.add_argument("--bins", type=int, default=256)
    p.add_argument("--out", default=None, help="CSV path; stdout when omitted")

    p = sub.add_parser("noise", help="corrupt an image with seeded noise")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--noise", required=True, help="salt-pepper:<density> or gaussian:<mean>:<variance>")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("metrics", help="mssim between two images plus test-image entropy")
    p.add_argument("--ref", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--window", type=int, default=8)
    p.add_argument("--debug-mse", action="store_true", help="also print mean squared error")

    return parser


def _cmd_enhance(args) -> int:
    img = _load_input(args.input)
    out = enhance_image(img, ColorSpace(args.space), _technique_from_args(args))
    write_image(out, args.out)
    return 0


def _cmd_segment(args) -> int:
    img = _load_input(args.input)
    params = KMeansParams(k=args.k, max_iters=args.max_iters, seed=args.seed, restarts=args.restarts)
    label_map = segment_image(img, ColorSpace(args.space), params, FeatureMode(args.mode))
    write_image(render_segmentation(img, label_map), args.out_render)
    if args.out_labels:
        save_label_map(label_map, args.out_labels)
    print(f"objective {label_map.objective:.6f}")
    return 0


def _cmd_suite(args) -> int:
    out_dir = args.out_dir or os.environ.get("LUMASEG_OUT_DIR")
    if args.config:
        cfg = load_config(args.config, output_dir=out_dir, seed=args.seed)
    else:
        cfg = default_config(out_dir or "lumaseg-out", seed=args.seed if args.seed is not None else 0)
    cfg.output_dir.mkdir(parents=True, exist_ok=True)

    report = run_enhancement_suite(cfg)
    write_report(report, cfg.output_dir / "report_enhancement.csv", cfg.output_dir / "report_enhancement_meta.json")
    print(f"enhancement report: {cfg.output_dir / 'report_enhancement.csv'} ({len(report.rows)} rows)")

    if cfg.segmentation is not None:
        report = run_segmentation_suite(cfg)
        write_report(report, cfg.output_dir / "report_segmentation.csv", cfg.output_dir / "report_segmentation_meta.json")
        print(f"segmentation report: {cfg.output_dir / 'report_segmentation.csv'} ({len(report.rows)} rows)")
    return 0


def _cmd_histogram(args) -> int:
    img = _load_input(args.input)
    luma = luma_plane(convert_from_rgb(img, ColorSpace(args.space)))
    hist = build_histogram(luma, args.bins)
    lines = ["bin_index,count"]
    lines += [f"{i},{hist.counts[i]:g}" for i in range(hist.bin_count)]
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_noise(args) -> int:
    img = _load_input(args.input)
    spec = parse_noise_spec(args.noise, seed=args.seed)
    write_image(spec.apply(img), args.out)
    return 0


def _cmd_metrics(args) -> int:
    ref = _load_input(args.ref)
    test = _load_input(args.test)
    score = mssim(ref, test, SsimParams(window=args.window))
    print(f"mssim {score:.6f}")
    print(f"entropy {entropy(test):.6f}")
    if args.debug_mse:
        print(f"mse {mse(ref, test):.6f}")
    return 0


_COMMANDS = {
    "enhance": _cmd_enhance,
    "segment": _cmd_segment,
    "suite": _cmd_suite,
    "histogram": _cmd_histogram,
    "noise": _cmd_noise,
    "metrics": _cmd_metrics,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        return _COMMANDS[args.command](args)
    except (FileNotFoundError, IsADirectoryError, ValueError) as exc:
        print(f"lumaseg: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"lumaseg: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
