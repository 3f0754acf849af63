"""Command-line interface.

Subcommands:
  detect            run the pipeline on one image
  batch             run the pipeline on every PNG in a directory
  gen               generate synthetic scenes with ground-truth sidecars
  calibrate-report  dump per-category HSV histograms as CSV

Exit codes: 0 success, 1 usage or config error, 2 processing error,
3 batch finished with per-image failures.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import logging
import sys
from pathlib import Path

import numpy as np

from wiltscan.colorspace import rgb_to_hsv_image
from wiltscan.config import PipelineConfig, default_config, load_config, serialize_config
from wiltscan.errors import ConfigError, WiltscanError
from wiltscan.image import load_image, mask_to_rle, save_image
from wiltscan.pipeline import process_image, run_batch
from wiltscan.segmentation import threshold_mask
from wiltscan.synth import SceneSpec, generate_scene, place_blobs

logger = logging.getLogger("wiltscan.cli")


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on bad usage; the documented contract
    reserves 2 for processing errors, so usage errors remap to 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _int_range(text: str) -> tuple[int, int]:
    lo, sep, hi = text.partition("..")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected lo..hi, got {text!r}")
    try:
        return int(lo), int(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected integers in lo..hi, got {text!r}") from None


_EMIT_CHOICES = ("masks", "frames", "overlay", "report")


def _emit_set(text: str) -> tuple[str, ...]:
    parts = tuple(p.strip() for p in text.split(",") if p.strip())
    bad = [p for p in parts if p not in _EMIT_CHOICES]
    if bad:
        raise argparse.ArgumentTypeError(
            f"unknown artifacts {bad}; choose from {', '.join(_EMIT_CHOICES)}"
        )
    return parts


def _add_pipeline_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file; omitted fields are not allowed")
    p.add_argument("--out-dir", default=".", help="directory for artifacts (default: .)")
    p.add_argument("--k", type=int, help="pin the cluster count and skip the elbow scan")
    p.add_argument("--k-range", type=_int_range, metavar="LO..HI", help="elbow scan range")
    p.add_argument("--iterations", type=int, help="k-means iteration cap")
    p.add_argument("--seed", type=int, help="base RNG seed")
    p.add_argument("--min-area", type=int, help="smallest contour kept, in pixels")
    p.add_argument(
        "--emit",
        type=_emit_set,
        metavar="LIST",
        help="comma list of artifacts to write: masks,frames,overlay,report",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="wiltscan", description="Fusarium wilt detection in crop images.")
    sub = parser.add_subparsers(dest="command", required=True)

    detect = sub.add_parser("detect", help="process a single PNG", parents=[], add_help=True)
    detect.add_argument("--input", required=True, help="input PNG")
    _add_pipeline_flags(detect)

    batch = sub.add_parser("batch", help="process every PNG in a directory")
    batch.add_argument("--input", required=True, help="input directory")
    _add_pipeline_flags(batch)
    batch.add_argument("--jobs", type=int, default=1, help="parallel workers (default 1)")

    gen = sub.add_parser("gen", help="generate synthetic scenes")
    gen.add_argument("--out-dir", default=".", help="directory for scenes")
    gen.add_argument("--count", type=int, default=5, help="number of scenes (default 5)")
    gen.add_argument("--width", type=int, default=1024)
    gen.add_argument("--height", type=int, default=768)
    gen.add_argument("--seed", type=int, default=0, help="base seed; scene i uses seed+i")
    gen.add_argument(
        "--blob-count", type=_int_range, default=(3, 6), metavar="LO..HI",
        help="wilt blobs per scene (default 3..6)",
    )
    gen.add_argument(
        "--blob-radius", type=_int_range, default=(60, 90), metavar="LO..HI",
        help="blob radius range in pixels (default 60..90)",
    )
    gen.add_argument("--noise-rate", type=float, default=0.005)
    gen.add_argument(
        "--min-blob-area", type=int, default=10_000,
        help="reject radii rasterizing below this area (default 10000,"
        " matching the detector's default min-area)",
    )

    cal = sub.add_parser(
        "calibrate-report", help="write per-category HSV channel histograms as CSV"
    )
    cal.add_argument("--input", required=True, help="input PNG")
    cal.add_argument("--config", help="JSON config file")
    cal.add_argument("--out-dir", default=".", help="directory for the CSV")

    dump = sub.add_parser("print-config", help="print the effective config as JSON")
    dump.add_argument("--config", help="JSON config file")

    return parser


def _effective_config(args: argparse.Namespace) -> PipelineConfig:
    """Overlay CLI flags on the config file (or the shipped defaults)."""
    cfg = load_config(args.config) if args.config else default_config()
    clu = cfg.clustering
    if getattr(args, "k", None) is not None:
        clu = dataclasses.replace(clu, k=args.k)
    if getattr(args, "k_range", None) is not None:
        clu = dataclasses.replace(clu, k_range=args.k_range)
    if getattr(args, "iterations", None) is not None:
        clu = dataclasses.replace(clu, iterations=args.iterations)
    if getattr(args, "seed", None) is not None:
        clu = dataclasses.replace(clu, seed=args.seed)
    cfg = dataclasses.replace(cfg, clustering=clu)
    if getattr(args, "min_area", None) is not None:
        cfg = dataclasses.replace(
            cfg, contours=dataclasses.replace(cfg.contours, min_area=args.min_area)
        )
    if getattr(args, "emit", None) is not None:
        cfg = dataclasses.replace(
            cfg,
            output=dataclasses.replace(
                cfg.output, **{name: name in args.emit for name in _EMIT_CHOICES}
            ),
        )
    return cfg


def _cmd_detect(args: argparse.Namespace) -> int:
    cfg = _effective_config(args)
    report = process_image(args.input, cfg, args.out_dir)
    print(
        f"{report.image}: {len(report.contours)} wilt region(s),"
        f" k={report.k}, residual={report.residual_count} px"
    )
    return 0


def _cmd_batch(args: argparse.Namespace) -> int:
    cfg = _effective_config(args)
    summary = run_batch(args.input, cfg, args.out_dir, jobs=args.jobs)
    for e in summary.entries:
        if e.ok:
            print(f"{e.image}: {e.kept_contours} wilt region(s)")
        else:
            print(f"{e.image}: FAILED: {e.error}")
    print(
        f"{summary.image_count} image(s), {summary.failure_count} failure(s),"
        f" {summary.total_kept_contours} wilt region(s) total"
    )
    return 3 if summary.failure_count else 0


def _cmd_gen(args: argparse.Namespace) -> int:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    lo_n, hi_n = args.blob_count
    lo_r, hi_r = args.blob_radius
    if not 0 <= lo_n <= hi_n:
        raise ConfigError(f"blob count range {lo_n}..{hi_n} is invalid")
    if not 1 <= lo_r <= hi_r:
        raise ConfigError(f"blob radius range {lo_r}..{hi_r} is invalid")
    for i in range(args.count):
        seed = args.seed + i
        rng = np.random.default_rng(seed)
        n_blobs = int(rng.integers(lo_n, hi_n + 1))
        blobs = place_blobs(args.width, args.height, n_blobs, (lo_r, hi_r), seed=seed)
        spec = SceneSpec(
            width=args.width,
            height=args.height,
            seed=seed,
            wilt_blobs=blobs,
            noise_rate=args.noise_rate,
            min_blob_area=args.min_blob_area,
        )
        img, truth = generate_scene(spec)
        stem = f"scene_{i:03d}"
        save_image(img, out / f"{stem}.png")
        sidecar = {
            "width": img.width,
            "height": img.height,
            "seed": seed,
            "masks": {
                name: mask_to_rle(mask) for name, mask in truth.category_masks.items()
            }
            | {"wilt": mask_to_rle(truth.wilt_mask)},
            "blobs": [
                {
                    "center": list(b.center),
                    "radius": b.radius,
                    "bbox": list(b.bbox),
                    "area": b.pixel_count,
                }
                for b in truth.blobs
            ],
        }
        (out / f"{stem}.truth.json").write_text(
            json.dumps(sidecar, indent=2, sort_keys=True) + "\n"
        )
        print(f"{out / (stem + '.png')}: {len(truth.blobs)} blob(s)")
    return 0


def _cmd_calibrate(args: argparse.Namespace) -> int:
    cfg = load_config(args.config) if args.config else default_config()
    img = load_image(args.input)
    hsv = rgb_to_hsv_image(img)
    px = np.asarray(hsv.pixels)

    union = np.zeros((img.height, img.width), np.bool_)
    groups: list[tuple[str, np.ndarray]] = []
    for cat in cfg.categories:
        bits = np.asarray(threshold_mask(hsv, cat.hsv_range).bits)
        groups.append((cat.name, bits))
        union |= bits
    groups.append(("residual", ~union))

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{Path(args.input).stem}.histograms.csv"
    channels = (("h", 180), ("s", 256), ("v", 256))
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["category", "channel", "bin", "count"])
        for name, bits in groups:
            values = px[bits]
            for c, (channel, bins) in enumerate(channels):
                hist = np.bincount(values[:, c], minlength=bins)
                for b in range(bins):
                    writer.writerow([name, channel, b, int(hist[b])])
    print(path)
    return 0


def _cmd_print_config(args: argparse.Namespace) -> int:
    cfg = load_config(args.config) if args.config else default_config()
    sys.stdout.write(serialize_config(cfg))
    return 0


_COMMANDS = {
    "detect": _cmd_detect,
    "batch": _cmd_batch,
    "gen": _cmd_gen,
    "calibrate-report": _cmd_calibrate,
    "print-config": _cmd_print_config,
}


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"wiltscan: config error: {exc}", file=sys.stderr)
        return 1
    except (WiltscanError, OSError) as exc:
        print(f"wiltscan: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
