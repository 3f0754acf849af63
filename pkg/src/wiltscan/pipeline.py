"""End-to-end detection pipeline and batch runner.

Stage order: convert to HSV, peel off the known categories, take the
residual, cluster its pixels, pick the wilt cluster, clean its mask,
extract and filter contours, draw the overlay. Every stage failure is
wrapped with the stage name so batch logs say where an image died.
"""

from __future__ import annotations

import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from wiltscan import kernels
from wiltscan.clustering import (
    cluster_frames,
    cluster_mask,
    collect_samples,
    elbow_scan,
    kmeans,
    scan_seed,
    select_wilt_cluster,
    SEED_POLICY,
)
from wiltscan.colorspace import rgb_to_hsv_image
from wiltscan.config import PipelineConfig, default_config
from wiltscan.contours import Contour, ContourFilter, draw_contours, filter_contours, find_contours
from wiltscan.errors import EmptyDirectoryError, PipelineStageError
from wiltscan.image import BinaryMask, RasterImage, load_image, mask_to_image, save_image
from wiltscan.morphology import apply_sequence
from wiltscan.report import (
    ContourReport,
    DetectionReport,
    ElbowReport,
    WiltClusterReport,
    write_report,
)
from wiltscan.segmentation import apply_residual, segment_categories

logger = logging.getLogger("wiltscan.pipeline")


@dataclass(frozen=True)
class PipelineResult:
    report: DetectionReport
    artifacts: dict[str, RasterImage]  # artifact key -> image
    kept_mask: BinaryMask  # pixels of the contours that survived filtering
    wilt_mask: BinaryMask | None  # cleaned wilt-cluster mask, None if no samples


class _Stages:
    """Times each stage and rewraps its failure with the stage name."""

    def __init__(self):
        self.timings: dict[str, float] = {}

    def run(self, name: str, fn, *args, **kwargs):
        start = time.perf_counter()
        try:
            out = fn(*args, **kwargs)
        except Exception as exc:
            raise PipelineStageError(name, exc) from exc
        self.timings[name] = (time.perf_counter() - start) * 1000.0
        return out


def _centroid_reports(model, index: int) -> WiltClusterReport:
    unit = model.centroids[index]
    scale = np.array([179.0, 255.0, 255.0])
    lattice = np.floor(unit * scale + 0.5).astype(int)
    return WiltClusterReport(
        index=index,
        count=int(model.counts[index]),
        centroid_unit=tuple(float(c) for c in unit),
        centroid_hsv=tuple(int(c) for c in lattice),
    )


def run_pipeline(
    img: RasterImage, cfg: PipelineConfig | None = None, image_name: str = "<memory>"
) -> PipelineResult:
    """Detect wilt regions in one RGB image.

    Deterministic given the config seed. An empty residual short-circuits
    to an empty detection with a complete report. The final k-means run
    reuses the per-k seed of the elbow scan, so a report's wilt cluster
    count always equals its scan entry at chosen_k.
    """
    if cfg is None:
        cfg = default_config()
    stages = _Stages()
    out = cfg.output
    artifacts: dict[str, RasterImage] = {}

    hsv = stages.run("rgb_to_hsv", rgb_to_hsv_image, img)
    seg = stages.run("segment", segment_categories, hsv, cfg.profiles())
    residual = seg.residual_mask
    sample_mask = residual
    if cfg.residual_cleanup.enabled:
        sample_mask = stages.run(
            "residual_cleanup",
            apply_sequence,
            residual,
            cfg.residual_cleanup.element(),
            cfg.residual_cleanup.sequence,
        )
    if out.masks:
        for name, m in seg.category_masks.items():
            artifacts[f"mask-{name}"] = mask_to_image(m)
        artifacts["mask-residual"] = mask_to_image(sample_mask)
        artifacts["noisywilt"] = stages.run("apply_residual", apply_residual, img, sample_mask)

    samples = stages.run("collect_samples", collect_samples, hsv, sample_mask)

    clu = cfg.clustering
    elbow = None
    model = None
    wilt = None
    contours: list[Contour] = []
    kept: list[Contour] = []
    wilt_mask: BinaryMask | None = None
    kept_bits = np.zeros((img.height, img.width), np.bool_)
    k_used: int | None = None

    if len(samples) > 0:
        if clu.k is None:
            lo, hi = clu.k_range
            scan = stages.run(
                "elbow_scan",
                elbow_scan,
                samples,
                range(lo, hi + 1),
                clu.iterations,
                clu.seed,
                clu.wilt_hue_band,
            )
            elbow = ElbowReport(scan.k_values, scan.wilt_pixel_counts, scan.chosen_k, SEED_POLICY)
            k_used = scan.chosen_k
        else:
            # a pinned k is capped by the sample count rather than failing
            # the image outright
            k_used = min(clu.k, len(samples))
            if k_used != clu.k:
                logger.warning(
                    "%s: pinned k=%d exceeds %d samples, using k=%d",
                    image_name, clu.k, len(samples), k_used,
                )
        model = stages.run(
            "kmeans", kmeans, samples, k_used, clu.iterations, scan_seed(clu.seed, k_used)
        )
        index = stages.run("select_wilt_cluster", select_wilt_cluster, model, clu.wilt_hue_band)
        wilt = _centroid_reports(model, index)

        if out.frames:
            frames = stages.run("cluster_frames", cluster_frames, model, samples, img.width, img.height)
            for i, frame in enumerate(frames):
                artifacts[f"frame-{i:02d}"] = mask_to_image(frame)

        wilt_mask = stages.run(
            "cluster_mask", cluster_mask, model, samples, index, img.width, img.height
        )
        if cfg.wilt_mask_cleanup.enabled:
            wilt_mask = stages.run(
                "wilt_cleanup",
                apply_sequence,
                wilt_mask,
                cfg.wilt_mask_cleanup.element(),
                cfg.wilt_mask_cleanup.sequence,
            )
        if out.masks:
            artifacts["mask-wilt"] = mask_to_image(wilt_mask)

        contours = stages.run("find_contours", find_contours, wilt_mask)
        flt = ContourFilter(min_area=cfg.contours.min_area, max_area=cfg.contours.max_area)
        kept = stages.run("filter_contours", filter_contours, contours, flt)

        if kept:
            # the kept mask is the union of the surviving components;
            # labels come out in the same order find_contours reported
            labels, _ = kernels.label_components(np.asarray(wilt_mask.bits))
            kept_ids = [i + 1 for i, c in enumerate(contours) if flt.keep(c)]
            kept_bits = np.isin(labels, kept_ids)

    if out.overlay:
        artifacts["overlay"] = stages.run(
            "draw_contours",
            draw_contours,
            img,
            kept,
            cfg.contours.overlay_color,
            cfg.contours.overlay_thickness,
        )

    report = DetectionReport(
        image=image_name,
        width=img.width,
        height=img.height,
        category_pixel_counts=dict(seg.pixel_counts),
        category_union_count=seg.category_union_count,
        residual_count=residual.popcount(),
        sample_count=len(samples),
        k=k_used,
        elbow=elbow,
        wilt_cluster=wilt,
        contours=tuple(ContourReport(c.area, c.bbox) for c in kept),
        min_area=cfg.contours.min_area,
        max_area=cfg.contours.max_area,
        timings_ms=stages.timings,
    )
    for stage, ms in stages.timings.items():
        logger.debug("%s: %s %.1f ms", image_name, stage, ms)
    return PipelineResult(
        report=report,
        artifacts=artifacts,
        kept_mask=BinaryMask(kept_bits),
        wilt_mask=wilt_mask,
    )


def write_artifacts(result: PipelineResult, out_dir: str | Path, stem: str) -> None:
    """Write the artifacts the config asked for, named <stem>.<key>.png,
    plus <stem>.report.json when reporting is on."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for key, image in sorted(result.artifacts.items()):
        save_image(image, out_dir / f"{stem}.{key}.png")


def process_image(path: str | Path, cfg: PipelineConfig, out_dir: str | Path) -> DetectionReport:
    """Load, detect, and write artifacts for one file."""
    path = Path(path)
    img = load_image(path)
    result = run_pipeline(img, cfg, image_name=path.name)
    write_artifacts(result, out_dir, path.stem)
    if cfg.output.report:
        write_report(result.report, Path(out_dir) / f"{path.stem}.report.json")
    return result.report


@dataclass(frozen=True)
class BatchEntry:
    image: str
    ok: bool
    kept_contours: int | None
    error: str | None


@dataclass(frozen=True)
class BatchSummary:
    entries: tuple[BatchEntry, ...]

    @property
    def image_count(self) -> int:
        return len(self.entries)

    @property
    def failure_count(self) -> int:
        return sum(1 for e in self.entries if not e.ok)

    @property
    def total_kept_contours(self) -> int:
        return sum(e.kept_contours or 0 for e in self.entries)

    def to_dict(self) -> dict:
        return {
            "image_count": self.image_count,
            "ok_count": self.image_count - self.failure_count,
            "failure_count": self.failure_count,
            "total_kept_contours": self.total_kept_contours,
            "images": [
                {
                    "image": e.image,
                    "ok": e.ok,
                    "kept_contours": e.kept_contours,
                    "error": e.error,
                }
                for e in self.entries
            ],
        }


def _batch_worker(args: tuple[str, PipelineConfig, str]) -> BatchEntry:
    path, cfg, out_dir = args
    name = Path(path).name
    try:
        report = process_image(path, cfg, out_dir)
        return BatchEntry(name, True, len(report.contours), None)
    except Exception as exc:
        logger.error("%s: %s", name, exc)
        return BatchEntry(name, False, None, str(exc))


def run_batch(
    input_dir: str | Path,
    cfg: PipelineConfig | None = None,
    out_dir: str | Path = ".",
    jobs: int = 1,
) -> BatchSummary:
    """Process every PNG in a directory; per-image failures are recorded
    in the summary instead of aborting the batch. Results are independent
    of the worker count."""
    if cfg is None:
        cfg = default_config()
    input_dir = Path(input_dir)
    if not input_dir.is_dir():
        raise EmptyDirectoryError(f"{input_dir}: not a directory")
    paths = sorted(p for p in input_dir.iterdir() if p.suffix.lower() == ".png")
    if not paths:
        raise EmptyDirectoryError(f"{input_dir}: no PNG files")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    tasks = [(str(p), cfg, str(out)) for p in paths]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            entries = tuple(pool.map(_batch_worker, tasks))
    else:
        entries = tuple(_batch_worker(t) for t in tasks)

    summary = BatchSummary(entries)
    (out / "summary.json").write_text(
        json.dumps(summary.to_dict(), indent=2, sort_keys=True) + "\n"
    )
    return summary
