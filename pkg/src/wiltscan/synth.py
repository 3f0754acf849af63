"""Deterministic synthetic field scenes with exact ground truth.

Scenes imitate the composition of aerial crop photographs: a ground base,
horizontal vegetation rows, vertical packing-material strips, and wilted
disks stamped on top, plus a sprinkle of impulse noise. Pixels are drawn
in HSV from per-region palette boxes and converted to RGB through the
exact inverse of the forward hue conversion; a draw whose round trip
leaves its palette box is redrawn, so every non-noise pixel is guaranteed
to threshold into its intended region.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from wiltscan import kernels
from wiltscan.errors import DimensionMismatchError, InfeasibleSpecError
from wiltscan.image import RGB, BinaryMask, RasterImage
from wiltscan.segmentation import HsvRange, default_profiles

_REJECTION_ROUNDS = 100


def _box_contains_box(outer: HsvRange, inner: HsvRange) -> bool:
    return (
        outer.h_lo <= inner.h_lo and inner.h_hi <= outer.h_hi
        and outer.s_lo <= inner.s_lo and inner.s_hi <= outer.s_hi
        and outer.v_lo <= inner.v_lo and inner.v_hi <= outer.v_hi
    )


def _boxes_disjoint(a: HsvRange, b: HsvRange) -> bool:
    """True when the boxes miss each other on at least one axis."""
    return (
        a.h_hi < b.h_lo or b.h_hi < a.h_lo
        or a.s_hi < b.s_lo or b.s_hi < a.s_lo
        or a.v_hi < b.v_lo or b.v_hi < a.v_lo
    )


def default_category_ranges() -> dict[str, HsvRange]:
    return {p.name: p.hsv_range for p in default_profiles()}


def default_palettes() -> dict[str, HsvRange]:
    """Sampling boxes sitting strictly inside their owning ranges and
    clear of every other category's range."""
    return {
        "healthy": HsvRange(32, 42, 80, 240, 60, 240),
        "ground": HsvRange(17, 18, 90, 250, 40, 250),
        "packing": HsvRange(68, 175, 10, 250, 40, 250),
    }


# Degenerate on purpose: with every wilt pixel mapping to one feature
# point, a centroid that lands on it zeroes the blob's k-means++ weight,
# so no second centroid can ever seed inside the blob and the wilt
# cluster stays whole across any k scan. Wider boxes invite splits once
# k grows past the number of noise clusters worth carving.
DEFAULT_WILT_PALETTE = HsvRange(10, 10, 216, 216, 178, 178)


@dataclass(frozen=True)
class RowLayout:
    """Periodic scene structure.

    Rows of vegetation run horizontally over the ground; packing strips
    run vertically and cover whatever they cross.
    """

    veg_row_period: int = 16
    veg_row_width: int = 8
    strip_period: int = 64
    strip_width: int = 6

    def __post_init__(self):
        for period, width, what in (
            (self.veg_row_period, self.veg_row_width, "vegetation rows"),
            (self.strip_period, self.strip_width, "packing strips"),
        ):
            if period < 1:
                raise ValueError(f"{what}: period must be >= 1")
            if not 0 <= width <= period:
                raise ValueError(f"{what}: width must be within [0, period]")


def _disk_area(radius: int) -> int:
    """Lattice points inside a radius-r circle around an integer center."""
    span = np.arange(-radius, radius + 1)
    return int(np.count_nonzero(span[:, None] ** 2 + span[None, :] ** 2 <= radius * radius))


@dataclass(frozen=True)
class SceneSpec:
    width: int
    height: int
    seed: int = 0
    category_ranges: dict[str, HsvRange] = field(default_factory=default_category_ranges)
    category_palettes: dict[str, HsvRange] = field(default_factory=default_palettes)
    wilt_palette: HsvRange = DEFAULT_WILT_PALETTE
    wilt_hue_band: HsvRange = HsvRange(5, 29, 0, 255, 0, 255)
    wilt_blobs: tuple[tuple[int, int, int], ...] = ()  # (cx, cy, radius)
    noise_rate: float = 0.005
    min_blob_area: int = 10_000
    layout: RowLayout = field(default_factory=RowLayout)

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("scene must be at least 1x1")
        if not 0.0 <= self.noise_rate <= 1.0:
            raise ValueError("noise_rate must be within [0, 1]")
        if set(self.category_palettes) != set(self.category_ranges):
            raise InfeasibleSpecError("palettes and ranges must name the same categories")
        for name, palette in self.category_palettes.items():
            if not _box_contains_box(self.category_ranges[name], palette):
                raise InfeasibleSpecError(f"palette for {name!r} leaves its own range")
            for other, rng in self.category_ranges.items():
                if other != name and not _boxes_disjoint(palette, rng):
                    raise InfeasibleSpecError(
                        f"palette for {name!r} intersects the {other!r} range"
                    )
        if not _box_contains_box(self.wilt_hue_band, self.wilt_palette):
            raise InfeasibleSpecError("wilt palette leaves the wilt hue band")
        for name, rng in self.category_ranges.items():
            if not _boxes_disjoint(self.wilt_palette, rng):
                raise InfeasibleSpecError(f"wilt palette intersects the {name!r} range")
        for i, (cx, cy, r) in enumerate(self.wilt_blobs):
            if r < 1:
                raise InfeasibleSpecError(f"blob {i}: radius must be >= 1")
            if cx - r < 0 or cy - r < 0 or cx + r >= self.width or cy + r >= self.height:
                raise InfeasibleSpecError(f"blob {i}: disk leaves the image bounds")
            if _disk_area(r) < self.min_blob_area:
                raise InfeasibleSpecError(
                    f"blob {i}: radius {r} rasterizes to {_disk_area(r)} px,"
                    f" below min_blob_area {self.min_blob_area}"
                )
            for j, (ox, oy, orr) in enumerate(self.wilt_blobs[:i]):
                if (cx - ox) ** 2 + (cy - oy) ** 2 <= (r + orr) ** 2:
                    raise InfeasibleSpecError(f"blobs {j} and {i} overlap")


@dataclass(frozen=True)
class WiltBlob:
    """One planted disk: center, radius, tight bbox, and its exact pixels
    as flat row-major indices."""

    center: tuple[int, int]
    radius: int
    bbox: tuple[int, int, int, int]
    pixel_count: int
    flat_indices: np.ndarray

    def __post_init__(self):
        idx = np.asarray(self.flat_indices, dtype=np.int64)
        idx.flags.writeable = False
        object.__setattr__(self, "flat_indices", idx)


@dataclass(frozen=True)
class GroundTruth:
    """Exact per-pixel region assignment of a generated scene."""

    category_masks: dict[str, BinaryMask]
    wilt_mask: BinaryMask
    blobs: tuple[WiltBlob, ...]

    def __post_init__(self):
        total = np.zeros((self.wilt_mask.height, self.wilt_mask.width), np.int32)
        for m in self.category_masks.values():
            total += np.asarray(m.bits)
        total += np.asarray(self.wilt_mask.bits)
        if total.min() != 1 or total.max() != 1:
            raise ValueError("ground-truth masks must partition the image")

    @property
    def wilt_blob_boxes(self) -> list[tuple[int, int, int, int]]:
        return [b.bbox for b in self.blobs]


def _region_map(spec: SceneSpec) -> tuple[np.ndarray, list[str]]:
    """Integer region codes per pixel: categories in palette order, wilt
    last. Ground is the base layer; rows, strips, and disks stack on top."""
    names = list(spec.category_palettes)
    code = {name: i for i, name in enumerate(names)}
    wilt_code = len(names)
    regions = np.full((spec.height, spec.width), code["ground"], np.int8)

    lay = spec.layout
    ys = np.arange(spec.height)
    veg_rows = (ys % lay.veg_row_period) < lay.veg_row_width
    regions[veg_rows, :] = code["healthy"]
    xs = np.arange(spec.width)
    strips = (xs % lay.strip_period) < lay.strip_width
    regions[:, strips] = code["packing"]

    yy = ys[:, None]
    xx = xs[None, :]
    for cx, cy, r in spec.wilt_blobs:
        disk = (xx - cx) ** 2 + (yy - cy) ** 2 <= r * r
        regions[disk] = wilt_code
    return regions, names


def _draw_box(rng: np.random.Generator, count: int, box: HsvRange) -> np.ndarray:
    h = rng.integers(box.h_lo, box.h_hi + 1, size=count)
    s = rng.integers(box.s_lo, box.s_hi + 1, size=count)
    v = rng.integers(box.v_lo, box.v_hi + 1, size=count)
    return np.stack([h, s, v], axis=1).astype(np.uint8)


def _in_box(hsv: np.ndarray, box: HsvRange) -> np.ndarray:
    h, s, v = hsv[:, 0], hsv[:, 1], hsv[:, 2]
    return (
        (h >= box.h_lo) & (h <= box.h_hi)
        & (s >= box.s_lo) & (s <= box.s_hi)
        & (v >= box.v_lo) & (v <= box.v_hi)
    )


def _round_trip(hsv: np.ndarray) -> np.ndarray:
    rgb = kernels.hsv_to_rgb_u8(hsv.reshape(1, -1, 3))
    return kernels.rgb_to_hsv_u8(rgb).reshape(-1, 3)


def _fill_region(rng: np.random.Generator, count: int, box: HsvRange, name: str) -> np.ndarray:
    """Draw HSV triples from the box until their RGB round trip stays in
    the box. Low-chroma boxes can collapse hue information; a box that
    cannot stabilize within the round cap is reported infeasible."""
    out = np.empty((count, 3), np.uint8)
    pending = np.arange(count)
    for _ in range(_REJECTION_ROUNDS):
        if pending.size == 0:
            return out
        draw = _draw_box(rng, pending.size, box)
        ok = _in_box(_round_trip(draw), box)
        out[pending[ok]] = draw[ok]
        pending = pending[~ok]
    raise InfeasibleSpecError(
        f"palette for {name!r} keeps escaping its box after {_REJECTION_ROUNDS} redraws"
    )


def generate_scene(spec: SceneSpec) -> tuple[RasterImage, GroundTruth]:
    """Render the scene and its exact ground truth.

    Deterministic given the seed: regions fill in palette order, wilt
    last, then noise repaints a random sprinkle of non-wilt pixels with
    uniform HSV. Wilt pixels are left untouched by noise so the planted
    blobs stay exactly known.
    """
    rng = np.random.default_rng(spec.seed)
    regions, names = _region_map(spec)
    wilt_code = len(names)

    hsv = np.zeros((spec.height, spec.width, 3), np.uint8)
    for i, name in enumerate(names):
        sel = regions == i
        n = int(np.count_nonzero(sel))
        if n:
            hsv[sel] = _fill_region(rng, n, spec.category_palettes[name], name)
    wilt_sel = regions == wilt_code
    n_wilt = int(np.count_nonzero(wilt_sel))
    if n_wilt:
        hsv[wilt_sel] = _fill_region(rng, n_wilt, spec.wilt_palette, "wilt")

    if spec.noise_rate > 0.0:
        noisy = (rng.random((spec.height, spec.width)) < spec.noise_rate) & ~wilt_sel
        n_noise = int(np.count_nonzero(noisy))
        if n_noise:
            h = rng.integers(0, 180, size=n_noise)
            s = rng.integers(0, 256, size=n_noise)
            v = rng.integers(0, 256, size=n_noise)
            hsv[noisy] = np.stack([h, s, v], axis=1).astype(np.uint8)

    rgb = kernels.hsv_to_rgb_u8(hsv)
    _check_region_colors(spec, rgb, regions, names)

    masks = {name: BinaryMask(regions == i) for i, name in enumerate(names)}
    blobs = []
    for cx, cy, r in spec.wilt_blobs:
        yy = np.arange(spec.height)[:, None]
        xx = np.arange(spec.width)[None, :]
        disk = (xx - cx) ** 2 + (yy - cy) ** 2 <= r * r
        idx = np.flatnonzero(disk)
        ys_b, xs_b = np.nonzero(disk)
        blobs.append(
            WiltBlob(
                center=(cx, cy),
                radius=r,
                bbox=(int(xs_b.min()), int(ys_b.min()), int(xs_b.max()), int(ys_b.max())),
                pixel_count=int(idx.size),
                flat_indices=idx,
            )
        )
    truth = GroundTruth(
        category_masks=masks,
        wilt_mask=BinaryMask(wilt_sel),
        blobs=tuple(blobs),
    )
    return RasterImage(rgb, RGB), truth


def _check_region_colors(
    spec: SceneSpec, rgb: np.ndarray, regions: np.ndarray, names: list[str]
) -> None:
    """Generator self-checks: wilt pixels must sit outside every category
    range without exception; category pixels must land in their own range
    up to the noise allowance."""
    hsv = kernels.rgb_to_hsv_u8(rgb).reshape(-1, 3)
    flat_regions = regions.ravel()
    wilt_px = hsv[flat_regions == len(names)]
    if wilt_px.size:
        for name, rng_box in spec.category_ranges.items():
            if np.any(_in_box(wilt_px, rng_box)):
                raise AssertionError(f"wilt pixel landed inside the {name!r} range")
    for i, name in enumerate(names):
        own = hsv[flat_regions == i]
        if own.shape[0]:
            frac = float(np.count_nonzero(_in_box(own, spec.category_ranges[name]))) / own.shape[0]
            if frac < 0.99:
                raise AssertionError(
                    f"only {frac:.2%} of {name!r} pixels fall in their range"
                )


def place_blobs(
    width: int,
    height: int,
    count: int,
    radius: int | tuple[int, int],
    seed: int = 0,
    attempts: int = 1000,
) -> tuple[tuple[int, int, int], ...]:
    """Sample non-overlapping disks that fit inside the image.

    radius may be a single value or an inclusive (lo, hi) range drawn per
    blob. Placement is rejection sampling, so crowded requests fail with
    InfeasibleSpecError once the attempt budget runs out.
    """
    rng = np.random.default_rng(seed)
    r_lo, r_hi = (radius, radius) if isinstance(radius, int) else radius
    if r_lo < 1 or r_lo > r_hi:
        raise InfeasibleSpecError(f"bad radius range {r_lo}..{r_hi}")
    if 2 * r_lo >= min(width, height):
        raise InfeasibleSpecError(f"radius {r_lo} cannot fit in {width}x{height}")
    placed: list[tuple[int, int, int]] = []
    for _ in range(attempts):
        if len(placed) == count:
            break
        r = int(rng.integers(r_lo, r_hi + 1))
        if 2 * r >= min(width, height):
            continue
        cx = int(rng.integers(r, width - r))
        cy = int(rng.integers(r, height - r))
        if all((cx - ox) ** 2 + (cy - oy) ** 2 > (r + orr) ** 2 for ox, oy, orr in placed):
            placed.append((cx, cy, r))
    if len(placed) < count:
        raise InfeasibleSpecError(
            f"could not place {count} blobs of radius {r_lo}..{r_hi} in {width}x{height}"
        )
    return tuple(placed)


@dataclass(frozen=True)
class DetectionScore:
    blobs_total: int
    blobs_detected: int
    blob_recall: float
    pixel_precision: float
    pixel_recall: float


def score_detection(truth: GroundTruth, detected: BinaryMask) -> DetectionScore:
    """Compare a detected wilt mask against ground truth.

    A blob counts as detected when at least half of its pixels fall inside
    a single detected component. Pixel precision and recall follow the
    usual conventions, with empty sides scoring vacuously perfect.
    """
    if (truth.wilt_mask.height, truth.wilt_mask.width) != (detected.height, detected.width):
        raise DimensionMismatchError(
            f"truth {truth.wilt_mask.width}x{truth.wilt_mask.height}"
            f" vs detection {detected.width}x{detected.height}"
        )
    det_bits = np.asarray(detected.bits)
    truth_bits = np.asarray(truth.wilt_mask.bits)
    det_n = int(np.count_nonzero(det_bits))
    truth_n = int(np.count_nonzero(truth_bits))
    tp = int(np.count_nonzero(det_bits & truth_bits))
    precision = 1.0 if det_n == 0 else tp / det_n
    recall = 1.0 if truth_n == 0 else tp / truth_n

    labels, _ = kernels.label_components(det_bits)
    flat_labels = labels.ravel()
    detected_blobs = 0
    for blob in truth.blobs:
        hits = flat_labels[blob.flat_indices]
        hits = hits[hits > 0]
        if hits.size:
            best = int(np.bincount(hits).max())
            if 2 * best >= blob.pixel_count:
                detected_blobs += 1
    total = len(truth.blobs)
    blob_recall = 1.0 if total == 0 else detected_blobs / total
    return DetectionScore(
        blobs_total=total,
        blobs_detected=detected_blobs,
        blob_recall=blob_recall,
        pixel_precision=precision,
        pixel_recall=recall,
    )
