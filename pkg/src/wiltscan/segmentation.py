"""Rule-based HSV segmentation of field photographs.

Each known scene category (healthy vegetation, bare ground, packing
material) owns an inclusive HSV box. A pixel joins a category when all
three channels fall inside the box; whatever no category claims becomes
the residual, which is where wilted tissue ends up for the clustering
stage.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from wiltscan.errors import DimensionMismatchError, InvalidColorspaceError
from wiltscan.image import HSV, BinaryMask, RasterImage
from wiltscan.morphology import StructuringElement, apply_sequence


@dataclass(frozen=True)
class HsvRange:
    """Inclusive box in HSV space."""

    h_lo: int
    h_hi: int
    s_lo: int
    s_hi: int
    v_lo: int
    v_hi: int

    def __post_init__(self):
        for lo, hi, name, cap in (
            (self.h_lo, self.h_hi, "h", 179),
            (self.s_lo, self.s_hi, "s", 255),
            (self.v_lo, self.v_hi, "v", 255),
        ):
            if not (0 <= lo <= hi <= cap):
                raise ValueError(f"need 0 <= {name}_lo <= {name}_hi <= {cap}, got [{lo}, {hi}]")

    def contains(self, h: int, s: int, v: int) -> bool:
        return (
            self.h_lo <= h <= self.h_hi
            and self.s_lo <= s <= self.s_hi
            and self.v_lo <= v <= self.v_hi
        )


@dataclass(frozen=True)
class CategoryProfile:
    """One segmentation rule: a named HSV box plus its mask cleanup."""

    name: str
    hsv_range: HsvRange
    element: StructuringElement = field(
        default_factory=lambda: StructuringElement.square(3)
    )
    sequence: tuple[str, ...] = ("open", "close")


def default_profiles() -> tuple[CategoryProfile, ...]:
    """Thresholds calibrated on banana-field imagery.

    Packing material is effectively a hue-only class (saturation and value
    unconstrained) and overlaps healthy vegetation between hues 43 and 65;
    the residual is defined by the union so the overlap is harmless.
    """
    return (
        CategoryProfile("healthy", HsvRange(30, 65, 59, 255, 43, 255)),
        CategoryProfile("ground", HsvRange(15, 20, 85, 255, 35, 255)),
        CategoryProfile("packing", HsvRange(43, 179, 0, 255, 0, 255)),
    )


def threshold_mask(img: RasterImage, box: HsvRange) -> BinaryMask:
    """Pixels of an HSV image inside the box, bounds inclusive."""
    if img.colorspace != HSV:
        raise InvalidColorspaceError("threshold needs an HSV image")
    px = np.asarray(img.pixels)
    h, s, v = px[..., 0], px[..., 1], px[..., 2]
    bits = (
        (h >= box.h_lo) & (h <= box.h_hi)
        & (s >= box.s_lo) & (s <= box.s_hi)
        & (v >= box.v_lo) & (v <= box.v_hi)
    )
    return BinaryMask(bits)


@dataclass(frozen=True)
class SegmentationResult:
    category_masks: dict[str, BinaryMask]
    residual_mask: BinaryMask
    pixel_counts: dict[str, int]
    category_union_count: int


def segment_categories(
    img: RasterImage, profiles: tuple[CategoryProfile, ...] | None = None
) -> SegmentationResult:
    """Threshold every category, clean each mask, and form the residual.

    Categories are independent and may overlap (the default healthy and
    packing boxes share hues 43 through 65); the residual is the
    complement of their union, which makes its definition insensitive to
    profile order.
    """
    if profiles is None:
        profiles = default_profiles()
    if img.colorspace != HSV:
        raise InvalidColorspaceError("segmentation needs an HSV image")

    union = np.zeros((img.height, img.width), np.bool_)
    masks: dict[str, BinaryMask] = {}
    counts: dict[str, int] = {}
    for prof in profiles:
        raw = threshold_mask(img, prof.hsv_range)
        cleaned = apply_sequence(raw, prof.element, prof.sequence)
        masks[prof.name] = cleaned
        counts[prof.name] = cleaned.popcount()
        union |= np.asarray(cleaned.bits)

    residual = BinaryMask(~union)
    return SegmentationResult(
        category_masks=masks,
        residual_mask=residual,
        pixel_counts=counts,
        category_union_count=int(np.count_nonzero(union)),
    )


def apply_residual(img: RasterImage, residual: BinaryMask) -> RasterImage:
    """Black out everything except residual pixels; keeps the colorspace."""
    if (img.height, img.width) != (residual.height, residual.width):
        raise DimensionMismatchError(
            f"image {img.width}x{img.height} vs mask {residual.width}x{residual.height}"
        )
    px = np.asarray(img.pixels).copy()
    px[~np.asarray(residual.bits)] = 0
    return RasterImage(px, img.colorspace)
