"""Connected wilt regions: extraction, area filtering, and overlay drawing.

A contour here is one 8-connected component of the wilt mask: its traced
outer boundary, its exact pixel count (from labeling, never from the
boundary polygon), and its bounding box.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from wiltscan import kernels
from wiltscan.errors import InvalidColorspaceError, OutOfBoundsError
from wiltscan.image import RGB, BinaryMask, RasterImage
from wiltscan.morphology import StructuringElement, dilate


@dataclass(frozen=True)
class Contour:
    """One detected region.

    boundary: (M, 2) int32 array of (x, y) points, ordered along the outer
    border, closed (first and last points 8-adjacent). Points repeat where
    the region pinches to a single pixel width.
    """

    boundary: np.ndarray
    area: int
    bbox: tuple[int, int, int, int]  # (min_x, min_y, max_x, max_y)

    def __post_init__(self):
        b = np.asarray(self.boundary, dtype=np.int32)
        if b.ndim != 2 or b.shape[1] != 2 or b.shape[0] < 1:
            raise ValueError(f"boundary must be non-empty (M, 2), got {b.shape}")
        steps = np.abs(np.diff(b, axis=0))
        if steps.size and int(steps.max()) > 1:
            raise ValueError("consecutive boundary points must be 8-adjacent")
        if max(abs(int(b[0, 0]) - int(b[-1, 0])), abs(int(b[0, 1]) - int(b[-1, 1]))) > 1:
            raise ValueError("boundary must close")
        if self.area < 1:
            raise ValueError("area must be >= 1")
        min_x, min_y, max_x, max_y = self.bbox
        if not (
            min_x <= b[:, 0].min() and b[:, 0].max() <= max_x
            and min_y <= b[:, 1].min() and b[:, 1].max() <= max_y
        ):
            raise ValueError("bbox must contain every boundary point")
        b.flags.writeable = False
        object.__setattr__(self, "boundary", b)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Contour):
            return NotImplemented
        return (
            self.area == other.area
            and self.bbox == other.bbox
            and np.array_equal(self.boundary, other.boundary)
        )

    def __hash__(self):
        return hash((self.area, self.bbox))


@dataclass(frozen=True)
class ContourFilter:
    """Area gate, bounds inclusive."""

    min_area: int = 10_000
    max_area: int | None = None

    def __post_init__(self):
        if self.min_area < 1:
            raise ValueError("min_area must be >= 1")
        if self.max_area is not None and self.max_area < self.min_area:
            raise ValueError("max_area must be >= min_area")

    def keep(self, contour: Contour) -> bool:
        if contour.area < self.min_area:
            return False
        return self.max_area is None or contour.area <= self.max_area


def find_contours(mask: BinaryMask) -> list[Contour]:
    """One contour per 8-connected component of true bits.

    Components come out sorted by their top-left-most pixel in row-major
    order; areas are component pixel counts.
    """
    labels, n = kernels.label_components(np.asarray(mask.bits))
    if n == 0:
        return []
    w = mask.width
    flat = labels.ravel()
    idx = np.flatnonzero(flat > 0)
    labs = flat[idx]
    ys = (idx // w).astype(np.int64)
    xs = (idx % w).astype(np.int64)

    areas = np.bincount(labs, minlength=n + 1)
    min_x = np.full(n + 1, w, np.int64)
    max_x = np.full(n + 1, -1, np.int64)
    min_y = np.full(n + 1, mask.height, np.int64)
    max_y = np.full(n + 1, -1, np.int64)
    np.minimum.at(min_x, labs, xs)
    np.maximum.at(max_x, labs, xs)
    np.minimum.at(min_y, labs, ys)
    np.maximum.at(max_y, labs, ys)
    # first flat index per label is its top-left-most pixel (labels are
    # assigned in raster order, so this doubles as the trace start)
    starts = np.full(n + 1, flat.size, np.int64)
    np.minimum.at(starts, labs, idx)

    contours = []
    for i in range(1, n + 1):
        sy, sx = divmod(int(starts[i]), w)
        path = kernels.trace_boundary(labels, i, sy, sx)
        boundary = np.stack([path[:, 1], path[:, 0]], axis=1)
        contours.append(
            Contour(
                boundary=boundary,
                area=int(areas[i]),
                bbox=(int(min_x[i]), int(min_y[i]), int(max_x[i]), int(max_y[i])),
            )
        )
    return contours


def filter_contours(contours: list[Contour], flt: ContourFilter) -> list[Contour]:
    """Order-preserving area filter."""
    return [c for c in contours if flt.keep(c)]


def draw_contours(
    img: RasterImage,
    contours: list[Contour],
    color: tuple[int, int, int] = (255, 0, 0),
    thickness: int = 3,
) -> RasterImage:
    """New image with boundary strokes painted over.

    A stroke covers every pixel within Chebyshev distance thickness - 1 of
    a boundary point, so thickness 1 recolors exactly the boundary points.
    """
    if img.colorspace != RGB:
        raise InvalidColorspaceError("overlay target must be RGB")
    if thickness < 1:
        raise ValueError("thickness must be >= 1")
    if len(color) != 3 or not all(0 <= c <= 255 for c in color):
        raise ValueError(f"color must be an RGB triple, got {color!r}")

    px = np.asarray(img.pixels).copy()
    if not contours:
        return RasterImage(px, RGB)

    stroke = np.zeros((img.height, img.width), np.bool_)
    for c in contours:
        xs = c.boundary[:, 0]
        ys = c.boundary[:, 1]
        if (
            xs.min() < 0 or ys.min() < 0
            or xs.max() >= img.width or ys.max() >= img.height
        ):
            raise OutOfBoundsError(
                f"contour boundary leaves the {img.width}x{img.height} image"
            )
        stroke[ys, xs] = True
    if thickness > 1:
        se = StructuringElement.square(2 * thickness - 1)
        stroke = np.asarray(dilate(BinaryMask(stroke), se).bits)
    px[stroke] = np.array(color, np.uint8)
    return RasterImage(px, RGB)
