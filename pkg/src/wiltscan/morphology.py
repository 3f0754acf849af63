"""Binary morphology on masks.

Pixels outside the image are treated as background for both erosion and
dilation, so erosion eats away at the frame border while dilation never
conjures foreground from beyond it. Closing alone is computed on a
halo-extended grid and cropped back: composing the windowed operations
directly would erode border-touching foreground that the clipped
dilation could not protect, breaking the extensivity law (m subset of
close(m)) that closing must satisfy.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from wiltscan import kernels
from wiltscan.image import BinaryMask


@dataclass(frozen=True)
class StructuringElement:
    """Neighborhood shape for morphology, anchored at its center.

    Both dimensions must be odd so the anchor is unambiguous.
    """

    bits: np.ndarray  # (sh, sw) bool
    name: str | None = None  # 'square' | 'cross' | 'diamond' when built by a factory

    def __post_init__(self):
        b = np.asarray(self.bits).astype(np.bool_)
        if b.ndim != 2:
            raise ValueError(f"structuring element must be 2-D, got {b.ndim}-D")
        if b.shape[0] % 2 == 0 or b.shape[1] % 2 == 0:
            raise ValueError(f"structuring element dims must be odd, got {b.shape}")
        if not b.any():
            raise ValueError("structuring element has no true cells")
        object.__setattr__(self, "bits", b)

    @property
    def shape(self) -> tuple[int, int]:
        return self.bits.shape

    def offsets(self) -> tuple[np.ndarray, np.ndarray]:
        """True-cell coordinates relative to the anchor, raster order."""
        ys, xs = np.nonzero(self.bits)
        cy = self.bits.shape[0] // 2
        cx = self.bits.shape[1] // 2
        return (ys - cy).astype(np.int64), (xs - cx).astype(np.int64)

    def __eq__(self, other) -> bool:
        if not isinstance(other, StructuringElement):
            return NotImplemented
        return np.array_equal(self.bits, other.bits)

    def __hash__(self):
        return hash(self.bits.shape)

    @staticmethod
    def square(size: int) -> "StructuringElement":
        _check_size(size)
        return StructuringElement(np.ones((size, size), np.bool_), "square")

    @staticmethod
    def cross(size: int) -> "StructuringElement":
        """Center row and column only."""
        _check_size(size)
        bits = np.zeros((size, size), np.bool_)
        bits[size // 2, :] = True
        bits[:, size // 2] = True
        return StructuringElement(bits, "cross")

    @staticmethod
    def diamond(size: int) -> "StructuringElement":
        """Cells within Manhattan distance size//2 of the center."""
        _check_size(size)
        r = size // 2
        y, x = np.ogrid[-r:r + 1, -r:r + 1]
        return StructuringElement(np.abs(y) + np.abs(x) <= r, "diamond")


def _check_size(size: int) -> None:
    if size < 1 or size % 2 == 0:
        raise ValueError(f"size must be a positive odd integer, got {size}")


def erode(mask: BinaryMask, se: StructuringElement) -> BinaryMask:
    """Keep a pixel only if every true cell of the element lands on
    foreground (out-of-frame counts as background)."""
    off_y, off_x = se.offsets()
    out = kernels.erode(np.asarray(mask.bits), off_y, off_x, *se.shape)
    return BinaryMask(out)


def dilate(mask: BinaryMask, se: StructuringElement) -> BinaryMask:
    """Set a pixel if any true cell of the reflected element reaches
    foreground."""
    off_y, off_x = se.offsets()
    out = kernels.dilate(np.asarray(mask.bits), off_y, off_x, *se.shape)
    return BinaryMask(out)


def open_mask(mask: BinaryMask, se: StructuringElement) -> BinaryMask:
    """Erosion then dilation; removes specks smaller than the element."""
    return dilate(erode(mask, se), se)


def close_mask(mask: BinaryMask, se: StructuringElement) -> BinaryMask:
    """Dilation then erosion; fills gaps smaller than the element.

    Runs on a grid padded by the element radius so the dilation can spill
    past the frame before the erosion reads it back; the result is the
    plane closing restricted to the frame, which keeps closing extensive
    and idempotent right up to the borders.
    """
    sh, sw = se.shape
    ry, rx = (sh - 1) // 2, (sw - 1) // 2
    bits = np.asarray(mask.bits)
    padded = np.zeros((bits.shape[0] + 2 * ry, bits.shape[1] + 2 * rx), np.bool_)
    padded[ry:ry + bits.shape[0], rx:rx + bits.shape[1]] = bits
    off_y, off_x = se.offsets()
    closed = kernels.erode(kernels.dilate(padded, off_y, off_x, sh, sw), off_y, off_x, sh, sw)
    return BinaryMask(closed[ry:ry + bits.shape[0], rx:rx + bits.shape[1]])


_OPS = {
    "erode": erode,
    "dilate": dilate,
    "open": open_mask,
    "close": close_mask,
}


def apply_sequence(
    mask: BinaryMask, se: StructuringElement, sequence: tuple[str, ...]
) -> BinaryMask:
    """Run a named chain of operations left to right."""
    out = mask
    for op in sequence:
        try:
            fn = _OPS[op]
        except KeyError:
            raise ValueError(f"unknown morphology op {op!r}") from None
        out = fn(out, se)
    return out
