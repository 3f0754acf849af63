"""Benchmark the numba and NumPy kernel backends against each other.

Each kernel runs on a representative input with both implementations; the
outputs are compared bit-for-bit before timing, so the table below is
only printed for backends that agree. Timings are best-of-N wall clock.

Usage: python benchmarks/bench_kernels.py [--repeats N] [--width W --height H]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from wiltscan.kernels import numba_impl, numpy_impl
from wiltscan.morphology import StructuringElement


def _best_of(fn, args, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best * 1000.0


def _equal(a, b) -> bool:
    if isinstance(a, tuple):
        return all(_equal(x, y) for x, y in zip(a, b))
    return np.array_equal(np.asarray(a), np.asarray(b))


def _cases(width: int, height: int, rng: np.random.Generator):
    rgb = rng.integers(0, 256, size=(height, width, 3), dtype=np.uint8)
    hsv = np.stack(
        [
            rng.integers(0, 180, size=(height, width), dtype=np.uint8),
            rng.integers(0, 256, size=(height, width), dtype=np.uint8),
            rng.integers(0, 256, size=(height, width), dtype=np.uint8),
        ],
        axis=2,
    )
    mask = rng.random((height, width)) < 0.5
    se = StructuringElement.square(3)
    off_y, off_x = se.offsets()
    sh, sw = se.bits.shape

    feats = rng.random((200_000, 3)).astype(np.float32)
    cents = rng.random((7, 3)).astype(np.float64)

    blobs = np.zeros((height, width), np.bool_)
    yy, xx = np.mgrid[0:height, 0:width]
    for cx, cy, r in ((width // 4, height // 2, 60), (3 * width // 4, height // 3, 90)):
        blobs |= (xx - cx) ** 2 + (yy - cy) ** 2 <= r * r
    labels_np, _ = numpy_impl.label_components(blobs)
    sy, sx = np.argwhere(labels_np == 1)[0]

    return [
        ("rgb_to_hsv_u8", (rgb,)),
        ("hsv_to_rgb_u8", (hsv,)),
        ("erode", (mask, off_y, off_x, sh, sw)),
        ("dilate", (mask, off_y, off_x, sh, sw)),
        ("assign_labels", (feats, cents)),
        ("label_components", (blobs,)),
        ("trace_boundary", (labels_np, 1, int(sy), int(sx))),
    ]


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=5, help="best-of-N timing (default 5)")
    parser.add_argument("--width", type=int, default=1024)
    parser.add_argument("--height", type=int, default=768)
    args = parser.parse_args()

    rng = np.random.default_rng(42)
    cases = _cases(args.width, args.height, rng)

    print(f"input: {args.width}x{args.height}, best of {args.repeats}")
    print(f"{'kernel':<18} {'numpy ms':>10} {'numba ms':>10} {'speedup':>8}")
    for name, call_args in cases:
        fn_np = getattr(numpy_impl, name)
        fn_nb = getattr(numba_impl, name)
        out_np = fn_np(*call_args)
        out_nb = fn_nb(*call_args)  # first call also JIT-compiles
        if not _equal(out_np, out_nb):
            print(f"{name:<18} BACKENDS DISAGREE")
            return 1
        t_np = _best_of(fn_np, call_args, args.repeats)
        t_nb = _best_of(fn_nb, call_args, args.repeats)
        print(f"{name:<18} {t_np:>10.2f} {t_nb:>10.2f} {t_np / t_nb:>7.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
