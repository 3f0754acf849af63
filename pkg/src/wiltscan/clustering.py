"""K-means over residual pixels and elbow selection of the cluster count.

Residual pixels become 3-vector samples (normalized h, s, v). Lloyd's
iterations with k-means++ seeding split them into k clusters; the wilt
cluster is the one whose centroid lands in a configurable hue band. The
cluster count itself is picked by scanning a k range and keeping the k
with the sharpest relative drop in wilt-cluster pixel count.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from wiltscan import kernels
from wiltscan.colorspace import normalize_hsv_values
from wiltscan.errors import (
    DimensionMismatchError,
    EmptyInputError,
    InvalidColorspaceError,
    KExceedsSamplesError,
)
from wiltscan.image import HSV, BinaryMask, RasterImage
from wiltscan.segmentation import HsvRange

# Tolerance for the run-time monotonicity check on inertia; float64
# accumulation order differs between backends by a few ulps.
_INERTIA_SLACK = 1e-9


class PixelSample(NamedTuple):
    position: tuple[int, int]  # (x, y)
    features: np.ndarray  # (3,) float32 in [0, 1]


@dataclass(frozen=True)
class PixelSamples:
    """Column-wise store of samples: positions (N, 2) as (x, y) int32,
    features (N, 3) float32 on the unit cube."""

    positions: np.ndarray
    features: np.ndarray

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=np.int32)
        feats = np.asarray(self.features, dtype=np.float32)
        if pos.ndim != 2 or pos.shape[1] != 2:
            raise ValueError(f"positions must be (N, 2), got {pos.shape}")
        if feats.ndim != 2 or feats.shape[1] != 3:
            raise ValueError(f"features must be (N, 3), got {feats.shape}")
        if pos.shape[0] != feats.shape[0]:
            raise ValueError("positions and features disagree on N")
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "features", feats)

    def __len__(self) -> int:
        return self.positions.shape[0]

    def sample_at(self, i: int) -> PixelSample:
        x, y = self.positions[i]
        return PixelSample((int(x), int(y)), self.features[i])


def collect_samples(img: RasterImage, residual: BinaryMask) -> PixelSamples:
    """One sample per true residual bit, row-major order."""
    if img.colorspace != HSV:
        raise InvalidColorspaceError("samples come from an HSV image")
    if (img.height, img.width) != (residual.height, residual.width):
        raise DimensionMismatchError(
            f"image {img.width}x{img.height} vs mask {residual.width}x{residual.height}"
        )
    ys, xs = np.nonzero(np.asarray(residual.bits))
    positions = np.stack([xs, ys], axis=1).astype(np.int32)
    features = normalize_hsv_values(np.asarray(img.pixels)[ys, xs])
    return PixelSamples(positions, features)


@dataclass(frozen=True)
class ClusterModel:
    k: int
    centroids: np.ndarray  # (k, 3) float64, unit scale
    labels: np.ndarray  # (N,) int32
    counts: np.ndarray  # (k,) int64
    inertia: float
    inertia_history: tuple[float, ...]

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.counts.sum() != self.labels.shape[0]:
            raise ValueError("cluster counts do not sum to the sample total")
        if self.labels.size and int(self.labels.max()) >= self.k:
            raise ValueError("label out of range")
        if self.inertia < 0.0:
            raise ValueError("inertia must be non-negative")


def _as_features(samples) -> np.ndarray:
    if isinstance(samples, PixelSamples):
        return samples.features
    feats = np.asarray(samples, dtype=np.float32)
    if feats.ndim != 2 or feats.shape[1] != 3:
        raise ValueError(f"expected (N, 3) features, got {feats.shape}")
    return feats


def _sq_dist_to(points: np.ndarray, center: np.ndarray) -> np.ndarray:
    diff = points - center
    return np.einsum("ij,ij->i", diff, diff)


def _init_centroids(feats: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """k-means++ seeding.

    Centers are drawn from the samples, each with probability proportional
    to its squared distance from the nearest already-chosen center. When
    every remaining sample coincides with a chosen center the weights all
    vanish and the draw falls back to uniform.
    """
    f64 = feats.astype(np.float64)
    n = f64.shape[0]
    cents = np.empty((k, 3), np.float64)
    cents[0] = f64[int(rng.integers(n))]
    if k == 1:
        return cents
    d2 = _sq_dist_to(f64, cents[0])
    for i in range(1, k):
        total = float(d2.sum())
        if total <= 0.0:
            idx = int(rng.integers(n))
        else:
            r = rng.random() * total
            idx = int(np.searchsorted(np.cumsum(d2), r, side="right"))
            idx = min(idx, n - 1)
        cents[i] = f64[idx]
        if i + 1 < k:
            d2 = np.minimum(d2, _sq_dist_to(f64, cents[i]))
    return cents


def _update_centroids(
    feats: np.ndarray, labels: np.ndarray, k: int, dists: np.ndarray
) -> np.ndarray:
    """Means of each cluster; empty clusters jump to the sample currently
    farthest from its assigned centroid (each empty grabs a distinct one)."""
    f64 = feats.astype(np.float64)
    counts = np.bincount(labels, minlength=k)
    cents = np.empty((k, 3), np.float64)
    for c in range(3):
        sums = np.bincount(labels, weights=f64[:, c], minlength=k)
        cents[:, c] = sums / np.maximum(counts, 1)
    empties = np.flatnonzero(counts == 0)
    if empties.size:
        d = dists.copy()
        for e in empties:
            far = int(np.argmax(d))
            cents[e] = f64[far]
            d[far] = -1.0
    return cents


def kmeans(samples, k: int, iterations: int = 20, seed: int = 0) -> ClusterModel:
    """Lloyd's algorithm on the unit-cube features.

    Deterministic for a given seed. Distances are squared Euclidean over
    the three feature components; inertia is their sum at the final
    assignment. Stops early once labels stop changing. The per-iteration
    inertia trace is kept on the model; an increase between iterations
    would mean a broken update step, so it is checked on every run.
    """
    feats = _as_features(samples)
    n = feats.shape[0]
    if n == 0:
        raise EmptyInputError("no samples to cluster")
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > n:
        raise KExceedsSamplesError(f"k={k} exceeds sample count {n}")
    if iterations < 1:
        raise ValueError("iterations must be >= 1")

    cents = _init_centroids(feats, k, np.random.default_rng(seed))
    labels: np.ndarray | None = None
    history: list[float] = []
    inertia = 0.0
    for it in range(iterations):
        new_labels, dists = kernels.assign_labels(feats, cents)
        inertia = float(dists.sum())
        if history and inertia > history[-1] + _INERTIA_SLACK * max(1.0, history[-1]):
            raise AssertionError(
                f"inertia rose from {history[-1]!r} to {inertia!r} at iteration {it}"
            )
        history.append(inertia)
        converged = labels is not None and np.array_equal(new_labels, labels)
        labels = new_labels
        if converged:
            break
        if it + 1 < iterations:
            cents = _update_centroids(feats, labels, k, dists)

    counts = np.bincount(labels, minlength=k).astype(np.int64)
    return ClusterModel(
        k=k,
        centroids=cents,
        labels=labels,
        counts=counts,
        inertia=inertia,
        inertia_history=tuple(history),
    )


def select_wilt_cluster(model: ClusterModel, wilt_hue_band: HsvRange) -> int:
    """Index of the cluster holding wilt pixels.

    Prefers the largest cluster whose centroid, scaled back to the 8-bit
    HSV lattice, sits inside the band; ties go to the lower index. With no
    centroid in the band the nearest hue to the band midpoint wins, so the
    selection is total.
    """
    h = model.centroids[:, 0] * 179.0
    s = model.centroids[:, 1] * 255.0
    v = model.centroids[:, 2] * 255.0
    in_band = (
        (h >= wilt_hue_band.h_lo) & (h <= wilt_hue_band.h_hi)
        & (s >= wilt_hue_band.s_lo) & (s <= wilt_hue_band.s_hi)
        & (v >= wilt_hue_band.v_lo) & (v <= wilt_hue_band.v_hi)
    )
    candidates = np.flatnonzero(in_band)
    if candidates.size:
        return int(candidates[np.argmax(model.counts[candidates])])
    midpoint = (wilt_hue_band.h_lo + wilt_hue_band.h_hi) / 2.0
    return int(np.argmin(np.abs(h - midpoint)))


def cluster_mask(
    model: ClusterModel, samples: PixelSamples, index: int, width: int, height: int
) -> BinaryMask:
    """Mask of the samples assigned to one cluster."""
    if not 0 <= index < model.k:
        raise ValueError(f"cluster index {index} outside [0, {model.k})")
    if model.labels.shape[0] != len(samples):
        raise DimensionMismatchError("model labels do not align with samples")
    bits = np.zeros((height, width), np.bool_)
    sel = model.labels == index
    xs = samples.positions[sel, 0]
    ys = samples.positions[sel, 1]
    bits[ys, xs] = True
    return BinaryMask(bits)


def cluster_frames(
    model: ClusterModel, samples: PixelSamples, width: int, height: int
) -> list[BinaryMask]:
    """One mask per cluster; they partition the sampled pixels."""
    return [cluster_mask(model, samples, i, width, height) for i in range(model.k)]


def choose_elbow_k(k_values: Sequence[int], counts: Sequence[int]) -> int:
    """Pick the k after the sharpest relative drop in wilt pixel count.

    Step i scores (counts[i-1] - counts[i]) / counts[i-1]; increases and
    zero denominators score zero. The k of the highest-scoring step wins,
    earliest step on ties. A single scanned k is returned as-is.
    """
    if len(k_values) != len(counts):
        raise ValueError("k_values and counts must align")
    if not k_values:
        raise EmptyInputError("empty elbow scan")
    if len(k_values) == 1:
        return int(k_values[0])
    best_i = 1
    best_score = -1.0
    for i in range(1, len(k_values)):
        prev = counts[i - 1]
        score = 0.0 if prev <= 0 else max(0.0, (prev - counts[i]) / prev)
        if score > best_score:
            best_score = score
            best_i = i
    return int(k_values[best_i])


@dataclass(frozen=True)
class ElbowScan:
    k_values: tuple[int, ...]
    wilt_pixel_counts: tuple[int, ...]
    chosen_k: int

    def __post_init__(self):
        if len(self.k_values) != len(self.wilt_pixel_counts):
            raise ValueError("counts must align with k values")
        if self.chosen_k not in self.k_values:
            raise ValueError("chosen_k must come from the scanned values")


# Seed policy for the per-k runs inside elbow_scan. Every k gets its own
# stream so runs stay independent yet reproducible; reports quote this
# string so the provenance of the scan is auditable.
SEED_POLICY = "per-k seed = base seed + k"


def scan_seed(seed: int, k: int) -> int:
    return seed + k


def elbow_scan(
    samples,
    k_range: Sequence[int],
    iterations: int = 20,
    seed: int = 0,
    wilt_hue_band: HsvRange = HsvRange(5, 29, 0, 255, 0, 255),
) -> ElbowScan:
    """Run kmeans per candidate k and keep the elbow of the wilt counts.

    Candidate ks above the sample count cannot run and are dropped; if
    that removes every candidate the scan degenerates to k = sample count.
    """
    feats = _as_features(samples)
    n = feats.shape[0]
    if n == 0:
        raise EmptyInputError("no samples to scan")
    ks = [int(k) for k in k_range if 1 <= k <= n]
    if not ks:
        ks = [n]
    counts = []
    for k in ks:
        model = kmeans(feats, k, iterations, scan_seed(seed, k))
        idx = select_wilt_cluster(model, wilt_hue_band)
        counts.append(int(model.counts[idx]))
    chosen = choose_elbow_k(ks, counts)
    return ElbowScan(tuple(ks), tuple(counts), chosen)
