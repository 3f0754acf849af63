"""Per-image detection reports.

Reports serialize to JSON with sorted keys so identical runs produce
identical bytes. Stage timings live on the in-memory object for logging
but are deliberately left out of the serialized form: wall-clock noise
would break the byte-for-byte determinism contract of repeated runs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path


@dataclass(frozen=True)
class ElbowReport:
    k_values: tuple[int, ...]
    wilt_pixel_counts: tuple[int, ...]
    chosen_k: int
    seed_policy: str

    def to_dict(self) -> dict:
        return {
            "k_values": list(self.k_values),
            "wilt_pixel_counts": list(self.wilt_pixel_counts),
            "chosen_k": self.chosen_k,
            "seed_policy": self.seed_policy,
        }


@dataclass(frozen=True)
class WiltClusterReport:
    index: int
    count: int
    centroid_unit: tuple[float, float, float]
    centroid_hsv: tuple[int, int, int]

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "count": self.count,
            "centroid_unit": list(self.centroid_unit),
            "centroid_hsv": list(self.centroid_hsv),
        }


@dataclass(frozen=True)
class ContourReport:
    area: int
    bbox: tuple[int, int, int, int]

    def to_dict(self) -> dict:
        return {"area": self.area, "bbox": list(self.bbox)}


@dataclass(frozen=True)
class DetectionReport:
    image: str
    width: int
    height: int
    category_pixel_counts: dict[str, int]
    category_union_count: int
    residual_count: int
    sample_count: int
    k: int | None
    elbow: ElbowReport | None
    wilt_cluster: WiltClusterReport | None
    contours: tuple[ContourReport, ...]
    min_area: int
    max_area: int | None
    timings_ms: dict[str, float] = field(default_factory=dict, compare=False)

    def to_dict(self) -> dict:
        """Serializable view; timings are intentionally absent."""
        return {
            "image": self.image,
            "width": self.width,
            "height": self.height,
            "category_pixel_counts": dict(self.category_pixel_counts),
            "category_union_count": self.category_union_count,
            "residual_count": self.residual_count,
            "sample_count": self.sample_count,
            "k": self.k,
            "elbow": None if self.elbow is None else self.elbow.to_dict(),
            "wilt_cluster": None if self.wilt_cluster is None else self.wilt_cluster.to_dict(),
            "contours": [c.to_dict() for c in self.contours],
            "min_area": self.min_area,
            "max_area": self.max_area,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def write_report(report: DetectionReport, path: str | Path) -> None:
    Path(path).write_text(report.to_json())


def validate_report(doc: dict) -> None:
    """Check the internal consistency every emitted report must satisfy.

    Raises ValueError naming the first violated rule. Accepts the
    dictionary form so serialized reports can be validated after the fact.
    """
    width = doc["width"]
    height = doc["height"]
    if width < 1 or height < 1:
        raise ValueError("image dimensions must be positive")
    if doc["residual_count"] != width * height - doc["category_union_count"]:
        raise ValueError("residual_count must complement the category union")
    for name, count in doc["category_pixel_counts"].items():
        if not 0 <= count <= width * height:
            raise ValueError(f"category {name!r} count {count} out of range")
    if doc["category_union_count"] > sum(doc["category_pixel_counts"].values()):
        raise ValueError("union count exceeds the sum of category counts")
    if doc["sample_count"] < 0:
        raise ValueError("sample_count must be non-negative")

    elbow = doc["elbow"]
    if elbow is not None:
        if len(elbow["k_values"]) != len(elbow["wilt_pixel_counts"]):
            raise ValueError("elbow scan counts must align with its k values")
        if elbow["chosen_k"] not in elbow["k_values"]:
            raise ValueError("chosen_k must be one of the scanned k values")
        if doc["k"] != elbow["chosen_k"]:
            raise ValueError("report k must equal the elbow's chosen_k")
        cluster = doc["wilt_cluster"]
        if cluster is not None:
            at = elbow["k_values"].index(elbow["chosen_k"])
            if cluster["count"] != elbow["wilt_pixel_counts"][at]:
                raise ValueError(
                    "wilt cluster count must match the scan count at chosen_k"
                )

    cluster = doc["wilt_cluster"]
    if cluster is not None:
        if not 0 <= cluster["index"] < (doc["k"] or 1):
            raise ValueError("wilt cluster index out of range")
        if not 0 <= cluster["count"] <= doc["sample_count"]:
            raise ValueError("wilt cluster count exceeds the sample count")

    min_area = doc["min_area"]
    max_area = doc["max_area"]
    for c in doc["contours"]:
        if c["area"] < min_area:
            raise ValueError(f"kept contour area {c['area']} below min_area {min_area}")
        if max_area is not None and c["area"] > max_area:
            raise ValueError(f"kept contour area {c['area']} above max_area {max_area}")
        min_x, min_y, max_x, max_y = c["bbox"]
        if not (0 <= min_x <= max_x < width and 0 <= min_y <= max_y < height):
            raise ValueError(f"contour bbox {c['bbox']} leaves the image")
