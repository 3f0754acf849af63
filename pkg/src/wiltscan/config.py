"""Pipeline configuration: defaults, strict JSON parsing, serialization.

The config file is one JSON document covering every tunable stage. Parsing
is strict: unknown keys, missing keys, and wrong types all raise
ConfigError with the offending path, so a typo cannot silently fall back
to a default and miscalibrate a run.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from wiltscan.errors import ConfigError
from wiltscan.morphology import StructuringElement
from wiltscan.segmentation import CategoryProfile, HsvRange

_SHAPES = ("square", "cross", "diamond")
_OPS = ("erode", "dilate", "open", "close")
_EMITS = ("masks", "frames", "overlay", "report")


def _element(shape: str, size: int) -> StructuringElement:
    factory = getattr(StructuringElement, shape)
    return factory(size)


@dataclass(frozen=True)
class MorphologyConfig:
    """A structuring element by name plus the operation chain to run."""

    shape: str = "square"
    size: int = 3
    sequence: tuple[str, ...] = ("open", "close")

    def __post_init__(self):
        if self.shape not in _SHAPES:
            raise ConfigError(f"unknown element shape {self.shape!r}")
        if self.size < 1 or self.size % 2 == 0:
            raise ConfigError(f"element size must be odd and positive, got {self.size}")
        for op in self.sequence:
            if op not in _OPS:
                raise ConfigError(f"unknown morphology op {op!r}")

    def element(self) -> StructuringElement:
        return _element(self.shape, self.size)


@dataclass(frozen=True)
class CleanupConfig(MorphologyConfig):
    """Morphology pass that can be switched off entirely."""

    enabled: bool = True


@dataclass(frozen=True)
class CategoryConfig:
    name: str
    hsv_range: HsvRange
    morphology: MorphologyConfig = field(default_factory=MorphologyConfig)

    def __post_init__(self):
        if not self.name:
            raise ConfigError("category name must be non-empty")

    def profile(self) -> CategoryProfile:
        return CategoryProfile(
            name=self.name,
            hsv_range=self.hsv_range,
            element=self.morphology.element(),
            sequence=self.morphology.sequence,
        )


@dataclass(frozen=True)
class ClusteringConfig:
    k: int | None = None  # pin k and skip the elbow scan
    k_range: tuple[int, int] = (2, 20)
    iterations: int = 20
    seed: int = 0
    wilt_hue_band: HsvRange = HsvRange(5, 29, 0, 255, 0, 255)

    def __post_init__(self):
        if self.k is not None and self.k < 1:
            raise ConfigError(f"k must be >= 1, got {self.k}")
        lo, hi = self.k_range
        if not 1 <= lo <= hi:
            raise ConfigError(f"k_range must satisfy 1 <= lo <= hi, got {lo}..{hi}")
        if self.iterations < 1:
            raise ConfigError(f"iterations must be >= 1, got {self.iterations}")


@dataclass(frozen=True)
class ContourConfig:
    min_area: int = 10_000
    max_area: int | None = None
    overlay_color: tuple[int, int, int] = (255, 0, 0)
    overlay_thickness: int = 3

    def __post_init__(self):
        if self.min_area < 1:
            raise ConfigError(f"min_area must be >= 1, got {self.min_area}")
        if self.max_area is not None and self.max_area < self.min_area:
            raise ConfigError("max_area must be >= min_area")
        if len(self.overlay_color) != 3 or not all(0 <= c <= 255 for c in self.overlay_color):
            raise ConfigError(f"overlay_color must be an RGB triple, got {self.overlay_color!r}")
        if self.overlay_thickness < 1:
            raise ConfigError("overlay_thickness must be >= 1")


@dataclass(frozen=True)
class OutputConfig:
    masks: bool = False
    frames: bool = False
    overlay: bool = True
    report: bool = True


@dataclass(frozen=True)
class PipelineConfig:
    categories: tuple[CategoryConfig, ...] = ()
    residual_cleanup: CleanupConfig = field(
        default_factory=lambda: CleanupConfig(enabled=False)
    )
    wilt_mask_cleanup: CleanupConfig = field(
        default_factory=lambda: CleanupConfig(sequence=("close", "open"))
    )
    clustering: ClusteringConfig = field(default_factory=ClusteringConfig)
    contours: ContourConfig = field(default_factory=ContourConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    def __post_init__(self):
        names = [c.name for c in self.categories]
        if len(names) != len(set(names)):
            raise ConfigError("category names must be unique")

    def profiles(self) -> tuple[CategoryProfile, ...]:
        return tuple(c.profile() for c in self.categories)


def default_config() -> PipelineConfig:
    """Shipped defaults: the three field categories with their calibrated
    thresholds, open-then-close cleanup per category, close-then-open on
    the wilt mask, a 2..20 elbow scan, and a 10,000-pixel area gate."""
    return PipelineConfig(
        categories=(
            CategoryConfig("healthy", HsvRange(30, 65, 59, 255, 43, 255)),
            CategoryConfig("ground", HsvRange(15, 20, 85, 255, 35, 255)),
            CategoryConfig("packing", HsvRange(43, 179, 0, 255, 0, 255)),
        ),
    )


# ---------------------------------------------------------------------------
# strict JSON parsing


def _check_keys(obj: dict, path: str, required: tuple[str, ...], optional: tuple[str, ...] = ()):
    if not isinstance(obj, dict):
        raise ConfigError(f"{path}: expected an object")
    unknown = set(obj) - set(required) - set(optional)
    if unknown:
        raise ConfigError(f"{path}: unknown keys {sorted(unknown)}")
    missing = set(required) - set(obj)
    if missing:
        raise ConfigError(f"{path}: missing keys {sorted(missing)}")


def _int(value, path: str) -> int:
    if not isinstance(value, int) or isinstance(value, bool):
        raise ConfigError(f"{path}: expected an integer, got {value!r}")
    return value


def _bool(value, path: str) -> bool:
    if not isinstance(value, bool):
        raise ConfigError(f"{path}: expected a boolean, got {value!r}")
    return value


def _str(value, path: str) -> str:
    if not isinstance(value, str):
        raise ConfigError(f"{path}: expected a string, got {value!r}")
    return value


def _pair(value, path: str) -> tuple[int, int]:
    if not isinstance(value, list) or len(value) != 2:
        raise ConfigError(f"{path}: expected a [lo, hi] pair")
    return _int(value[0], f"{path}[0]"), _int(value[1], f"{path}[1]")


def _parse_range(obj, path: str) -> HsvRange:
    _check_keys(obj, path, ("h", "s", "v"))
    h = _pair(obj["h"], f"{path}.h")
    s = _pair(obj["s"], f"{path}.s")
    v = _pair(obj["v"], f"{path}.v")
    try:
        return HsvRange(h[0], h[1], s[0], s[1], v[0], v[1])
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _parse_sequence(value, path: str) -> tuple[str, ...]:
    if not isinstance(value, list):
        raise ConfigError(f"{path}: expected a list of operation names")
    return tuple(_str(op, f"{path}[{i}]") for i, op in enumerate(value))


def _parse_morphology(obj, path: str) -> MorphologyConfig:
    _check_keys(obj, path, ("element", "sequence"))
    elem = obj["element"]
    _check_keys(elem, f"{path}.element", ("shape", "size"))
    return MorphologyConfig(
        shape=_str(elem["shape"], f"{path}.element.shape"),
        size=_int(elem["size"], f"{path}.element.size"),
        sequence=_parse_sequence(obj["sequence"], f"{path}.sequence"),
    )


def _parse_cleanup(obj, path: str) -> CleanupConfig:
    _check_keys(obj, path, ("enabled", "element", "sequence"))
    morph = _parse_morphology({"element": obj["element"], "sequence": obj["sequence"]}, path)
    return CleanupConfig(
        enabled=_bool(obj["enabled"], f"{path}.enabled"),
        shape=morph.shape,
        size=morph.size,
        sequence=morph.sequence,
    )


def _parse_category(obj, path: str) -> CategoryConfig:
    _check_keys(obj, path, ("name", "range", "morphology"))
    return CategoryConfig(
        name=_str(obj["name"], f"{path}.name"),
        hsv_range=_parse_range(obj["range"], f"{path}.range"),
        morphology=_parse_morphology(obj["morphology"], f"{path}.morphology"),
    )


def _parse_clustering(obj, path: str) -> ClusteringConfig:
    _check_keys(obj, path, ("k", "k_range", "iterations", "seed", "wilt_hue_band"))
    k = obj["k"]
    if k is not None:
        k = _int(k, f"{path}.k")
    return ClusteringConfig(
        k=k,
        k_range=_pair(obj["k_range"], f"{path}.k_range"),
        iterations=_int(obj["iterations"], f"{path}.iterations"),
        seed=_int(obj["seed"], f"{path}.seed"),
        wilt_hue_band=_parse_range(obj["wilt_hue_band"], f"{path}.wilt_hue_band"),
    )


def _parse_contours(obj, path: str) -> ContourConfig:
    _check_keys(obj, path, ("min_area", "max_area", "overlay_color", "overlay_thickness"))
    max_area = obj["max_area"]
    if max_area is not None:
        max_area = _int(max_area, f"{path}.max_area")
    color = obj["overlay_color"]
    if not isinstance(color, list) or len(color) != 3:
        raise ConfigError(f"{path}.overlay_color: expected [r, g, b]")
    return ContourConfig(
        min_area=_int(obj["min_area"], f"{path}.min_area"),
        max_area=max_area,
        overlay_color=tuple(_int(c, f"{path}.overlay_color[{i}]") for i, c in enumerate(color)),
        overlay_thickness=_int(obj["overlay_thickness"], f"{path}.overlay_thickness"),
    )


def _parse_output(obj, path: str) -> OutputConfig:
    _check_keys(obj, path, _EMITS)
    return OutputConfig(**{k: _bool(obj[k], f"{path}.{k}") for k in _EMITS})


def parse_config(text: str) -> PipelineConfig:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    _check_keys(
        doc,
        "config",
        (
            "categories",
            "residual_cleanup",
            "wilt_mask_cleanup",
            "clustering",
            "contours",
            "output",
        ),
    )
    if not isinstance(doc["categories"], list):
        raise ConfigError("config.categories: expected a list")
    try:
        return PipelineConfig(
            categories=tuple(
                _parse_category(c, f"config.categories[{i}]")
                for i, c in enumerate(doc["categories"])
            ),
            residual_cleanup=_parse_cleanup(doc["residual_cleanup"], "config.residual_cleanup"),
            wilt_mask_cleanup=_parse_cleanup(doc["wilt_mask_cleanup"], "config.wilt_mask_cleanup"),
            clustering=_parse_clustering(doc["clustering"], "config.clustering"),
            contours=_parse_contours(doc["contours"], "config.contours"),
            output=_parse_output(doc["output"], "config.output"),
        )
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def _range_dict(r: HsvRange) -> dict:
    return {"h": [r.h_lo, r.h_hi], "s": [r.s_lo, r.s_hi], "v": [r.v_lo, r.v_hi]}


def _morph_dict(m: MorphologyConfig) -> dict:
    return {
        "element": {"shape": m.shape, "size": m.size},
        "sequence": list(m.sequence),
    }


def serialize_config(cfg: PipelineConfig) -> str:
    doc = {
        "categories": [
            {
                "name": c.name,
                "range": _range_dict(c.hsv_range),
                "morphology": _morph_dict(c.morphology),
            }
            for c in cfg.categories
        ],
        "residual_cleanup": {"enabled": cfg.residual_cleanup.enabled, **_morph_dict(cfg.residual_cleanup)},
        "wilt_mask_cleanup": {"enabled": cfg.wilt_mask_cleanup.enabled, **_morph_dict(cfg.wilt_mask_cleanup)},
        "clustering": {
            "k": cfg.clustering.k,
            "k_range": list(cfg.clustering.k_range),
            "iterations": cfg.clustering.iterations,
            "seed": cfg.clustering.seed,
            "wilt_hue_band": _range_dict(cfg.clustering.wilt_hue_band),
        },
        "contours": {
            "min_area": cfg.contours.min_area,
            "max_area": cfg.contours.max_area,
            "overlay_color": list(cfg.contours.overlay_color),
            "overlay_thickness": cfg.contours.overlay_thickness,
        },
        "output": {k: getattr(cfg.output, k) for k in _EMITS},
    }
    return json.dumps(doc, indent=2) + "\n"


def load_config(path: str | Path) -> PipelineConfig:
    try:
        text = Path(path).read_text()
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    return parse_config(text)
