import json

import pytest

from wiltscan.config import (
    CategoryConfig,
    CleanupConfig,
    ClusteringConfig,
    ContourConfig,
    MorphologyConfig,
    OutputConfig,
    PipelineConfig,
    default_config,
    load_config,
    parse_config,
    serialize_config,
)
from wiltscan.errors import ConfigError
from wiltscan.morphology import StructuringElement
from wiltscan.segmentation import HsvRange


def _doc():
    return json.loads(serialize_config(default_config()))


def _parse(doc):
    return parse_config(json.dumps(doc))


class TestRoundTrip:
    def test_defaults(self):
        cfg = default_config()
        assert parse_config(serialize_config(cfg)) == cfg

    def test_customized(self):
        cfg = PipelineConfig(
            categories=(
                CategoryConfig(
                    "healthy",
                    HsvRange(30, 65, 59, 255, 43, 255),
                    MorphologyConfig("diamond", 5, ("open",)),
                ),
            ),
            residual_cleanup=CleanupConfig(enabled=True, shape="cross", size=3),
            wilt_mask_cleanup=CleanupConfig(sequence=("close", "open", "dilate")),
            clustering=ClusteringConfig(k=7, k_range=(2, 12), iterations=9, seed=99),
            contours=ContourConfig(min_area=500, max_area=90_000, overlay_color=(0, 255, 0), overlay_thickness=1),
            output=OutputConfig(masks=True, frames=True, overlay=False, report=True),
        )
        assert parse_config(serialize_config(cfg)) == cfg

    def test_serialized_form_is_json_with_trailing_newline(self):
        text = serialize_config(default_config())
        assert text.endswith("\n")
        json.loads(text)

    def test_default_config_contents(self):
        cfg = default_config()
        assert [c.name for c in cfg.categories] == ["healthy", "ground", "packing"]
        assert cfg.clustering.k is None
        assert cfg.clustering.k_range == (2, 20)
        assert cfg.contours.min_area == 10_000
        assert not cfg.residual_cleanup.enabled
        assert cfg.wilt_mask_cleanup.sequence == ("close", "open")

    def test_profiles_build_structuring_elements(self):
        profiles = default_config().profiles()
        assert [p.name for p in profiles] == ["healthy", "ground", "packing"]
        assert profiles[0].element == StructuringElement.square(3)


class TestStrictParsing:
    def test_invalid_json(self):
        with pytest.raises(ConfigError, match="not valid JSON"):
            parse_config("{nope")

    def test_top_level_not_object(self):
        with pytest.raises(ConfigError, match="expected an object"):
            parse_config("[1, 2]")

    @pytest.mark.parametrize(
        "mutate, fragment",
        [
            (lambda d: d.update(extra=1), "unknown keys"),
            (lambda d: d.pop("clustering"), "missing keys"),
            (lambda d: d["categories"][0].update(bogus=1), "unknown keys"),
            (lambda d: d["categories"][0].pop("range"), "missing keys"),
            (lambda d: d["clustering"].update(gamma=2), "unknown keys"),
            (lambda d: d["contours"].pop("min_area"), "missing keys"),
            (lambda d: d["output"].update(histogram=True), "unknown keys"),
            (lambda d: d["residual_cleanup"].pop("enabled"), "missing keys"),
        ],
    )
    def test_key_discipline(self, mutate, fragment):
        doc = _doc()
        mutate(doc)
        with pytest.raises(ConfigError, match=fragment):
            _parse(doc)

    @pytest.mark.parametrize(
        "mutate, fragment",
        [
            (lambda d: d["clustering"].update(seed="abc"), "expected an integer"),
            (lambda d: d["clustering"].update(iterations=True), "expected an integer"),
            (lambda d: d["output"].update(overlay=1), "expected a boolean"),
            (lambda d: d["categories"][0].update(name=3), "expected a string"),
            (lambda d: d["clustering"].update(k_range=[2]), "pair"),
            (lambda d: d["categories"][0]["range"].update(h=[1, 2, 3]), "pair"),
            (lambda d: d["contours"].update(overlay_color=[1, 2]), r"\[r, g, b\]"),
            (lambda d: d.update(categories={}), "expected a list"),
        ],
    )
    def test_type_discipline(self, mutate, fragment):
        doc = _doc()
        mutate(doc)
        with pytest.raises(ConfigError, match=fragment):
            _parse(doc)

    @pytest.mark.parametrize(
        "mutate",
        [
            lambda d: d["categories"][0]["morphology"]["element"].update(size=4),
            lambda d: d["categories"][0]["morphology"]["element"].update(shape="blob"),
            lambda d: d["categories"][0]["morphology"].update(sequence=["smooth"]),
            lambda d: d["clustering"].update(k=0),
            lambda d: d["clustering"].update(k_range=[9, 2]),
            lambda d: d["clustering"].update(iterations=0),
            lambda d: d["contours"].update(min_area=0),
            lambda d: d["contours"].update(min_area=10, max_area=5),
            lambda d: d["contours"].update(overlay_color=[0, 0, 300]),
            lambda d: d["contours"].update(overlay_thickness=0),
            lambda d: d["categories"][0]["range"].update(h=[65, 30]),
        ],
    )
    def test_value_discipline(self, mutate):
        doc = _doc()
        mutate(doc)
        with pytest.raises(ConfigError):
            _parse(doc)

    def test_duplicate_category_names(self):
        doc = _doc()
        doc["categories"].append(dict(doc["categories"][0]))
        with pytest.raises(ConfigError, match="unique"):
            _parse(doc)

    def test_nullable_fields_accept_null(self):
        doc = _doc()
        assert doc["clustering"]["k"] is None
        assert doc["contours"]["max_area"] is None
        cfg = _parse(doc)
        assert cfg.clustering.k is None
        assert cfg.contours.max_area is None


class TestDirectConstruction:
    def test_morphology_validation(self):
        with pytest.raises(ConfigError):
            MorphologyConfig(shape="hex")
        with pytest.raises(ConfigError):
            MorphologyConfig(size=2)
        with pytest.raises(ConfigError):
            MorphologyConfig(sequence=("blur",))

    def test_category_needs_name(self):
        with pytest.raises(ConfigError):
            CategoryConfig("", HsvRange(0, 1, 0, 1, 0, 1))


class TestLoadConfig:
    def test_reads_file(self, tmp_path):
        p = tmp_path / "cfg.json"
        p.write_text(serialize_config(default_config()))
        assert load_config(p) == default_config()

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="not found"):
            load_config(tmp_path / "absent.json")
