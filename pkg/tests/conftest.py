import numpy as np
import pytest

from wiltscan.image import RasterImage
from wiltscan.synth import SceneSpec, generate_scene, place_blobs


@pytest.fixture
def rng():
    return np.random.default_rng(20260814)


@pytest.fixture
def random_rgb(rng):
    return RasterImage(rng.integers(0, 256, size=(48, 64, 3), dtype=np.uint8))


@pytest.fixture(scope="session")
def small_scene():
    """A 400x300 scene with two detectable blobs, shared across tests."""
    blobs = place_blobs(400, 300, 2, 35, seed=3)
    spec = SceneSpec(width=400, height=300, seed=11, wilt_blobs=blobs, min_blob_area=3000)
    img, truth = generate_scene(spec)
    return spec, img, truth


def random_mask(rng, height, width, density=0.5):
    return rng.random((height, width)) < density
