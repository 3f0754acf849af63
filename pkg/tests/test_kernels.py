"""Cross-backend equivalence: the numba loops and the vectorized NumPy
kernels must produce bit-identical outputs on identical inputs."""

import os
import subprocess
import sys

import numpy as np
import pytest

from wiltscan import kernels
from wiltscan.kernels import numpy_impl
from wiltscan.morphology import StructuringElement

numba_impl = pytest.importorskip(
    "wiltscan.kernels.numba_impl", reason="numba backend unavailable"
)


@pytest.fixture(scope="module")
def rng():
    return np.random.default_rng(1234)


def _offsets(se):
    off_y, off_x = se.offsets()
    return off_y, off_x, se.bits.shape[0], se.bits.shape[1]


class TestBitIdentity:
    def test_rgb_to_hsv(self, rng):
        rgb = rng.integers(0, 256, size=(64, 80, 3), dtype=np.uint8)
        assert np.array_equal(numpy_impl.rgb_to_hsv_u8(rgb), numba_impl.rgb_to_hsv_u8(rgb))

    def test_hsv_to_rgb(self, rng):
        hsv = np.stack(
            [
                rng.integers(0, 180, size=(64, 80), dtype=np.uint8),
                rng.integers(0, 256, size=(64, 80), dtype=np.uint8),
                rng.integers(0, 256, size=(64, 80), dtype=np.uint8),
            ],
            axis=2,
        )
        assert np.array_equal(numpy_impl.hsv_to_rgb_u8(hsv), numba_impl.hsv_to_rgb_u8(hsv))

    @pytest.mark.parametrize("shape", ["square", "cross", "diamond"])
    def test_erode_and_dilate(self, rng, shape):
        se = getattr(StructuringElement, shape)(5)
        oy, ox, sh, sw = _offsets(se)
        for _ in range(5):
            mask = rng.random((40, 33)) < 0.5
            assert np.array_equal(
                numpy_impl.erode(mask, oy, ox, sh, sw),
                numba_impl.erode(mask, oy, ox, sh, sw),
            )
            assert np.array_equal(
                numpy_impl.dilate(mask, oy, ox, sh, sw),
                numba_impl.dilate(mask, oy, ox, sh, sw),
            )

    def test_assign_labels(self, rng):
        feats = rng.random((5000, 3)).astype(np.float32)
        cents = rng.random((7, 3)).astype(np.float64)
        l_np, d_np = numpy_impl.assign_labels(feats, cents)
        l_nb, d_nb = numba_impl.assign_labels(feats, cents)
        assert np.array_equal(l_np, l_nb)
        # distances must agree to the bit, not just within tolerance
        assert np.array_equal(d_np, d_nb)

    def test_assign_labels_ties_break_low(self):
        feats = np.array([[0.5, 0.5, 0.5]], np.float32)
        cents = np.array([[0.4, 0.5, 0.5], [0.6, 0.5, 0.5]], np.float64)
        for impl in (numpy_impl, numba_impl):
            labels, _ = impl.assign_labels(feats, cents)
            assert labels[0] == 0

    def test_label_components(self, rng):
        for _ in range(5):
            mask = rng.random((48, 37)) < 0.4
            labels_np, n_np = numpy_impl.label_components(mask)
            labels_nb, n_nb = numba_impl.label_components(mask)
            assert n_np == n_nb
            assert np.array_equal(labels_np, labels_nb)

    def test_trace_boundary(self, rng):
        for _ in range(5):
            mask = rng.random((30, 30)) < 0.45
            labels, n = numpy_impl.label_components(mask)
            flat = labels.ravel()
            for target in range(1, n + 1):
                start = int(np.flatnonzero(flat == target)[0])
                sy, sx = divmod(start, 30)
                assert np.array_equal(
                    numpy_impl.trace_boundary(labels, target, sy, sx),
                    numba_impl.trace_boundary(labels, target, sy, sx),
                )


class TestDispatch:
    def test_active_backend_is_exported(self):
        assert kernels.BACKEND in ("numba", "numpy")
        expected = numba_impl if kernels.BACKEND == "numba" else numpy_impl
        assert kernels.rgb_to_hsv_u8 is expected.rgb_to_hsv_u8

    @pytest.mark.parametrize("requested", ["numpy", "numba"])
    def test_env_var_selects_backend(self, requested):
        code = (
            "from wiltscan import kernels; print(kernels.BACKEND)"
        )
        env = os.environ | {"WILTSCAN_KERNELS": requested}
        out = subprocess.run(
            [sys.executable, "-c", code], env=env, capture_output=True, text=True
        )
        assert out.returncode == 0, out.stderr
        assert out.stdout.strip() == requested

    def test_bad_env_var_rejected(self):
        code = "import wiltscan.kernels"
        env = os.environ | {"WILTSCAN_KERNELS": "cuda"}
        out = subprocess.run(
            [sys.executable, "-c", code], env=env, capture_output=True, text=True
        )
        assert out.returncode != 0
        assert "WILTSCAN_KERNELS" in out.stderr
