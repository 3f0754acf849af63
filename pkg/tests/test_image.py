import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wiltscan.errors import (
    CorruptDataError,
    InvalidColorspaceError,
    OutOfBoundsError,
    UnsupportedFormatError,
)
from wiltscan.image import (
    HSV,
    RGB,
    BinaryMask,
    RasterImage,
    load_image,
    mask_to_image,
    mask_to_rle,
    rle_to_mask,
    save_image,
)


class TestRasterImage:
    def test_shape_and_accessors(self, random_rgb):
        assert random_rgb.width == 64
        assert random_rgb.height == 48
        assert random_rgb.colorspace == RGB
        r, g, b = random_rgb.pixel_at(5, 7)
        assert (r, g, b) == tuple(random_rgb.pixels[7, 5])

    def test_pixels_are_read_only(self, random_rgb):
        with pytest.raises(ValueError):
            random_rgb.pixels[0, 0, 0] = 9

    @pytest.mark.parametrize("x,y", [(-1, 0), (0, -1), (64, 0), (0, 48)])
    def test_pixel_at_out_of_bounds(self, random_rgb, x, y):
        with pytest.raises(OutOfBoundsError):
            random_rgb.pixel_at(x, y)

    def test_rejects_bad_shapes(self):
        with pytest.raises(ValueError):
            RasterImage(np.zeros((4, 4), np.uint8))
        with pytest.raises(ValueError):
            RasterImage(np.zeros((4, 4, 4), np.uint8))
        with pytest.raises(ValueError):
            RasterImage(np.zeros((0, 4, 3), np.uint8))

    def test_rejects_unknown_colorspace(self):
        with pytest.raises(ValueError):
            RasterImage(np.zeros((2, 2, 3), np.uint8), "lab")

    def test_hsv_hue_cap(self):
        px = np.zeros((2, 2, 3), np.uint8)
        px[0, 0, 0] = 180
        with pytest.raises(ValueError):
            RasterImage(px, HSV)
        px[0, 0, 0] = 179
        assert RasterImage(px, HSV).pixel_at(0, 0) == (179, 0, 0)

    def test_equality_by_value(self, random_rgb):
        twin = RasterImage(np.asarray(random_rgb.pixels).copy())
        assert twin == random_rgb
        other = np.asarray(random_rgb.pixels).copy()
        other[0, 0, 0] ^= 1
        assert RasterImage(other) != random_rgb


class TestBinaryMask:
    def test_popcount_and_get(self):
        bits = np.zeros((3, 5), np.bool_)
        bits[1, 2] = True
        m = BinaryMask(bits)
        assert m.popcount() == 1
        assert m.get(2, 1) is True
        assert m.get(0, 0) is False

    def test_get_out_of_bounds(self):
        m = BinaryMask(np.zeros((3, 5), np.bool_))
        with pytest.raises(OutOfBoundsError):
            m.get(5, 0)

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            BinaryMask(np.zeros((0, 5), np.bool_))

    def test_mask_to_image(self):
        bits = np.zeros((2, 2), np.bool_)
        bits[0, 1] = True
        img = mask_to_image(BinaryMask(bits))
        assert img.pixel_at(1, 0) == (255, 255, 255)
        assert img.pixel_at(0, 0) == (0, 0, 0)


class TestPngIo:
    def test_round_trip_preserves_bytes(self, tmp_path, random_rgb):
        p = tmp_path / "img.png"
        save_image(random_rgb, p)
        assert load_image(p) == random_rgb
        # saving twice yields identical files
        p2 = tmp_path / "img2.png"
        save_image(random_rgb, p2)
        assert p.read_bytes() == p2.read_bytes()

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_image(tmp_path / "absent.png")

    def test_rejects_non_png(self, tmp_path):
        p = tmp_path / "fake.png"
        p.write_bytes(b"GIF89a" + bytes(40))
        with pytest.raises(UnsupportedFormatError):
            load_image(p)

    def test_rejects_16_bit(self, tmp_path):
        from PIL import Image

        p = tmp_path / "deep.png"
        Image.fromarray(np.zeros((4, 4), np.uint16)).save(p)
        with pytest.raises(UnsupportedFormatError):
            load_image(p)

    def test_rejects_palette_png(self, tmp_path):
        from PIL import Image

        p = tmp_path / "pal.png"
        Image.new("P", (4, 4)).save(p)
        with pytest.raises(UnsupportedFormatError):
            load_image(p)

    def test_truncated_png_is_corrupt(self, tmp_path, random_rgb):
        p = tmp_path / "img.png"
        save_image(random_rgb, p)
        data = p.read_bytes()
        (tmp_path / "cut.png").write_bytes(data[: len(data) // 2])
        with pytest.raises(CorruptDataError):
            load_image(tmp_path / "cut.png")

    def test_signature_only_is_corrupt(self, tmp_path):
        p = tmp_path / "stub.png"
        p.write_bytes(b"\x89PNG\r\n\x1a\n")
        with pytest.raises(CorruptDataError):
            load_image(p)

    def test_alpha_is_dropped(self, tmp_path):
        from PIL import Image

        rgba = np.zeros((3, 3, 4), np.uint8)
        rgba[..., 0] = 200
        rgba[..., 3] = 128
        p = tmp_path / "rgba.png"
        Image.fromarray(rgba, mode="RGBA").save(p)
        img = load_image(p)
        assert img.pixel_at(0, 0) == (200, 0, 0)

    def test_save_refuses_hsv(self, tmp_path):
        img = RasterImage(np.zeros((2, 2, 3), np.uint8), HSV)
        with pytest.raises(InvalidColorspaceError):
            save_image(img, tmp_path / "x.png")

    def test_ihdr_fields_checked_before_decode(self, tmp_path, random_rgb):
        p = tmp_path / "img.png"
        save_image(random_rgb, p)
        data = bytearray(p.read_bytes())
        assert data[12:16] == b"IHDR"
        bit_depth, color_type = struct.unpack(">BB", bytes(data[24:26]))
        assert bit_depth == 8 and color_type == 2


class TestRle:
    def test_known_encoding(self):
        bits = np.array([[False, True, True], [False, False, True]])
        assert mask_to_rle(BinaryMask(bits)) == [1, 2, 2, 1]

    def test_leading_true_gets_zero_run(self):
        bits = np.array([[True, False]])
        assert mask_to_rle(BinaryMask(bits)) == [0, 1, 1]

    def test_bad_total_rejected(self):
        with pytest.raises(ValueError):
            rle_to_mask([1, 2], 2, 2)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(1, 12), st.integers(1, 12))
    def test_round_trip(self, seed, h, w):
        bits = np.random.default_rng(seed).random((h, w)) < 0.5
        m = BinaryMask(bits)
        assert rle_to_mask(mask_to_rle(m), w, h) == m
