import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import dilate_reference, erode_reference
from wiltscan.image import BinaryMask
from wiltscan.morphology import (
    StructuringElement,
    apply_sequence,
    close_mask,
    dilate,
    erode,
    open_mask,
)


def _mask(seed, h, w, density=0.5):
    return BinaryMask(np.random.default_rng(seed).random((h, w)) < density)


def _elements():
    return [
        StructuringElement.square(3),
        StructuringElement.cross(3),
        StructuringElement.diamond(5),
    ]


class TestStructuringElement:
    def test_factories(self):
        sq = StructuringElement.square(3)
        assert sq.bits.all() and sq.shape == (3, 3) and sq.name == "square"
        cr = StructuringElement.cross(3)
        assert cr.bits.sum() == 5
        di = StructuringElement.diamond(5)
        assert di.bits.sum() == 13  # 1 + 3 + 5 + 3 + 1

    def test_rejects_even_and_empty(self):
        with pytest.raises(ValueError):
            StructuringElement(np.ones((2, 3), bool))
        with pytest.raises(ValueError):
            StructuringElement(np.zeros((3, 3), bool))
        with pytest.raises(ValueError):
            StructuringElement.square(4)
        with pytest.raises(ValueError):
            StructuringElement.square(0)

    def test_offsets_are_centered(self):
        se = StructuringElement.cross(3)
        off_y, off_x = se.offsets()
        assert sorted(zip(off_y.tolist(), off_x.tolist())) == [
            (-1, 0), (0, -1), (0, 0), (0, 1), (1, 0),
        ]

    def test_equality_is_by_bits(self):
        a = StructuringElement.square(3)
        b = StructuringElement(np.ones((3, 3), bool))
        assert a == b


class TestAgainstReference:
    @pytest.mark.parametrize("se_idx", [0, 1, 2])
    @pytest.mark.parametrize("seed", range(8))
    def test_erode_matches(self, seed, se_idx):
        se = _elements()[se_idx]
        m = _mask(seed, 13, 17, 0.6)
        expected = erode_reference(
            np.asarray(m.bits).tolist(), se.bits.tolist(), se.shape[0] // 2, se.shape[1] // 2
        )
        assert np.array_equal(np.asarray(erode(m, se).bits), np.array(expected))

    @pytest.mark.parametrize("se_idx", [0, 1, 2])
    @pytest.mark.parametrize("seed", range(8))
    def test_dilate_matches(self, seed, se_idx):
        se = _elements()[se_idx]
        m = _mask(seed, 13, 17, 0.4)
        expected = dilate_reference(
            np.asarray(m.bits).tolist(), se.bits.tolist(), se.shape[0] // 2, se.shape[1] // 2
        )
        assert np.array_equal(np.asarray(dilate(m, se).bits), np.array(expected))


class TestLaws:
    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(1, 24), st.integers(1, 24), st.sampled_from([0, 1, 2]))
    def test_open_close_idempotent(self, seed, h, w, se_idx):
        se = _elements()[se_idx]
        m = _mask(seed, h, w)
        opened = open_mask(m, se)
        assert open_mask(opened, se) == opened
        closed = close_mask(m, se)
        assert close_mask(closed, se) == closed

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(1, 24), st.integers(1, 24), st.sampled_from([0, 1, 2]))
    def test_extensivity(self, seed, h, w, se_idx):
        """Opening only removes pixels; closing only adds them."""
        se = _elements()[se_idx]
        m = _mask(seed, h, w)
        bits = np.asarray(m.bits)
        assert not np.any(np.asarray(open_mask(m, se).bits) & ~bits)
        assert not np.any(~np.asarray(close_mask(m, se).bits) & bits)

    def test_erode_all_true_eats_border(self):
        m = BinaryMask(np.ones((6, 7), bool))
        out = np.asarray(erode(m, StructuringElement.square(3)).bits)
        assert out[1:-1, 1:-1].all()
        assert not out[0].any() and not out[-1].any()
        assert not out[:, 0].any() and not out[:, -1].any()

    def test_open_all_true_restores_partial_border(self):
        """The eroded frame comes back everywhere except the extreme
        corners' missing coverage; compare against the reference."""
        m = BinaryMask(np.ones((8, 9), bool))
        se = StructuringElement.square(3)
        got = open_mask(m, se)
        bits = np.asarray(m.bits).tolist()
        ref = erode_reference(bits, se.bits.tolist(), 1, 1)
        ref = dilate_reference(ref, se.bits.tolist(), 1, 1)
        assert np.array_equal(np.asarray(got.bits), np.array(ref))

    def test_dilate_single_pixel(self):
        bits = np.zeros((5, 5), bool)
        bits[2, 2] = True
        out = np.asarray(dilate(BinaryMask(bits), StructuringElement.square(3)).bits)
        assert out[1:4, 1:4].all() and out.sum() == 9

    def test_empty_mask_fixed_points(self):
        m = BinaryMask(np.zeros((5, 5), bool))
        se = StructuringElement.diamond(3)
        assert erode(m, se) == m
        assert dilate(m, se) == m


class TestSequence:
    def test_named_chain(self):
        m = _mask(5, 10, 10)
        se = StructuringElement.square(3)
        assert apply_sequence(m, se, ("open", "close")) == close_mask(open_mask(m, se), se)
        assert apply_sequence(m, se, ()) == m

    def test_unknown_op(self):
        with pytest.raises(ValueError):
            apply_sequence(_mask(1, 4, 4), StructuringElement.square(3), ("blur",))
