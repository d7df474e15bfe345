import math

import numpy as np
import pytest

from memcrop.errors import DimensionMismatchError, InvalidArgumentError
from memcrop.frames import (
    CropRect,
    CropTrajectory,
    Frame,
    FrameSequence,
    clamp_rect,
    round_half_up,
    sample_frame_indices,
)


def test_sample_indices_standard_video():
    assert sample_frame_indices(90, 10) == [0, 10, 20, 30, 40, 50, 60, 70, 80]
    assert len(sample_frame_indices(90, 10)) == 9


def test_sample_indices_single_frame():
    assert sample_frame_indices(1, 10) == [0]


def test_sample_indices_partial_tail():
    assert sample_frame_indices(25, 10) == [0, 10, 20]


def test_sample_indices_offset():
    assert sample_frame_indices(90, 10, offset=9) == [9, 19, 29, 39, 49, 59, 69, 79, 89]


def test_sample_indices_invalid():
    with pytest.raises(InvalidArgumentError):
        sample_frame_indices(0, 10)
    with pytest.raises(InvalidArgumentError):
        sample_frame_indices(10, 0)
    with pytest.raises(InvalidArgumentError):
        sample_frame_indices(10, 1, offset=10)


def test_sample_indices_length_is_ceil():
    rng = np.random.default_rng(42)
    for _ in range(500):
        n = int(rng.integers(1, 500))
        s = int(rng.integers(1, 40))
        assert len(sample_frame_indices(n, s)) == math.ceil(n / s)


def test_round_half_up():
    assert round_half_up(0.5) == 1
    assert round_half_up(1.49) == 1
    assert round_half_up(-0.25) == 0
    assert round_half_up(-0.5) == 0
    assert round_half_up(39.5) == 40


def test_clamp_rect_centered():
    assert clamp_rect(50, 50, 40, 40, 100, 100) == CropRect(30, 30, 40, 40)


def test_clamp_rect_at_origin():
    assert clamp_rect(5, 5, 40, 40, 100, 100) == CropRect(0, 0, 40, 40)


def test_clamp_rect_full_frame():
    assert clamp_rect(50, 40, 100, 80, 100, 80) == CropRect(0, 0, 100, 80)


def test_clamp_rect_oversized_rejected():
    with pytest.raises(InvalidArgumentError):
        clamp_rect(50, 50, 101, 40, 100, 100)


def test_clamp_rect_idempotent():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        fw = int(rng.integers(1, 200))
        fh = int(rng.integers(1, 200))
        w = int(rng.integers(1, fw + 1))
        h = int(rng.integers(1, fh + 1))
        x = int(rng.integers(0, fw - w + 1))
        y = int(rng.integers(0, fh - h + 1))
        rect = CropRect(x, y, w, h)
        cx, cy = rect.center()
        again = clamp_rect(cx, cy, w, h, fw, fh)
        assert again == rect


def test_clamp_rect_always_in_frame():
    rng = np.random.default_rng(11)
    for _ in range(10_000):
        fw = int(rng.integers(1, 500))
        fh = int(rng.integers(1, 500))
        # sizes drawn so rounding stays within [1, frame]
        w = rng.uniform(0.6, max(0.6, fw - 0.5))
        h = rng.uniform(0.6, max(0.6, fh - 0.5))
        cx = rng.uniform(-fw, 2 * fw)
        cy = rng.uniform(-fh, 2 * fh)
        rect = clamp_rect(cx, cy, w, h, fw, fh)
        rect.validate_within(fw, fh)


def test_frame_validation():
    with pytest.raises(InvalidArgumentError):
        Frame(np.zeros((4, 4), dtype=np.uint8))
    with pytest.raises(InvalidArgumentError):
        Frame(np.zeros((4, 4, 3), dtype=np.float64))
    with pytest.raises(InvalidArgumentError):
        Frame(np.zeros((0, 4, 3), dtype=np.uint8))


def test_frame_is_read_only():
    frame = Frame(np.zeros((2, 2, 3), dtype=np.uint8))
    with pytest.raises(ValueError):
        frame.pixels[0, 0, 0] = 1


def test_frame_equality_compares_pixels():
    a = Frame(np.full((2, 3, 3), 7, dtype=np.uint8))
    b = Frame(np.full((2, 3, 3), 7, dtype=np.uint8))
    c = Frame(np.zeros((2, 3, 3), dtype=np.uint8))
    assert a == b
    assert a != c


def test_sequence_rejects_mixed_dims():
    a = Frame(np.zeros((2, 2, 3), dtype=np.uint8))
    b = Frame(np.zeros((3, 2, 3), dtype=np.uint8))
    with pytest.raises(DimensionMismatchError):
        FrameSequence("v", [a, b])
    with pytest.raises(InvalidArgumentError):
        FrameSequence("v", [])


def test_rect_validation():
    with pytest.raises(InvalidArgumentError):
        CropRect(0, 0, 0, 5)
    with pytest.raises(InvalidArgumentError):
        CropRect(0, 0, 1.5, 5)
    rect = CropRect(2, 3, 4, 5)
    rect.validate_within(10, 10)
    with pytest.raises(InvalidArgumentError):
        rect.validate_within(5, 10)


def test_trajectory_requires_increasing_indices():
    rect = CropRect(0, 0, 5, 5)
    with pytest.raises(InvalidArgumentError):
        CropTrajectory("v", 10, 10, ((0, rect), (0, rect)))
    with pytest.raises(InvalidArgumentError):
        CropTrajectory("v", 10, 10, ((5, rect), (3, rect)))


def test_trajectory_validates_rects_in_frame():
    with pytest.raises(InvalidArgumentError):
        CropTrajectory("v", 4, 4, ((0, CropRect(0, 0, 5, 5)),))
