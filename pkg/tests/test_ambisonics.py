"""Tests for conversion.ambisonics."""

from __future__ import annotations

import numpy as np
import pytest

from conftest import sine
from conversion.ambisonics import (
    W,
    X,
    Y,
    Z,
    FoaBuffer,
    encode_plane_wave,
    foa_to_stereo,
    rotate_foa_yaw,
)
from conversion.geometry import Direction


def rms(x: np.ndarray) -> float:
    return float(np.sqrt(np.mean(x ** 2)))


@pytest.fixture
def tone() -> np.ndarray:
    return sine(440.0, 0.1, 16000)


class TestFoaBuffer:
    def test_requires_four_channels(self) -> None:
        with pytest.raises(ValueError):
            FoaBuffer(np.zeros((2, 10)), 16000)

    def test_slice(self) -> None:
        buf = FoaBuffer(np.arange(40, dtype=np.float64).reshape(4, 10), 16000)
        assert buf.slice(2, 5).num_samples == 3


class TestEncodePlaneWave:
    def test_front_source(self, tone) -> None:
        foa = encode_plane_wave(tone, Direction(0.0, 0.0), 16000)
        np.testing.assert_allclose(foa.data[X], tone)
        np.testing.assert_allclose(foa.data[Y], 0.0, atol=1e-15)
        np.testing.assert_allclose(foa.data[Z], 0.0, atol=1e-15)

    def test_zenith_has_no_horizontal_component(self, tone) -> None:
        foa = encode_plane_wave(tone, Direction(30.0, 90.0), 16000)
        assert np.all(foa.data[X] == 0.0)
        assert np.all(foa.data[Y] == 0.0)


class TestRotateFoaYaw:
    def test_zero_yaw_is_identity(self, rng) -> None:
        foa = FoaBuffer(rng.standard_normal((4, 256)), 16000)
        assert np.array_equal(rotate_foa_yaw(foa, 0.0).data, foa.data)
        assert np.array_equal(rotate_foa_yaw(foa, 360.0).data, foa.data)

    def test_w_and_z_unchanged(self, rng) -> None:
        foa = FoaBuffer(rng.standard_normal((4, 256)), 16000)
        out = rotate_foa_yaw(foa, 37.0)
        assert np.array_equal(out.data[W], foa.data[W])
        assert np.array_equal(out.data[Z], foa.data[Z])

    def test_horizontal_energy_preserved(self, rng) -> None:
        foa = FoaBuffer(rng.standard_normal((4, 256)), 16000)
        out = rotate_foa_yaw(foa, 123.0)
        before = foa.data[X] ** 2 + foa.data[Y] ** 2
        after = out.data[X] ** 2 + out.data[Y] ** 2
        np.testing.assert_allclose(after, before, rtol=1e-12)

    def test_view_direction_becomes_front(self, tone) -> None:
        foa = encode_plane_wave(tone, Direction(90.0, 0.0), 16000)
        out = rotate_foa_yaw(foa, 90.0)
        np.testing.assert_allclose(out.data[X], tone, atol=1e-12)
        np.testing.assert_allclose(out.data[Y], 0.0, atol=1e-12)

    def test_input_untouched(self, rng) -> None:
        data = rng.standard_normal((4, 64))
        foa = FoaBuffer(data.copy(), 16000)
        rotate_foa_yaw(foa, 45.0)
        assert np.array_equal(foa.data, data)


class TestStereoDownmix:
    def test_w_plus_minus_y(self, rng) -> None:
        foa = FoaBuffer(rng.standard_normal((4, 64)), 16000)
        stereo = foa_to_stereo(foa)
        np.testing.assert_array_equal(stereo.left, foa.data[W] + foa.data[Y])
        np.testing.assert_array_equal(stereo.right, foa.data[W] - foa.data[Y])
        assert stereo.as_array().shape == (2, 64)

    def test_rotated_source_is_centred(self, tone, rng) -> None:
        for az in rng.uniform(-180.0, 180.0, size=100):
            foa = encode_plane_wave(tone, Direction(float(az), 0.0), 16000)
            stereo = foa_to_stereo(rotate_foa_yaw(foa, float(az)))
            assert rms(stereo.left - stereo.right) / rms(stereo.left + stereo.right) < 1e-6

    def test_left_right_ordering(self, tone, rng) -> None:
        for rel in rng.uniform(5.0, 85.0, size=50):
            yaw = float(rng.uniform(0.0, 360.0))
            left_src = encode_plane_wave(tone, Direction(yaw + rel, 0.0), 16000)
            right_src = encode_plane_wave(tone, Direction(yaw - rel, 0.0), 16000)
            a = foa_to_stereo(rotate_foa_yaw(left_src, yaw))
            b = foa_to_stereo(rotate_foa_yaw(right_src, yaw))
            assert rms(a.left) > rms(a.right)
            assert rms(b.right) > rms(b.left)
