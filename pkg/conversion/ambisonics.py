"""
conversion/ambisonics.py
========================
First-order Ambisonics (FOA) rotation about the vertical axis and the
W ± Y stereo downmix.

Channel order is ACN (W, Y, Z, X) with SN3D normalization, the way the
source recordings are delivered. Buffers are (channels, samples) arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from conversion.geometry import Direction

W, Y, Z, X = 0, 1, 2, 3


@dataclass(frozen=True)
class FoaBuffer:
    data: NDArray[np.float64]    # shape (4, n_samples)
    sample_rate: int

    def __post_init__(self):
        if self.data.ndim != 2 or self.data.shape[0] != 4:
            raise ValueError(f"FOA data must have shape (4, n), got {self.data.shape}")
        if self.sample_rate <= 0:
            raise ValueError(f"sample_rate must be positive, got {self.sample_rate}")

    @property
    def num_samples(self) -> int:
        return self.data.shape[1]

    def slice(self, start: int, stop: int) -> "FoaBuffer":
        return FoaBuffer(self.data[:, start:stop], self.sample_rate)


@dataclass(frozen=True)
class StereoBuffer:
    left: NDArray[np.float64]
    right: NDArray[np.float64]
    sample_rate: int

    def __post_init__(self):
        if self.left.shape != self.right.shape:
            raise ValueError("left and right must have equal length")

    def as_array(self) -> NDArray[np.float64]:
        """(2, n) array in left, right order."""
        return np.stack([self.left, self.right])


def rotate_foa_yaw(foa: FoaBuffer, yaw: float) -> FoaBuffer:
    """
    Rotate the sound field so that the view direction `yaw` (degrees) becomes
    the front. A source at azimuth φ ends up at φ − yaw.
    """
    if yaw % 360.0 == 0.0:
        return FoaBuffer(foa.data.copy(), foa.sample_rate)

    alpha = math.radians(yaw)
    c, s = math.cos(alpha), math.sin(alpha)
    src = foa.data
    out = src.copy()
    out[X] = src[X] * c + src[Y] * s
    out[Y] = -src[X] * s + src[Y] * c
    return FoaBuffer(out, foa.sample_rate)


def foa_to_stereo(foa: FoaBuffer) -> StereoBuffer:
    """left = W + Y, right = W − Y (no loudness compensation)."""
    w = foa.data[W]
    y = foa.data[Y]
    return StereoBuffer(left=w + y, right=w - y, sample_rate=foa.sample_rate)


def encode_plane_wave(signal: NDArray, direction: Direction, sample_rate: int) -> FoaBuffer:
    """SN3D first-order encoding of a point source at `direction`."""
    s = np.asarray(signal, dtype=np.float64)
    az = math.radians(direction.azimuth)
    el = math.radians(direction.elevation)
    # cos(±π/2) is not exactly zero in floating point
    cos_el = 0.0 if abs(direction.elevation) == 90.0 else math.cos(el)
    data = np.empty((4, s.shape[0]), dtype=np.float64)
    data[W] = s
    data[Y] = s * math.sin(az) * cos_el
    data[Z] = s * math.sin(el)
    data[X] = s * math.cos(az) * cos_el
    return FoaBuffer(data, sample_rate)
