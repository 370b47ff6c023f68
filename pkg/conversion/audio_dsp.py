"""
conversion/audio_dsp.py
=======================
Audio conditioning for the dataset clips and input features for the stereo
SELD model.

Conditioning chain (see curation/renderer.py for the order it runs in):
  resample → high-pass → gain → clipping check

All functions return new buffers; inputs are never modified.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction

import librosa
import numpy as np
from numpy.typing import NDArray
from scipy import signal

from config.settings import AUDIO_DSP, SELD_FEATURES

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class WaveBuffer:
    data: NDArray[np.float64]    # shape (channels, n_samples), nominal full scale ±1.0
    sample_rate: int

    def __post_init__(self):
        if self.data.ndim != 2:
            raise ValueError(f"wave data must be (channels, samples), got {self.data.shape}")
        if self.sample_rate <= 0:
            raise ValueError(f"sample_rate must be positive, got {self.sample_rate}")

    @property
    def num_channels(self) -> int:
        return self.data.shape[0]

    @property
    def num_samples(self) -> int:
        return self.data.shape[1]

    @property
    def duration(self) -> float:
        return self.num_samples / self.sample_rate


@dataclass(frozen=True)
class FeatureTensor:
    data: NDArray[np.float64]    # (frames, bins, 3): |L|, |R|, IPD
    frame_rate: float

    @property
    def num_frames(self) -> int:
        return self.data.shape[0]


def resample(buf: WaveBuffer, target_rate: int) -> WaveBuffer:
    """
    Polyphase windowed-sinc sample-rate conversion. The anti-alias filter is a
    Kaiser-windowed sinc cut at the lower of the two Nyquist frequencies.
    """
    if target_rate <= 0:
        raise ValueError(f"target_rate must be positive, got {target_rate}")
    if target_rate == buf.sample_rate:
        return WaveBuffer(buf.data.copy(), buf.sample_rate)

    ratio = Fraction(int(target_rate), int(buf.sample_rate))
    up, down = ratio.numerator, ratio.denominator
    max_rate = max(up, down)
    half_len = AUDIO_DSP["resample_half_taps"] * max_rate
    taps = signal.firwin(
        2 * half_len + 1,
        1.0 / max_rate,
        window=("kaiser", AUDIO_DSP["resample_kaiser_beta"]),
    )

    out = signal.resample_poly(buf.data.astype(np.float64), up, down, axis=-1, window=taps)
    n_out = (buf.num_samples * up) // down
    log.debug(f"resample {buf.sample_rate} → {target_rate} Hz ({up}/{down}, {taps.size} taps)")
    return WaveBuffer(out[:, :n_out], int(target_rate))


def highpass(
    buf: WaveBuffer,
    cutoff_hz: float = AUDIO_DSP["highpass_cutoff_hz"],
    order: int = AUDIO_DSP["highpass_order"],
) -> WaveBuffer:
    """Causal Butterworth high-pass, identical on every channel."""
    sos = signal.butter(order, cutoff_hz, btype="highpass", fs=buf.sample_rate, output="sos")
    return WaveBuffer(signal.sosfilt(sos, buf.data, axis=-1), buf.sample_rate)


def apply_gain_db(buf: WaveBuffer, gain_db: float) -> WaveBuffer:
    if not np.isfinite(gain_db):
        raise ValueError(f"gain must be finite, got {gain_db}")
    return WaveBuffer(buf.data * 10.0 ** (gain_db / 20.0), buf.sample_rate)


def is_clipping(buf: WaveBuffer, threshold: float = AUDIO_DSP["clip_threshold"]) -> bool:
    return bool(np.any(np.abs(buf.data) >= threshold))


def extract_seld_features(stereo: WaveBuffer) -> FeatureTensor:
    """
    Two amplitude spectrograms and the inter-channel phase difference,
    stacked as (frames, bins, 3). No centre padding: a 5 s clip gives
    floor((80000 − 512) / 160) + 1 frames.
    """
    if stereo.num_channels != 2:
        raise ValueError(f"SELD features need stereo input, got {stereo.num_channels} channels")
    if stereo.sample_rate != SELD_FEATURES["sample_rate"]:
        raise ValueError(
            f"SELD features expect {SELD_FEATURES['sample_rate']} Hz, got {stereo.sample_rate}"
        )

    n_fft = SELD_FEATURES["n_fft"]
    hop = SELD_FEATURES["hop_length"]
    spec = librosa.stft(
        stereo.data.astype(np.float64),
        n_fft=n_fft,
        hop_length=hop,
        win_length=n_fft,
        window=SELD_FEATURES["window"],
        center=False,
    )                                   # (2, bins, frames)
    left, right = spec[0].T, spec[1].T  # (frames, bins)

    ipd = np.angle(left * np.conj(right))
    ipd[ipd <= -np.pi] = np.pi          # keep the plane in (−π, π]

    features = np.stack([np.abs(left), np.abs(right), ipd], axis=-1)
    return FeatureTensor(features, stereo.sample_rate / hop)
