"""
cli/media_io.py
===============
Reading and writing the media files around the pipeline.

Inputs
  FOA WAV      4-channel ambisonics (ACN/SN3D), any rate, read as float64
  frame dir    equirectangular frames as image files plus a timing.json
               sidecar: {"fps": 29.97, "t0": 0.0} or {"times": [0.0, 0.033, ...]}

Frames are decoded from the video beforehand, e.g.

    ffmpeg -i recording.mp4 -vsync 0 frames/recording/%06d.png

and read lazily, so a long recording never sits in memory in full.

Outputs
  stereo WAV   16-bit PCM
  PNG frames   one file per 4 fps frame, NNN.png
"""

from __future__ import annotations

import json
import logging
from functools import lru_cache
from pathlib import Path
from typing import List, Sequence

import cv2
import numpy as np
import soundfile as sf
from numpy.typing import NDArray

from config.settings import OUTPUT_FILES
from conversion.ambisonics import FoaBuffer
from conversion.audio_dsp import WaveBuffer
from curation.renderer import FrameSequence

log = logging.getLogger(__name__)

EXTRACT_COMMAND = "ffmpeg -i {video} -vsync 0 {frame_dir}/%06d.png"
IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg")


# ── Audio ─────────────────────────────────────────────────────────────────────

def read_wav(path) -> WaveBuffer:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"WAV file not found: {path}")
    data, rate = sf.read(str(path), dtype="float64", always_2d=True)
    return WaveBuffer(data=data.T.copy(), sample_rate=int(rate))


def read_foa_wav(path) -> FoaBuffer:
    wave = read_wav(path)
    if wave.num_channels != 4:
        raise ValueError(f"{path}: expected 4 FOA channels, got {wave.num_channels}")
    log.debug(f"FOA {path}: {wave.duration:.2f} s at {wave.sample_rate} Hz")
    return FoaBuffer(data=wave.data, sample_rate=wave.sample_rate)


def write_wav(path, wave: WaveBuffer, subtype: str = "PCM_16") -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    sf.write(str(path), wave.data.T, wave.sample_rate, subtype=subtype)
    return path


def write_stereo_wav(path, wave: WaveBuffer) -> Path:
    if wave.num_channels != 2:
        raise ValueError(f"expected stereo audio, got {wave.num_channels} channels")
    return write_wav(path, wave)


# ── Frames ────────────────────────────────────────────────────────────────────

def _frame_times(timing: dict, count: int) -> NDArray[np.float64]:
    if "times" in timing:
        times = np.asarray(timing["times"], dtype=np.float64)
        if len(times) != count:
            raise ValueError(f"timing.json lists {len(times)} times for {count} frames")
        if np.any(np.diff(times) <= 0):
            raise ValueError("timing.json times must be strictly increasing")
        return times
    fps = float(timing["fps"])
    if fps <= 0:
        raise ValueError(f"timing.json fps must be positive, got {fps}")
    return float(timing.get("t0", 0.0)) + np.arange(count, dtype=np.float64) / fps


def read_frame_dir(frame_dir) -> FrameSequence:
    frame_dir = Path(frame_dir)
    if not frame_dir.is_dir():
        raise FileNotFoundError(f"frame directory not found: {frame_dir}")
    timing_path = frame_dir / OUTPUT_FILES["timing"]
    if not timing_path.is_file():
        raise FileNotFoundError(f"missing {timing_path}")

    files = sorted(p for p in frame_dir.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES)
    if not files:
        hint = EXTRACT_COMMAND.format(video="<video>", frame_dir=frame_dir)
        raise ValueError(f"{frame_dir}: no frame images (extract them with: {hint})")
    times = _frame_times(json.loads(timing_path.read_text()), len(files))

    @lru_cache(maxsize=8)
    def fetch(i: int) -> NDArray:
        image = cv2.imread(str(files[i]), cv2.IMREAD_COLOR)
        if image is None:
            raise ValueError(f"cannot decode frame {files[i]}")
        return cv2.cvtColor(image, cv2.COLOR_BGR2RGB)

    log.debug(f"Frames {frame_dir}: {len(files)} images, {times[0]:.2f}–{times[-1]:.2f} s")
    return FrameSequence(times=times, fetch=fetch)


def write_frames(frame_dir, frames: Sequence[NDArray]) -> List[Path]:
    """Write RGB frames as 000.png, 001.png, ..."""
    frame_dir = Path(frame_dir)
    frame_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for k, frame in enumerate(frames):
        path = frame_dir / f"{k:03d}.png"
        if not cv2.imwrite(str(path), cv2.cvtColor(frame, cv2.COLOR_RGB2BGR)):
            raise OSError(f"failed to write {path}")
        paths.append(path)
    return paths
