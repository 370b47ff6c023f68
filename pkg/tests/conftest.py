"""Shared synthetic fixtures: plane-wave FOA, test-pattern equirect frames, label tracks."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import cv2
import numpy as np
import pytest

from cli.media_io import write_wav
from config.settings import OUTPUT_FILES
from conversion.ambisonics import encode_plane_wave
from conversion.audio_dsp import WaveBuffer
from conversion.geometry import CameraSpec, Direction, PixelPos
from curation.labels import AnnotationTrack, LabelEvent, LabelPoint, WindowLabels


@pytest.fixture
def camera() -> CameraSpec:
    return CameraSpec()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


def pattern_frame(width: int = 64, height: int = 32, shift: int = 0) -> np.ndarray:
    """RGB equirect test pattern: horizontal and vertical ramps plus a frame-dependent blue channel."""
    frame = np.zeros((height, width, 3), dtype=np.uint8)
    frame[..., 0] = (np.arange(width) * 255 // (width - 1))[None, :]
    frame[..., 1] = (np.arange(height) * 255 // (height - 1))[:, None]
    frame[..., 2] = (shift * 16) % 256
    return frame


def sine(freq: float, seconds: float, rate: int, amplitude: float = 1.0) -> np.ndarray:
    t = np.arange(round(seconds * rate)) / rate
    return amplitude * np.sin(2.0 * np.pi * freq * t)


def make_track(events, duration: float = 6.0, recording_id: str = "rec") -> AnnotationTrack:
    """events: iterable of (class_id, source_id, {frame: (azimuth, elevation)})."""
    built = []
    for class_id, source_id, frames in events:
        directions = {f: Direction(az, el) for f, (az, el) in frames.items()}
        built.append(LabelEvent(class_id, source_id, directions))
    return AnnotationTrack(recording_id=recording_id, duration=duration, events=built)


def make_labels(points, num_frames: int = 50) -> WindowLabels:
    """points: iterable of (frame, class_id, source_id, group, onscreen)."""
    built = [
        LabelPoint(frame, class_id, source_id, group, PixelPos(128.0, 72.0) if onscreen else None)
        for frame, class_id, source_id, group, onscreen in points
    ]
    return WindowLabels(num_frames=num_frames, points=built)


def write_frame_dir(frame_dir, frames: Sequence[np.ndarray], fps: float, t0: float = 0.0) -> Path:
    """Source-side frame directory: 000000.png, ... plus the timing sidecar."""
    frame_dir = Path(frame_dir)
    frame_dir.mkdir(parents=True, exist_ok=True)
    for i, frame in enumerate(frames):
        cv2.imwrite(str(frame_dir / f"{i:06d}.png"), cv2.cvtColor(frame, cv2.COLOR_RGB2BGR))
    (frame_dir / OUTPUT_FILES["timing"]).write_text(json.dumps({"fps": fps, "t0": t0}))
    return frame_dir


def save_embeddings_raw(path, matrix: np.ndarray) -> Path:
    """Raw little-endian float32 embeddings plus the {"n", "d"} sidecar."""
    path = Path(path)
    data = np.ascontiguousarray(matrix, dtype="<f4")
    data.tofile(path)
    path.with_name(path.name + ".json").write_text(json.dumps({"n": data.shape[0], "d": data.shape[1]}))
    return path


@dataclass
class SyntheticRecording:
    foa_wav: Path
    frame_dir: Path
    label_csv: Path


def build_recording(
    root: Path,
    name: str = "synthetic",
    seconds: float = 6.0,
    rate: int = 24000,
    azimuth: float = 0.0,
    amplitude: float = 0.004,
    labelled: bool = True,
) -> SyntheticRecording:
    """A plane-wave speech source at `azimuth` with matching labels and 8 fps frames."""
    signal = sine(440.0, seconds, rate, amplitude)
    foa = encode_plane_wave(signal, Direction(azimuth, 0.0), rate)
    foa_wav = write_wav(root / f"{name}.wav", WaveBuffer(foa.data, rate), subtype="FLOAT")

    fps = 8
    frames = [pattern_frame(shift=i) for i in range(round(seconds * fps))]
    frame_dir = write_frame_dir(root / "frames" / name, frames, fps=fps)

    label_csv = root / f"{name}.csv"
    if labelled:
        rows = [f"{k},0,0,{azimuth:g},0" for k in range(round(seconds * 10))]
        label_csv.write_text("\n".join(rows) + "\n")
    else:
        label_csv.write_text("")
    return SyntheticRecording(foa_wav=foa_wav, frame_dir=frame_dir, label_csv=label_csv)


@pytest.fixture
def synthetic_recording(tmp_path) -> SyntheticRecording:
    return build_recording(tmp_path / "inputs")
