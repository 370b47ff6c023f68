"""
curation/renderer.py
====================
Turns one clip window into dataset media: 16 kHz stereo audio and 4 fps
perspective frames padded to the square canvas.

Audio chain (dsp_order = stereo_first, the default):
    slice FOA → rotate to the view → W ± Y stereo → resample → high-pass → gain → clip check
With dsp_order = foa_first the resample / high-pass / gain steps run on the
four FOA channels before the downmix.

Video chain: for each output frame k, the source frame nearest in time to
start + k / fps is projected into the view and padded.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from numpy.typing import NDArray

from config.settings import AUDIO_DSP, CLIP
from conversion.ambisonics import FoaBuffer, foa_to_stereo, rotate_foa_yaw
from conversion.audio_dsp import WaveBuffer, apply_gain_db, highpass, is_clipping, resample
from conversion.geometry import (
    CameraSpec,
    SamplingGrid,
    ViewAngle,
    build_projection_map,
    pad_to_canvas,
    project_equirect_to_perspective,
)
from curation.curator import KEEP, RejectReason, Verdict
from curation.manifest import ClipRecord
from curation.windows import ClipWindow

log = logging.getLogger(__name__)

DSP_ORDERS = ("stereo_first", "foa_first")


@dataclass(frozen=True)
class DspSettings:
    gain_db: float = AUDIO_DSP["gain_db"]
    highpass: bool = True
    dsp_order: str = AUDIO_DSP["dsp_order"]
    target_rate: int = CLIP["audio_rate"]

    def __post_init__(self):
        if self.dsp_order not in DSP_ORDERS:
            raise ValueError(f"dsp_order must be one of {DSP_ORDERS}, got {self.dsp_order!r}")


@dataclass
class FrameSequence:
    """Time-stamped equirect frames; `fetch(i)` returns frame i as (H, W, 3) uint8."""
    times: NDArray[np.float64]
    fetch: Callable[[int], NDArray]

    @classmethod
    def from_arrays(cls, frames: Sequence[NDArray], fps: float, t0: float = 0.0) -> "FrameSequence":
        frames = list(frames)
        times = t0 + np.arange(len(frames), dtype=np.float64) / fps
        return cls(times=times, fetch=frames.__getitem__)

    def __len__(self) -> int:
        return len(self.times)

    def nearest_index(self, t: float) -> int:
        """Index of the frame closest to t; ties go to the earlier frame."""
        i = int(np.searchsorted(self.times, t))
        if i == 0:
            return 0
        if i >= len(self.times):
            return len(self.times) - 1
        return i - 1 if t - self.times[i - 1] <= self.times[i] - t else i

    def covers(self, t_first: float, t_last: float) -> bool:
        if len(self.times) == 0:
            return False
        half = 0.5 * float(np.median(np.diff(self.times))) if len(self.times) > 1 else 0.0
        return self.times[0] - half <= t_first + 1e-9 and self.times[-1] + half >= t_last - 1e-9


@dataclass
class RenderedClip:
    audio: WaveBuffer
    frames: List[NDArray]
    record: ClipRecord
    clipping: bool = False


@lru_cache(maxsize=64)
def _cached_grid(camera: CameraSpec, yaw: float, dims: Tuple[int, int]) -> SamplingGrid:
    return build_projection_map(camera, ViewAngle(yaw), dims)


def render_audio(foa: FoaBuffer, window: ClipWindow, dsp: DspSettings) -> WaveBuffer:
    rate = foa.sample_rate
    start = round(window.start * rate)
    stop = start + round(window.length * rate)
    if start < 0 or stop > foa.num_samples:
        raise ValueError(
            f"audio covers {foa.num_samples / rate:.2f} s, window needs [{window.start}, {window.end}]"
        )

    rotated = rotate_foa_yaw(foa.slice(start, stop), window.yaw)

    def condition(buf: WaveBuffer) -> WaveBuffer:
        buf = resample(buf, dsp.target_rate)
        if dsp.highpass:
            buf = highpass(buf)
        return apply_gain_db(buf, dsp.gain_db)

    if dsp.dsp_order == "stereo_first":
        stereo = foa_to_stereo(rotated)
        return condition(WaveBuffer(stereo.as_array(), stereo.sample_rate))

    conditioned = condition(WaveBuffer(rotated.data, rotated.sample_rate))
    stereo = foa_to_stereo(FoaBuffer(conditioned.data, conditioned.sample_rate))
    return WaveBuffer(stereo.as_array(), stereo.sample_rate)


def render_frames(frames: FrameSequence, window: ClipWindow, camera: CameraSpec) -> List[NDArray]:
    fps = CLIP["video_fps"]
    n_out = round(window.length * fps)
    targets = [window.start + k / fps for k in range(n_out)]
    if not frames.covers(targets[0], targets[-1]):
        raise ValueError(f"frames do not cover window [{window.start}, {window.end}]")

    rendered = []
    for t in targets:
        src = frames.fetch(frames.nearest_index(t))
        grid = _cached_grid(camera, float(window.yaw), (src.shape[1], src.shape[0]))
        rendered.append(pad_to_canvas(project_equirect_to_perspective(src, grid), camera))
    return rendered


def render_clip(
    foa: FoaBuffer,
    frames: FrameSequence,
    window: ClipWindow,
    camera: CameraSpec,
    record: Optional[ClipRecord] = None,
    dsp: DspSettings = DspSettings(),
) -> RenderedClip:
    """
    Render one window. A clipping result turns the record's verdict into
    Reject(clipping); frames are still returned so callers can inspect them.
    """
    if record is None:
        record = ClipRecord(recording_id="clip", window=window, verdict=KEEP)

    audio = render_audio(foa, window, dsp)
    video = render_frames(frames, window, camera)

    clipping = is_clipping(audio)
    if clipping:
        log.debug(f"[REJECT clipping] {record.clip_id} peak {np.max(np.abs(audio.data)):.3f}")
        record = replace(record, verdict=Verdict(RejectReason.CLIPPING))
    return RenderedClip(audio=audio, frames=video, record=record, clipping=clipping)
