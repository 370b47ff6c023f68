"""
metrics/av_align.py
===================
Spatial AV-Align: a recall score for how often a sound event located by the
SELD model coincides horizontally with a detected object in the video.

For every audio frame k (10 fps) and every audio class whose activity clears
the threshold:
  - the SELD x becomes an interval [x − margin, x + margin], clamped to [0, 1],
    spanning the full canvas height
  - the closest video frame j = round_half_up(k · 4 / 10) is found, and the
    object boxes of frames j − adjacency .. j + adjacency are searched
  - any horizontal overlap (touching counts) with an object-class box → TP,
    otherwise FN

Objects that have no sound counterpart are never penalized; people who do
not speak are common in the footage.

    score = TP / (TP + FN)     (None when nothing was active)
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Tuple

from config.settings import ALIGN_DEFAULTS, CAMERA, CLIP
from metrics.records import RecordFormatError

log = logging.getLogger(__name__)


# ── Domain types ──────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class DetectionBox:
    cls: str
    x1: float
    y1: float
    x2: float
    y2: float
    score: float = 1.0

    def __post_init__(self):
        if not (self.x1 < self.x2 and self.y1 < self.y2):
            raise ValueError(f"degenerate box ({self.x1}, {self.y1}, {self.x2}, {self.y2})")


@dataclass
class DetectionTrack:
    num_frames: int
    boxes: Dict[int, List[DetectionBox]] = field(default_factory=dict)
    fps: int = CLIP["video_fps"]
    canvas_width: int = CAMERA["canvas_width"]
    canvas_height: int = CAMERA["canvas_height"]

    def add(self, frame: int, box: DetectionBox):
        if not (0 <= box.x1 and box.x2 <= self.canvas_width
                and 0 <= box.y1 and box.y2 <= self.canvas_height):
            raise ValueError(f"box outside the {self.canvas_width}x{self.canvas_height} canvas")
        self.boxes.setdefault(frame, []).append(box)
        self.num_frames = max(self.num_frames, frame + 1)


@dataclass(frozen=True)
class SeldEntry:
    activity: float
    x: Optional[float] = None

    def __post_init__(self):
        if not 0.0 <= self.activity <= 1.0:
            raise ValueError(f"activity {self.activity} outside [0, 1]")
        if self.x is not None and not 0.0 <= self.x <= 1.0:
            raise ValueError(f"x {self.x} outside [0, 1]")


@dataclass
class SeldTrack:
    num_frames: int
    entries: Dict[int, Dict[str, SeldEntry]] = field(default_factory=dict)
    fps: int = CLIP["label_fps"]

    def add(self, frame: int, cls: str, entry: SeldEntry):
        self.entries.setdefault(frame, {})[cls] = entry
        self.num_frames = max(self.num_frames, frame + 1)

    def get(self, frame: int, cls: str) -> Optional[SeldEntry]:
        return self.entries.get(frame, {}).get(cls)


@dataclass(frozen=True)
class AlignConfig:
    margin: float = ALIGN_DEFAULTS["margin"]
    activity_threshold: float = ALIGN_DEFAULTS["activity_threshold"]
    adjacency: int = ALIGN_DEFAULTS["adjacency"]
    audio_classes: Tuple[str, ...] = ALIGN_DEFAULTS["audio_classes"]
    object_classes: Tuple[str, ...] = ALIGN_DEFAULTS["object_classes"]

    def __post_init__(self):
        if not 0.0 <= self.margin <= 0.5:
            raise ValueError(f"margin must be in [0, 0.5], got {self.margin}")
        if self.adjacency < 0:
            raise ValueError(f"adjacency must be >= 0, got {self.adjacency}")
        object.__setattr__(self, "audio_classes", tuple(self.audio_classes))
        object.__setattr__(self, "object_classes", tuple(self.object_classes))


@dataclass(frozen=True)
class AlignResult:
    tp: int = 0
    fn_: int = 0

    @property
    def score(self) -> Optional[float]:
        total = self.tp + self.fn_
        return self.tp / total if total else None


# ── Metric ────────────────────────────────────────────────────────────────────

def nearest_video_frame(audio_frame: int, audio_fps: int, video_fps: int, num_video_frames: int) -> int:
    """Round-half-up of the audio frame time in video frames, clamped to the clip."""
    j = math.floor(Fraction(audio_frame * video_fps, audio_fps) + Fraction(1, 2))
    return min(max(j, 0), num_video_frames - 1)


def _overlaps(box: DetectionBox, lo_px: float, hi_px: float) -> bool:
    return box.x1 <= hi_px and box.x2 >= lo_px


def spatial_av_align(det: DetectionTrack, seld: SeldTrack, cfg: AlignConfig = None) -> AlignResult:
    cfg = cfg or AlignConfig()
    tp = fn_ = unplaced = 0
    width = det.canvas_width

    for k in range(seld.num_frames):
        for cls in cfg.audio_classes:
            entry = seld.get(k, cls)
            if entry is None or entry.activity < cfg.activity_threshold:
                continue
            if entry.x is None:
                # an active event with no position cannot be matched
                unplaced += 1
                fn_ += 1
                continue

            lo_px = max(entry.x - cfg.margin, 0.0) * width
            hi_px = min(entry.x + cfg.margin, 1.0) * width

            hit = False
            if det.num_frames > 0:
                j = nearest_video_frame(k, seld.fps, det.fps, det.num_frames)
                first = max(j - cfg.adjacency, 0)
                last = min(j + cfg.adjacency, det.num_frames - 1)
                hit = any(
                    _overlaps(box, lo_px, hi_px)
                    for f in range(first, last + 1)
                    for box in det.boxes.get(f, [])
                    if box.cls in cfg.object_classes
                )

            if hit:
                tp += 1
            else:
                fn_ += 1

    if unplaced:
        log.warning(f"{unplaced} active SELD frames have no position (counted as FN)")
    return AlignResult(tp=tp, fn_=fn_)


def pool_align(results: Iterable[AlignResult]) -> AlignResult:
    """Corpus score from summed TP and FN counts."""
    tp = fn_ = 0
    for r in results:
        tp += r.tp
        fn_ += r.fn_
    return AlignResult(tp=tp, fn_=fn_)


def mean_align(results: Iterable[AlignResult]) -> Optional[float]:
    """Per-clip mean of the defined scores; None when no clip has a score."""
    scores = [r.score for r in results if r.score is not None]
    return sum(scores) / len(scores) if scores else None


# ── Building tracks from records ──────────────────────────────────────────────

def detection_tracks_from_records(
    rows: List[Tuple[int, dict]],
    path: str = "<detections>",
    num_frames: int = None,
) -> Dict[str, DetectionTrack]:
    default_frames = num_frames or round(CLIP["length_s"] * CLIP["video_fps"])
    tracks: Dict[str, DetectionTrack] = {}
    for lineno, r in rows:
        track = tracks.setdefault(r["clip_id"], DetectionTrack(num_frames=default_frames))
        try:
            track.add(r["frame_index"], DetectionBox(
                r["class"], r["x1"], r["y1"], r["x2"], r["y2"], r["score"]
            ))
        except ValueError as e:
            raise RecordFormatError(path, lineno, str(e)) from None
    return tracks


def seld_tracks_from_records(
    rows: List[Tuple[int, dict]],
    path: str = "<seld>",
    num_frames: int = None,
) -> Dict[str, SeldTrack]:
    default_frames = num_frames or round(CLIP["length_s"] * CLIP["label_fps"])
    tracks: Dict[str, SeldTrack] = {}
    for lineno, r in rows:
        track = tracks.setdefault(r["clip_id"], SeldTrack(num_frames=default_frames))
        try:
            track.add(r["frame_index"], r["class"], SeldEntry(r["activity"], r["x"]))
        except ValueError as e:
            raise RecordFormatError(path, lineno, str(e)) from None
    return tracks


def align_corpus(
    detections: Dict[str, DetectionTrack],
    seld: Dict[str, SeldTrack],
    cfg: AlignConfig = None,
) -> Dict[str, AlignResult]:
    """Score every clip that has SELD output; clips without detections score all FN."""
    cfg = cfg or AlignConfig()
    results = {}
    for clip_id in sorted(seld):
        det = detections.get(clip_id)
        if det is None:
            log.warning(f"[{clip_id}] no detections — every active sound event counts as FN")
            det = DetectionTrack(num_frames=round(CLIP["length_s"] * CLIP["video_fps"]))
        results[clip_id] = spatial_av_align(det, seld[clip_id], cfg)

    orphans = sorted(set(detections) - set(seld))
    if orphans:
        log.warning(f"{len(orphans)} clips have detections but no SELD output (ignored)")
    return results
