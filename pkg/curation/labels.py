"""
curation/labels.py
==================
Spatiotemporal sound-event labels: loading the source metadata, projecting
label directions into a clip's perspective view, and exporting the
resulting per-frame positions as SELD reference records.

Source metadata layout (one row per active event per 100 ms label frame,
no header):
    frame_index, class_id, source_id, azimuth_deg, elevation_deg[, distance_cm]
The optional distance column is ignored.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import pandas as pd

from config.settings import CLASS_GROUPS, CLIP
from conversion.geometry import CameraSpec, Direction, PixelPos, ViewAngle, project_direction
from curation.windows import ClipWindow

log = logging.getLogger(__name__)

LABEL_COLUMNS = ["frame_index", "class_id", "source_id", "azimuth_deg", "elevation_deg"]


# ── Domain types ──────────────────────────────────────────────────────────────

@dataclass
class LabelEvent:
    """One (class, source) track; a frame is active iff it has a direction."""
    class_id: int
    source_id: int
    directions: Dict[int, Direction] = field(default_factory=dict)

    @property
    def key(self) -> Tuple[int, int]:
        return self.class_id, self.source_id


@dataclass
class AnnotationTrack:
    recording_id: str
    duration: float
    events: List[LabelEvent] = field(default_factory=list)
    label_fps: int = CLIP["label_fps"]


@dataclass(frozen=True)
class LabelPoint:
    frame: int                       # label frame relative to the window start
    class_id: int
    source_id: int
    group: Optional[str]             # curation group ("speech", ...) or None
    pixel: Optional[PixelPos]        # None when offscreen

    @property
    def onscreen(self) -> bool:
        return self.pixel is not None

    @property
    def normalized_x(self) -> Optional[float]:
        return None if self.pixel is None else self.pixel.normalized_x


@dataclass
class WindowLabels:
    """Projected labels of one clip window, active points only."""
    num_frames: int
    points: List[LabelPoint] = field(default_factory=list)

    def by_frame(self) -> Dict[int, List[LabelPoint]]:
        frames: Dict[int, List[LabelPoint]] = {}
        for p in self.points:
            frames.setdefault(p.frame, []).append(p)
        return frames


# ── Loading ───────────────────────────────────────────────────────────────────

def load_annotation_csv(path, recording_id: str = None, duration: float = None) -> AnnotationTrack:
    """
    Read a label CSV into an AnnotationTrack. An empty file gives a track
    with no events. Duration defaults to just past the last labelled frame.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"label file not found: {path}")

    recording_id = recording_id or path.stem
    if path.stat().st_size == 0:
        df = pd.DataFrame(columns=LABEL_COLUMNS)
    else:
        df = pd.read_csv(path, header=None)
        if df.shape[1] < len(LABEL_COLUMNS):
            raise ValueError(f"{path}: expected at least 5 columns, got {df.shape[1]}")
        df = df.iloc[:, : len(LABEL_COLUMNS)]
        df.columns = LABEL_COLUMNS

    return track_from_frame(df, recording_id, duration)


def track_from_frame(df: pd.DataFrame, recording_id: str, duration: float = None) -> AnnotationTrack:
    label_fps = CLIP["label_fps"]
    events: Dict[Tuple[int, int], LabelEvent] = {}

    for row in df.itertuples(index=False):
        key = (int(row.class_id), int(row.source_id))
        event = events.setdefault(key, LabelEvent(*key))
        event.directions[int(row.frame_index)] = Direction(
            float(row.azimuth_deg), float(row.elevation_deg)
        )

    if duration is None:
        last = int(df["frame_index"].max()) + 1 if len(df) else 0
        duration = last / label_fps

    log.debug(f"[{recording_id}] {len(df)} label rows → {len(events)} event tracks")
    return AnnotationTrack(
        recording_id=recording_id,
        duration=float(duration),
        events=sorted(events.values(), key=lambda e: e.key),
        label_fps=label_fps,
    )


# ── Projection into a clip window ─────────────────────────────────────────────

def window_frame_range(window: ClipWindow, label_fps: int) -> range:
    first = round(window.start * label_fps)
    return range(first, first + round(window.length * label_fps))


def transform_labels(
    track: AnnotationTrack,
    window: ClipWindow,
    camera: CameraSpec,
) -> WindowLabels:
    """Project every active label frame inside the window into the window's view."""
    if window.start < 0 or window.end > track.duration + 1e-9:
        raise ValueError(
            f"window [{window.start}, {window.end}] outside recording duration {track.duration}"
        )

    view = ViewAngle(window.yaw)
    frames = window_frame_range(window, track.label_fps)
    points = []
    for event in track.events:
        group = CLASS_GROUPS.get(event.class_id)
        for frame in frames:
            direction = event.directions.get(frame)
            if direction is None:
                continue
            points.append(LabelPoint(
                frame=frame - frames.start,
                class_id=event.class_id,
                source_id=event.source_id,
                group=group,
                pixel=project_direction(direction, camera, view),
            ))

    points.sort(key=lambda p: (p.frame, p.class_id, p.source_id))
    return WindowLabels(num_frames=len(frames), points=points)


def export_seld_labels(labels: WindowLabels, clip_id: str) -> List[dict]:
    """
    Reference records for SELD evaluation: one record per active onscreen
    target-group point, in the {clip_id, frame_index, class, activity, x} schema.
    """
    records = []
    for p in labels.points:
        if p.group is None or not p.onscreen:
            continue
        records.append({
            "clip_id":     clip_id,
            "frame_index": p.frame,
            "class":       p.group,
            "activity":    1.0,
            "x":           p.normalized_x,
        })
    return records
