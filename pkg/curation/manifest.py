"""
curation/manifest.py
====================
Clip records, the line-delimited manifest that lists them, and the
dataset statistics reported after a conversion run.

Manifest layout (JSON lines):
    line 1   {"type": "header", "tool_version": ..., "config_hash": ..., "config": {...}}
    line 2.. {"type": "clip", "clip_id": ..., "recording_id": ..., "window": {...},
              "verdict": "keep" | <reject reason>, "dominant_class": ...,
              "audio_path": ..., "frame_paths": [...], "projected_labels": [...]}

Records are written in canonical order (recording, start, yaw) so runs with
different worker counts produce byte-identical manifests.
"""

from __future__ import annotations

import json
import logging
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Tuple

from config.settings import CLIP, TOOL_VERSION
from curation.curator import RejectReason, Verdict
from curation.labels import WindowLabels
from curation.windows import ClipWindow

log = logging.getLogger(__name__)


@dataclass
class ClipRecord:
    recording_id: str
    window: ClipWindow
    verdict: Verdict
    dominant_class: Optional[str] = None
    projected_labels: List[dict] = field(default_factory=list)
    audio_path: Optional[str] = None
    frame_paths: List[str] = field(default_factory=list)

    @property
    def clip_id(self) -> str:
        return f"{self.recording_id}_{self.window.clip_id_suffix}"

    def sort_key(self) -> Tuple[str, float, float]:
        return self.recording_id, self.window.start, self.window.yaw

    def to_dict(self) -> dict:
        return {
            "type":             "clip",
            "clip_id":          self.clip_id,
            "recording_id":     self.recording_id,
            "window":           {"start": self.window.start, "yaw": self.window.yaw,
                                 "length": self.window.length},
            "verdict":          self.verdict.label,
            "dominant_class":   self.dominant_class,
            "audio_path":       self.audio_path,
            "frame_paths":      list(self.frame_paths),
            "projected_labels": list(self.projected_labels),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ClipRecord":
        w = d["window"]
        return cls(
            recording_id=d["recording_id"],
            window=ClipWindow(start=w["start"], yaw=w["yaw"], length=w.get("length", CLIP["length_s"])),
            verdict=Verdict.from_label(d["verdict"]),
            dominant_class=d.get("dominant_class"),
            projected_labels=list(d.get("projected_labels", [])),
            audio_path=d.get("audio_path"),
            frame_paths=list(d.get("frame_paths", [])),
        )


def projected_label_rows(labels: WindowLabels) -> List[dict]:
    """Manifest form of the projected labels (onscreen points only)."""
    rows = []
    for p in labels.points:
        if not p.onscreen:
            continue
        rows.append({
            "frame":        p.frame,
            "class":        p.group,
            "class_id":     p.class_id,
            "source_id":    p.source_id,
            "x":            p.pixel.x,
            "y":            p.pixel.y,
            "normalized_x": p.normalized_x,
        })
    return rows


# ── Manifest file ─────────────────────────────────────────────────────────────

@dataclass
class ManifestHeader:
    config_hash: str
    config: dict
    tool_version: str = TOOL_VERSION

    def to_dict(self) -> dict:
        return {
            "type":         "header",
            "tool_version": self.tool_version,
            "config_hash":  self.config_hash,
            "config":       self.config,
        }


def _dumps(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False)


def write_manifest(path, header: ManifestHeader, records: Iterable[ClipRecord]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    ordered = sorted(records, key=ClipRecord.sort_key)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(_dumps(header.to_dict()) + "\n")
        for record in ordered:
            fh.write(_dumps(record.to_dict()) + "\n")
    log.info(f"Manifest: {len(ordered)} records → {path}")
    return path


def read_manifest(path, expected_hash: str = None) -> Tuple[ManifestHeader, List[ClipRecord]]:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"manifest not found: {path}")

    with open(path, encoding="utf-8") as fh:
        lines = [line for line in fh.read().splitlines() if line.strip()]
    if not lines:
        raise ValueError(f"{path}: empty manifest")

    head = json.loads(lines[0])
    if head.get("type") != "header":
        raise ValueError(f"{path}: first line is not a manifest header")
    header = ManifestHeader(
        config_hash=head["config_hash"],
        config=head.get("config", {}),
        tool_version=head.get("tool_version", ""),
    )
    if expected_hash is not None and header.config_hash != expected_hash:
        raise ValueError(
            f"{path}: config hash {header.config_hash[:12]} does not match {expected_hash[:12]}"
        )

    records = []
    for lineno, line in enumerate(lines[1:], start=2):
        d = json.loads(line)
        if d.get("type") != "clip":
            raise ValueError(f"{path}:{lineno}: expected a clip record")
        records.append(ClipRecord.from_dict(d))
    return header, records


# ── Statistics ────────────────────────────────────────────────────────────────

@dataclass
class ManifestStats:
    total: int
    kept: int
    verdicts: Dict[str, int]
    kept_hours: float
    class_counts: Dict[str, int]
    speech_instrument_ratio: Optional[float]   # None when no instrument clips

    def to_dict(self) -> dict:
        return {
            "total":                   self.total,
            "kept":                    self.kept,
            "verdicts":                dict(self.verdicts),
            "kept_hours":              self.kept_hours,
            "class_counts":            dict(self.class_counts),
            "speech_instrument_ratio": self.speech_instrument_ratio,
        }


def manifest_stats(records: List[ClipRecord]) -> ManifestStats:
    verdicts = Counter({"keep": 0, **{r.value: 0 for r in RejectReason}})
    verdicts.update(r.verdict.label for r in records)

    kept = [r for r in records if r.verdict.kept]
    classes = Counter(r.dominant_class for r in kept if r.dominant_class)
    hours = sum(r.window.length for r in kept) / 3600.0
    instrument = classes.get("instrument", 0)
    ratio = classes.get("speech", 0) / instrument if instrument else None

    return ManifestStats(
        total=len(records),
        kept=len(kept),
        verdicts=dict(verdicts),
        kept_hours=hours,
        class_counts=dict(classes),
        speech_instrument_ratio=ratio,
    )


def print_summary(stats: ManifestStats, failures: List[str] = ()):
    ratio = "n/a" if stats.speech_instrument_ratio is None else f"{stats.speech_instrument_ratio:.2f}"
    print(f"\n{'='*55}")
    print(f"  DATASET SUMMARY")
    print(f"{'='*55}")
    print(f"  Candidate windows      : {stats.total}")
    print(f"  Kept clips             : {stats.kept}")
    print(f"  Kept duration          : {stats.kept_hours:.2f} hours")
    print(f"  Speech : instrument    : {ratio}")

    print(f"\n  Verdicts:")
    for label, count in stats.verdicts.items():
        print(f"    {label:<24} {count}")

    if stats.class_counts:
        print(f"\n  Kept clips by class:")
        for group, count in sorted(stats.class_counts.items()):
            print(f"    {group:<24} {count}")

    if failures:
        print(f"\n  Failed recordings:")
        for message in failures:
            print(f"    {message}")
    print(f"{'='*55}\n")
