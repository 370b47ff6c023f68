"""
curation/curator.py
===================
Decides whether a clip window goes into the dataset.

Gates, checked in this order (first failure wins):
  1. off_target_class       — an active event outside the target classes
  2. offscreen              — an active target-class event outside the view
  3. overlap                — two or more sources active in one label frame
  4. insufficient_activity  — fewer than 80% of label frames active (< 4 s of 5 s)

A fifth reason, clipping, is assigned after rendering (curation/renderer.py)
because it depends on the amplified audio.

The rule engine is stateless per clip; ClipCurator only keeps counters for
the run summary.
"""

from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple

from config.settings import CURATION_DEFAULTS
from curation.labels import WindowLabels

log = logging.getLogger(__name__)


class RejectReason(str, Enum):
    OFF_TARGET_CLASS = "off_target_class"
    OFFSCREEN = "offscreen"
    OVERLAP = "overlap"
    INSUFFICIENT_ACTIVITY = "insufficient_activity"
    CLIPPING = "clipping"


@dataclass(frozen=True)
class Verdict:
    reason: Optional[RejectReason] = None

    @property
    def kept(self) -> bool:
        return self.reason is None

    @property
    def label(self) -> str:
        return "keep" if self.kept else self.reason.value

    @classmethod
    def from_label(cls, label: str) -> "Verdict":
        return cls() if label == "keep" else cls(RejectReason(label))


KEEP = Verdict()


@dataclass(frozen=True)
class CurationConfig:
    target_classes: Tuple[str, ...] = CURATION_DEFAULTS["target_classes"]
    activity_threshold: float = CURATION_DEFAULTS["activity_threshold"]
    allow_overlap: bool = CURATION_DEFAULTS["allow_overlap"]
    require_onscreen: bool = CURATION_DEFAULTS["require_onscreen"]
    time_step: float = CURATION_DEFAULTS["time_step"]
    yaw_step: float = CURATION_DEFAULTS["yaw_step"]

    def __post_init__(self):
        if not 0.0 < self.activity_threshold <= 1.0:
            raise ValueError(f"activity_threshold must be in (0, 1], got {self.activity_threshold}")
        object.__setattr__(self, "target_classes", tuple(self.target_classes))

    def required_active_frames(self, num_frames: int) -> int:
        return math.ceil(self.activity_threshold * num_frames - 1e-9)


# ─────────────────────────────────────────────────────────────────────────────
# RULE ENGINE
# ─────────────────────────────────────────────────────────────────────────────

class ClipCurator:
    def __init__(self, config: CurationConfig = None):
        self.config = config or CurationConfig()
        self.reason_count = Counter()   # verdict label → clips

    def check_target_classes(self, labels: WindowLabels) -> bool:
        """True if every active event belongs to a target class."""
        return all(p.group in self.config.target_classes for p in labels.points)

    def check_onscreen(self, labels: WindowLabels) -> bool:
        """True if every active target-class event is inside the view."""
        return all(
            p.onscreen for p in labels.points if p.group in self.config.target_classes
        )

    def check_overlap(self, labels: WindowLabels) -> bool:
        """True if no label frame has two or more distinct sources active."""
        for points in labels.by_frame().values():
            if len({(p.class_id, p.source_id) for p in points}) >= 2:
                return False
        return True

    def active_frames(self, labels: WindowLabels) -> int:
        return len({p.frame for p in labels.points})

    def check_activity(self, labels: WindowLabels) -> bool:
        required = self.config.required_active_frames(labels.num_frames)
        return self.active_frames(labels) >= required

    def curate(self, labels: WindowLabels) -> Verdict:
        """Run the gates for one clip window."""
        verdict = self._evaluate(labels)
        self.reason_count[verdict.label] += 1
        if not verdict.kept:
            log.debug(f"[REJECT {verdict.label}] {self.active_frames(labels)} active frames")
        return verdict

    def _evaluate(self, labels: WindowLabels) -> Verdict:
        # ── Gate 1: target classes only ───────────────────────────────────
        if not self.check_target_classes(labels):
            return Verdict(RejectReason.OFF_TARGET_CLASS)

        # ── Gate 2: onscreen ──────────────────────────────────────────────
        if self.config.require_onscreen and not self.check_onscreen(labels):
            return Verdict(RejectReason.OFFSCREEN)

        # ── Gate 3: single source ─────────────────────────────────────────
        if not self.config.allow_overlap and not self.check_overlap(labels):
            return Verdict(RejectReason.OVERLAP)

        # ── Gate 4: enough sound ──────────────────────────────────────────
        if not self.check_activity(labels):
            return Verdict(RejectReason.INSUFFICIENT_ACTIVITY)

        return KEEP


def curate(labels: WindowLabels, config: CurationConfig = None) -> Verdict:
    return ClipCurator(config)._evaluate(labels)


def dominant_class(labels: WindowLabels, config: CurationConfig = None) -> Optional[str]:
    """Target group with the most active label frames; ties go to the earlier target class."""
    config = config or CurationConfig()
    counts = Counter(p.group for p in labels.points if p.group in config.target_classes)
    if not counts:
        return None
    return max(config.target_classes, key=lambda g: (counts.get(g, 0), -config.target_classes.index(g)))
