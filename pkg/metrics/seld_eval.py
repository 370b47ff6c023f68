"""
metrics/seld_eval.py
====================
Frame-level evaluation of stereo SELD output against reference labels.

  seld_fscore       per-class F-score of thresholded activity
  seld_masked_mse   squared error of the horizontal position, counted only
                    on frames where the reference is active
  seld_activity_bce binary cross-entropy of the activity output

Predictions and references are both SeldTrack objects (see metrics/av_align.py);
a reference entry with activity 1.0 marks an active frame.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, Optional, Sequence

import numpy as np

from config.settings import ALIGN_DEFAULTS, SELD_EVAL
from metrics.av_align import SeldTrack

log = logging.getLogger(__name__)

DEFAULT_CLASSES = ALIGN_DEFAULTS["audio_classes"]


def _check_frames(pred: SeldTrack, labels: SeldTrack):
    if pred.num_frames != labels.num_frames:
        raise ValueError(
            f"frame count mismatch: prediction has {pred.num_frames}, labels have {labels.num_frames}"
        )


def _active(track: SeldTrack, frame: int, cls: str, threshold: float) -> bool:
    entry = track.get(frame, cls)
    return entry is not None and entry.activity >= threshold


def seld_counts(
    pred: SeldTrack,
    labels: SeldTrack,
    threshold: float = SELD_EVAL["threshold"],
    classes: Sequence[str] = DEFAULT_CLASSES,
) -> Dict[str, Dict[str, int]]:
    """Per-class frame-level tp / fp / fn counts."""
    _check_frames(pred, labels)
    counts = {}
    for cls in classes:
        tp = fp = fn = 0
        for k in range(labels.num_frames):
            p = _active(pred, k, cls, threshold)
            r = _active(labels, k, cls, 0.5)
            tp += p and r
            fp += p and not r
            fn += r and not p
        counts[cls] = {"tp": tp, "fp": fp, "fn": fn}
    return counts


def fscore_from_counts(tp: int, fp: int, fn: int) -> Optional[float]:
    """2PR / (P + R) written as 2TP / (2TP + FP + FN); None when nothing is active anywhere."""
    denom = 2 * tp + fp + fn
    return 2 * tp / denom if denom else None


def seld_fscore(
    pred: SeldTrack,
    labels: SeldTrack,
    threshold: float = SELD_EVAL["threshold"],
    classes: Sequence[str] = DEFAULT_CLASSES,
) -> Dict[str, Optional[float]]:
    counts = seld_counts(pred, labels, threshold, classes)
    return {cls: fscore_from_counts(**c) for cls, c in counts.items()}


def masked_sq_errors(
    pred: SeldTrack,
    labels: SeldTrack,
    classes: Sequence[str] = DEFAULT_CLASSES,
) -> list:
    """Squared x errors on label-active (frame, class) pairs that have a predicted x."""
    _check_frames(pred, labels)
    errors = []
    missing = 0
    for k in range(labels.num_frames):
        for cls in classes:
            ref = labels.get(k, cls)
            if ref is None or ref.activity < 0.5 or ref.x is None:
                continue
            est = pred.get(k, cls)
            if est is None or est.x is None:
                missing += 1
                continue
            errors.append((est.x - ref.x) ** 2)
    if missing:
        log.warning(f"{missing} active reference frames have no predicted position (skipped)")
    return errors


def seld_masked_mse(
    pred: SeldTrack,
    labels: SeldTrack,
    classes: Sequence[str] = DEFAULT_CLASSES,
) -> Optional[float]:
    errors = masked_sq_errors(pred, labels, classes)
    return float(np.mean(errors)) if errors else None


def seld_activity_bce(
    pred: SeldTrack,
    labels: SeldTrack,
    classes: Sequence[str] = DEFAULT_CLASSES,
) -> Optional[float]:
    """Mean BCE over every (frame, class) pair; missing entries mean activity 0."""
    _check_frames(pred, labels)
    eps = SELD_EVAL["bce_epsilon"]
    n = labels.num_frames * len(classes)
    if n == 0:
        return None

    p = np.zeros(n)
    y = np.zeros(n)
    i = 0
    for k in range(labels.num_frames):
        for cls in classes:
            est = pred.get(k, cls)
            ref = labels.get(k, cls)
            p[i] = est.activity if est else 0.0
            y[i] = ref.activity if ref else 0.0
            i += 1

    p = np.clip(p, eps, 1.0 - eps)
    return float(np.mean(-(y * np.log(p) + (1.0 - y) * np.log(1.0 - p))))


# ── Corpus evaluation ─────────────────────────────────────────────────────────

@dataclass
class SeldReport:
    fscores: Dict[str, Optional[float]]
    masked_mse: Optional[float]
    activity_bce: Optional[float]
    clips: int = 0


def evaluate_corpus(
    preds: Dict[str, SeldTrack],
    labels: Dict[str, SeldTrack],
    threshold: float = SELD_EVAL["threshold"],
    classes: Sequence[str] = DEFAULT_CLASSES,
) -> SeldReport:
    """
    Pool counts, squared errors and cross-entropy terms over every clip.
    A clip present on one side only is scored against an empty track.
    """
    totals = {cls: {"tp": 0, "fp": 0, "fn": 0} for cls in classes}
    errors: list = []
    bce_sum = 0.0
    bce_n = 0

    clip_ids = sorted(set(preds) | set(labels))
    for clip_id in clip_ids:
        pred = preds.get(clip_id)
        ref = labels.get(clip_id)
        if pred is None or ref is None:
            side = "prediction" if pred is None else "label"
            log.warning(f"[{clip_id}] no {side} records, scored against an empty track")
        pred = pred or SeldTrack(num_frames=ref.num_frames)
        ref = ref or SeldTrack(num_frames=pred.num_frames)
        try:
            for cls, c in seld_counts(pred, ref, threshold, classes).items():
                for key in c:
                    totals[cls][key] += c[key]
            errors.extend(masked_sq_errors(pred, ref, classes))
            bce = seld_activity_bce(pred, ref, classes)
        except ValueError as e:
            raise ValueError(f"clip {clip_id}: {e}") from None
        if bce is not None:
            n = ref.num_frames * len(classes)
            bce_sum += bce * n
            bce_n += n

    return SeldReport(
        fscores={cls: fscore_from_counts(**c) for cls, c in totals.items()},
        masked_mse=float(np.mean(errors)) if errors else None,
        activity_bce=bce_sum / bce_n if bce_n else None,
        clips=len(clip_ids),
    )
