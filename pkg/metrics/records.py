"""
metrics/records.py
==================
Line-delimited record files consumed by the evaluation commands.

Two layers of checking, per line:
  1. Structural — is the line a JSON object?
  2. Schema     — are all required fields present with usable types?

Schemas (field names and units are normative):

  detection  {clip_id: str, frame_index: int (4 fps video frame),
              class: str, x1, y1, x2, y2: float (padded-canvas pixels),
              score: float}
  seld       {clip_id: str, frame_index: int (10 fps audio frame),
              class: str, activity: float in [0, 1],
              x: float in [0, 1] (0 = left end, 1 = right end) or null}

A bad line raises RecordFormatError carrying the path and 1-based line number.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Dict, Iterable, List, Tuple

log = logging.getLogger(__name__)

DETECTION_SCHEMA = {
    "clip_id":     str,
    "frame_index": int,
    "class":       str,
    "x1":          float,
    "y1":          float,
    "x2":          float,
    "y2":          float,
    "score":       float,
}

SELD_SCHEMA = {
    "clip_id":     str,
    "frame_index": int,
    "class":       str,
    "activity":    float,
    "x":           float,
}

NULLABLE = {"x"}


class RecordFormatError(ValueError):
    def __init__(self, path, lineno: int, message: str):
        self.path = str(path)
        self.lineno = lineno
        super().__init__(f"{self.path}:{lineno}: {message}")


def _coerce(value, kind):
    if kind is str:
        if not isinstance(value, str) or not value:
            raise TypeError("expected a non-empty string")
        return value
    if isinstance(value, bool):
        raise TypeError("expected a number, got a boolean")
    if kind is int:
        if isinstance(value, float) and value.is_integer():
            return int(value)
        if not isinstance(value, int):
            raise TypeError("expected an integer")
        return value
    if not isinstance(value, (int, float)):
        raise TypeError("expected a number")
    return float(value)


def validate_record(raw: dict, schema: Dict[str, type]) -> Tuple[dict, List[str]]:
    """
    Check all required fields are present and typed.

    Returns:
        (clean_record, list_of_issues)
    """
    issues = []
    clean = {}
    for name, kind in schema.items():
        if name not in raw:
            issues.append(f"missing field: {name}")
            continue
        value = raw[name]
        if value is None and name in NULLABLE:
            clean[name] = None
            continue
        try:
            clean[name] = _coerce(value, kind)
        except TypeError as e:
            issues.append(f"field {name}: {e} (got {value!r})")
    if "frame_index" in clean and clean["frame_index"] < 0:
        issues.append("field frame_index: must be >= 0")
    return clean, issues


def read_records(path, schema: Dict[str, type]) -> List[Tuple[int, dict]]:
    """Parse a JSON-lines file into (line_number, record) pairs."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"record file not found: {path}")

    rows = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            try:
                raw = json.loads(text)
            except json.JSONDecodeError as e:
                raise RecordFormatError(path, lineno, f"JSON parse error: {e.msg}") from None
            if not isinstance(raw, dict):
                raise RecordFormatError(path, lineno, "expected a JSON object")
            clean, issues = validate_record(raw, schema)
            if issues:
                raise RecordFormatError(path, lineno, "; ".join(issues))
            rows.append((lineno, clean))

    log.info(f"Read {len(rows)} records from {path}")
    return rows


def write_records(path, records: Iterable[dict]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for record in records:
            fh.write(json.dumps(record, sort_keys=True) + "\n")
    return path
