"""
config/pipeline_config.py
=========================
Run configuration for the command-line tools.

Precedence: config/settings.py defaults < KEY=VALUE config file < flags.

Config file schema (dotenv syntax, one KEY=VALUE per line, # comments allowed):

    FOA_WAV=recordings/fold3_room4_mix001.wav   4-channel FOA WAV
    FRAME_DIR=frames/fold3_room4_mix001         extracted equirect frames + timing.json
    LABEL_CSV=metadata/fold3_room4_mix001.csv   label CSV
    RECORDINGS=recordings.csv                   batch list: recording_id,foa_wav,frame_dir,label_csv
    OUTPUT_ROOT=data/clips

    TIME_STEP=0.5              seconds between window starts
    YAW_STEP=10                degrees between viewing angles
    ACTIVITY_THRESHOLD=0.8     fraction of label frames that must be active
    TARGET_CLASSES=speech,instrument
    ALLOW_OVERLAP=false
    REQUIRE_ONSCREEN=true

    GAIN_DB=38
    HIGHPASS=true
    DSP_ORDER=stereo_first     stereo_first | foa_first

    MARGIN=0.1                 Spatial AV-Align margin, fraction of canvas width
    ALIGN_THRESHOLD=0.5        SELD activity threshold for Spatial AV-Align
    ADJACENCY=1                video frames each side of the closest one
    AUDIO_CLASSES=speech,instrument
    OBJECT_CLASSES=person
    AGGREGATE=pooled           pooled | mean

    WORKERS=4

Unknown keys are rejected.
"""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

import pandas as pd
from dotenv import dotenv_values

from config.settings import ALIGN_DEFAULTS, CAMERA, OUTPUT_ROOT, WORKERS
from curation.curator import CurationConfig
from curation.renderer import DspSettings
from metrics.av_align import AlignConfig

log = logging.getLogger(__name__)

AGGREGATES = ("pooled", "mean")


def _parse_bool(text: str) -> bool:
    value = str(text).strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_list(text) -> tuple:
    if isinstance(text, (list, tuple)):
        return tuple(text)
    return tuple(item.strip() for item in str(text).split(",") if item.strip())


def _format(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (list, tuple)):
        return ",".join(value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


# KEY → (section, field, parser). Section None means a top-level field.
CONFIG_KEYS = {
    "FOA_WAV":            ("inputs", "foa_wav", str),
    "FRAME_DIR":          ("inputs", "frame_dir", str),
    "LABEL_CSV":          ("inputs", "label_csv", str),
    "RECORDINGS":         ("inputs", "recordings", str),
    "OUTPUT_ROOT":        (None, "output_root", str),
    "TIME_STEP":          ("curation", "time_step", float),
    "YAW_STEP":           ("curation", "yaw_step", float),
    "ACTIVITY_THRESHOLD": ("curation", "activity_threshold", float),
    "TARGET_CLASSES":     ("curation", "target_classes", _parse_list),
    "ALLOW_OVERLAP":      ("curation", "allow_overlap", _parse_bool),
    "REQUIRE_ONSCREEN":   ("curation", "require_onscreen", _parse_bool),
    "GAIN_DB":            ("dsp", "gain_db", float),
    "HIGHPASS":           ("dsp", "highpass", _parse_bool),
    "DSP_ORDER":          ("dsp", "dsp_order", str),
    "MARGIN":             ("align", "margin", float),
    "ALIGN_THRESHOLD":    ("align", "activity_threshold", float),
    "ADJACENCY":          ("align", "adjacency", int),
    "AUDIO_CLASSES":      ("align", "audio_classes", _parse_list),
    "OBJECT_CLASSES":     ("align", "object_classes", _parse_list),
    "AGGREGATE":          (None, "aggregate", str),
    "WORKERS":            (None, "workers", int),
}


def hash_params(params: dict) -> str:
    canonical = json.dumps(params, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


@dataclass(frozen=True)
class InputPaths:
    foa_wav: Optional[str] = None
    frame_dir: Optional[str] = None
    label_csv: Optional[str] = None
    recordings: Optional[str] = None


@dataclass(frozen=True)
class RecordingInputs:
    recording_id: str
    foa_wav: Path
    frame_dir: Path
    label_csv: Path

    def missing(self) -> List[str]:
        problems = []
        if not self.foa_wav.is_file():
            problems.append(f"FOA WAV not found: {self.foa_wav}")
        if not self.frame_dir.is_dir():
            problems.append(f"frame directory not found: {self.frame_dir}")
        if not self.label_csv.is_file():
            problems.append(f"label CSV not found: {self.label_csv}")
        return problems


@dataclass(frozen=True)
class PipelineConfig:
    inputs: InputPaths = field(default_factory=InputPaths)
    output_root: str = OUTPUT_ROOT
    curation: CurationConfig = field(default_factory=CurationConfig)
    dsp: DspSettings = field(default_factory=DspSettings)
    align: AlignConfig = field(default_factory=AlignConfig)
    aggregate: str = ALIGN_DEFAULTS["aggregate"]
    workers: int = WORKERS

    def __post_init__(self):
        if self.aggregate not in AGGREGATES:
            raise ValueError(f"aggregate must be one of {AGGREGATES}, got {self.aggregate!r}")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")

    # ── Serialization ─────────────────────────────────────────────────────

    def to_dict(self) -> dict:
        d = asdict(self)
        for section in ("curation", "align"):
            for key, value in d[section].items():
                if isinstance(value, tuple):
                    d[section][key] = list(value)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "PipelineConfig":
        return cls(
            inputs=InputPaths(**d.get("inputs", {})),
            output_root=d.get("output_root", OUTPUT_ROOT),
            curation=CurationConfig(**d.get("curation", {})),
            dsp=DspSettings(**d.get("dsp", {})),
            align=AlignConfig(**d.get("align", {})),
            aggregate=d.get("aggregate", ALIGN_DEFAULTS["aggregate"]),
            workers=d.get("workers", WORKERS),
        )

    def to_env_text(self) -> str:
        """Render as a KEY=VALUE config file that load_config reads back unchanged."""
        d = self.to_dict()
        lines = []
        for key, (section, name, _) in CONFIG_KEYS.items():
            value = d[name] if section is None else d[section][name]
            if value is None:
                continue
            lines.append(f"{key}={_format(value)}")
        return "\n".join(lines) + "\n"

    def processing_params(self) -> dict:
        """The parameters that shape the clips; paths and worker count are left out."""
        d = self.to_dict()
        return {"curation": d["curation"], "dsp": d["dsp"], "camera": dict(CAMERA)}

    def config_hash(self) -> str:
        return hash_params(self.processing_params())

    # ── Overrides ─────────────────────────────────────────────────────────

    def with_values(self, values: Dict[str, object]) -> "PipelineConfig":
        """Apply KEY → raw value overrides (config file or flags)."""
        d = self.to_dict()
        for key, raw in values.items():
            if raw is None:
                continue
            key = key.upper()
            if key not in CONFIG_KEYS:
                raise ValueError(f"unknown config key: {key}")
            section, name, parse = CONFIG_KEYS[key]
            try:
                value = parse(raw) if isinstance(raw, str) or parse is _parse_list else raw
            except ValueError as e:
                raise ValueError(f"config key {key}: {e}") from None
            if section is None:
                d[name] = value
            else:
                d[section][name] = value
        return PipelineConfig.from_dict(d)

    # ── Inputs ────────────────────────────────────────────────────────────

    def recordings(self) -> List[RecordingInputs]:
        """Expand the configured inputs into per-recording path sets."""
        items = []
        if self.inputs.recordings:
            listing = Path(self.inputs.recordings)
            if not listing.is_file():
                raise FileNotFoundError(f"recordings list not found: {listing}")
            base = listing.parent
            df = pd.read_csv(listing, dtype=str)
            expected = {"recording_id", "foa_wav", "frame_dir", "label_csv"}
            if not expected.issubset(df.columns):
                raise ValueError(f"{listing}: columns must include {sorted(expected)}")
            for row in df.itertuples(index=False):
                items.append(RecordingInputs(
                    recording_id=row.recording_id,
                    foa_wav=base / row.foa_wav,
                    frame_dir=base / row.frame_dir,
                    label_csv=base / row.label_csv,
                ))
        if self.inputs.foa_wav or self.inputs.frame_dir or self.inputs.label_csv:
            if not (self.inputs.foa_wav and self.inputs.frame_dir and self.inputs.label_csv):
                raise ValueError("FOA_WAV, FRAME_DIR and LABEL_CSV must be given together")
            foa = Path(self.inputs.foa_wav)
            items.append(RecordingInputs(
                recording_id=foa.stem,
                foa_wav=foa,
                frame_dir=Path(self.inputs.frame_dir),
                label_csv=Path(self.inputs.label_csv),
            ))
        return items

    def validate_inputs(self) -> List[RecordingInputs]:
        """All input paths must exist before any work starts."""
        items = self.recordings()
        if not items:
            raise ValueError("no recordings configured (give --foa/--frames/--labels or --recordings)")
        problems = [p for item in items for p in item.missing()]
        if problems:
            raise FileNotFoundError("; ".join(problems))
        ids = [item.recording_id for item in items]
        if len(set(ids)) != len(ids):
            raise ValueError("recording ids must be unique")
        return items


def load_config(config_file: str = None, overrides: Dict[str, object] = None) -> PipelineConfig:
    """Defaults, then the config file, then flag overrides."""
    config = PipelineConfig()
    if config_file:
        path = Path(config_file)
        if not path.is_file():
            raise FileNotFoundError(f"config file not found: {path}")
        values = {k: v for k, v in dotenv_values(path).items() if v is not None}
        log.info(f"Config file {path}: {len(values)} keys")
        config = config.with_values(values)
    if overrides:
        config = config.with_values(overrides)
    return config
