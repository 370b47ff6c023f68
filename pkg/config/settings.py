"""
config/settings.py
==================
Central configuration for the spatial audio-video dataset and evaluation toolkit.
Every default the pipeline and the metrics use lives here; command-line flags
and KEY=VALUE config files (see config/pipeline_config.py) override them.

A local .env file may override the environment-driven values at the top.

Usage:
    from config.settings import CAMERA, CURATION_DEFAULTS
"""

import os

from dotenv import load_dotenv

load_dotenv()

# ── Environment-driven values (set in .env or the shell) ──────────────────────
OUTPUT_ROOT = os.getenv("SAVG_OUTPUT_ROOT", "data/clips")
WORKERS     = int(os.getenv("SAVG_WORKERS", "1"))
LOG_LEVEL   = os.getenv("SAVG_LOG_LEVEL", "INFO")

TOOL_VERSION = "1.0.0"

LOG_FORMAT = "%(asctime)s [%(levelname)s] %(message)s"

# ── Camera (perspective view rendered from the equirectangular video) ─────────
CAMERA = {
    "hfov_deg":       100.0,   # horizontal field of view
    "content_width":  256,
    "content_height": 144,     # 16:9
    "canvas_width":   256,
    "canvas_height":  256,     # square canvas, content centred vertically
}

# ── Clip format ───────────────────────────────────────────────────────────────
CLIP = {
    "length_s":        5.0,
    "video_fps":       4,
    "label_fps":       10,     # source position labels and SELD output rate
    "audio_rate":      16000,
}

# ── Audio DSP ─────────────────────────────────────────────────────────────────
AUDIO_DSP = {
    "highpass_cutoff_hz": 100.0,
    "highpass_order":     2,
    "gain_db":            38.0,
    "clip_threshold":     1.0,          # |sample| >= this counts as clipping
    "resample_half_taps": 64,           # per max(up, down); Kaiser-windowed sinc
    "resample_kaiser_beta": 8.6,
    "dsp_order":          "stereo_first",   # stereo_first | foa_first
}

# ── SELD input features ───────────────────────────────────────────────────────
SELD_FEATURES = {
    "sample_rate": 16000,
    "n_fft":       512,
    "hop_length":  160,    # 100 frames/s
    "window":      "hann",
}

# ── STARSS23 sound event classes ──────────────────────────────────────────────
STARSS23_CLASSES = {
    0:  "femaleSpeech",
    1:  "maleSpeech",
    2:  "clapping",
    3:  "telephone",
    4:  "laughter",
    5:  "domesticSounds",
    6:  "footsteps",
    7:  "doorCupboard",
    8:  "music",
    9:  "musicInstrument",
    10: "waterTap",
    11: "bell",
    12: "knock",
}

# Curation groups: class id → group name used in manifests and SELD records
CLASS_GROUPS = {
    0: "speech",
    1: "speech",
    9: "instrument",
}

# ── Curation (development-set step sizes) ─────────────────────────────────────
CURATION_DEFAULTS = {
    "target_classes":     ("speech", "instrument"),
    "activity_threshold": 0.8,      # fraction of label frames that must be active
    "allow_overlap":      False,
    "require_onscreen":   True,
    "time_step":          0.5,      # seconds between window starts
    "yaw_step":           10.0,     # degrees between viewing angles
}

# ── Spatial AV-Align ──────────────────────────────────────────────────────────
ALIGN_DEFAULTS = {
    "margin":             0.10,     # fraction of canvas width each side of the SELD x
    "activity_threshold": 0.5,
    "adjacency":          1,        # video frames each side of the nearest one
    "audio_classes":      ("speech", "instrument"),
    "object_classes":     ("person",),
    "aggregate":          "pooled", # pooled | mean
}

# ── Fréchet distance ──────────────────────────────────────────────────────────
FRECHET = {
    "eigen_clamp": 1e-10,   # eigenvalues below this are treated as zero
}

# ── SELD evaluation ───────────────────────────────────────────────────────────
SELD_EVAL = {
    "threshold":   0.5,
    "bce_epsilon": 1e-7,
}

# ── File names inside the output root ─────────────────────────────────────────
OUTPUT_FILES = {
    "manifest":    "manifest.jsonl",
    "seld_labels": "labels.jsonl",
    "stats":       "stats.json",
    "audio_dir":   "audio",
    "frames_dir":  "frames",
    "timing":      "timing.json",     # sidecar inside a source frame directory
}
