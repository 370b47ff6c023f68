"""
cli/main.py
===========
Command-line entry point.

    python cli/main.py convert --foa rec.wav --frames frames/rec --labels rec.csv --output data/clips
    python cli/main.py convert --config run.env --workers 4
    python cli/main.py eval-frechet reference.csv candidate.csv
    python cli/main.py eval-align --detections det.jsonl --seld seld.jsonl [--aggregate mean]
    python cli/main.py eval-seld --predictions pred.jsonl --labels data/clips/labels.jsonl
    python cli/main.py stats data/clips/manifest.jsonl [--json stats.json]

Every flag can also be set in a KEY=VALUE config file (see
config/pipeline_config.py); flags win over the file.

Exit codes: 0 success, 1 input error, 2 internal error.
"""

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import List, Optional, Tuple

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from config.pipeline_config import AGGREGATES, PipelineConfig, RecordingInputs, hash_params, load_config
from config.settings import LOG_FORMAT, LOG_LEVEL, OUTPUT_FILES, SELD_EVAL
from cli.media_io import read_foa_wav, read_frame_dir, write_frames, write_stereo_wav
from conversion.ambisonics import FoaBuffer
from conversion.geometry import CameraSpec
from curation.curator import ClipCurator, dominant_class
from curation.labels import WindowLabels, export_seld_labels, load_annotation_csv, transform_labels
from curation.manifest import (
    ClipRecord,
    ManifestHeader,
    manifest_stats,
    print_summary,
    projected_label_rows,
    read_manifest,
    write_manifest,
)
from curation.renderer import DSP_ORDERS, FrameSequence, render_clip
from curation.windows import enumerate_windows
from metrics.av_align import (
    align_corpus,
    detection_tracks_from_records,
    mean_align,
    pool_align,
    seld_tracks_from_records,
)
from metrics.frechet import fit_gaussian, frechet_distance, load_embeddings
from metrics.records import DETECTION_SCHEMA, SELD_SCHEMA, read_records, write_records
from metrics.seld_eval import evaluate_corpus

log = logging.getLogger(__name__)


def _fmt(value: Optional[float]) -> str:
    return "n/a" if value is None else f"{value:.4f}"


# ─────────────────────────────────────────────────────────────────────────────
# CONVERT
# ─────────────────────────────────────────────────────────────────────────────

def _recording_duration(foa: FoaBuffer, frames: FrameSequence) -> float:
    """Span covered by both the audio and the frames."""
    audio_end = foa.num_samples / foa.sample_rate
    times = frames.times
    step = float(times[-1] - times[-2]) if len(times) > 1 else 0.0
    return min(audio_end, float(times[-1]) + step)


def _render_and_write(
    job: Tuple[ClipRecord, WindowLabels],
    foa: FoaBuffer,
    frames: FrameSequence,
    camera: CameraSpec,
    config: PipelineConfig,
) -> Tuple[ClipRecord, List[dict]]:
    """Render one kept window and write its files. Runs on a worker thread."""
    record, labels = job
    root = Path(config.output_root)
    rendered = render_clip(foa, frames, record.window, camera, record=record, dsp=config.dsp)
    record = rendered.record
    if rendered.clipping:
        return record, []

    audio_rel = Path(OUTPUT_FILES["audio_dir"]) / f"{record.clip_id}.wav"
    frames_rel = Path(OUTPUT_FILES["frames_dir"]) / record.clip_id
    write_stereo_wav(root / audio_rel, rendered.audio)
    written = write_frames(root / frames_rel, rendered.frames)

    record.audio_path = audio_rel.as_posix()
    record.frame_paths = [(frames_rel / p.name).as_posix() for p in written]
    return record, export_seld_labels(labels, record.clip_id)


def convert_recording(
    rec: RecordingInputs,
    config: PipelineConfig,
    camera: CameraSpec,
    curator: ClipCurator,
) -> Tuple[List[ClipRecord], List[dict]]:
    foa = read_foa_wav(rec.foa_wav)
    frames = read_frame_dir(rec.frame_dir)
    duration = _recording_duration(foa, frames)
    track = load_annotation_csv(rec.label_csv, rec.recording_id, duration=duration)

    windows = enumerate_windows(duration, config.curation)
    log.info(f"[{rec.recording_id}] {duration:.1f} s → {len(windows)} candidate windows")

    records: List[ClipRecord] = []
    jobs: List[Tuple[ClipRecord, WindowLabels]] = []
    for window in windows:
        labels = transform_labels(track, window, camera)
        verdict = curator.curate(labels)
        record = ClipRecord(recording_id=rec.recording_id, window=window, verdict=verdict)
        if verdict.kept:
            record.dominant_class = dominant_class(labels, config.curation)
            record.projected_labels = projected_label_rows(labels)
            jobs.append((record, labels))
        else:
            records.append(record)

    label_rows: List[dict] = []
    with ThreadPoolExecutor(max_workers=config.workers) as pool:
        results = pool.map(lambda job: _render_and_write(job, foa, frames, camera, config), jobs)
        for i, (record, rows) in enumerate(results, start=1):
            if i % 50 == 0 or i == len(jobs):
                log.info(f"[{i}/{len(jobs)}] Rendering {rec.recording_id}")
            records.append(record)
            label_rows.extend(rows)
    return records, label_rows


def cmd_convert(config: PipelineConfig) -> int:
    recordings = config.validate_inputs()
    camera = CameraSpec()
    curator = ClipCurator(config.curation)
    root = Path(config.output_root)
    root.mkdir(parents=True, exist_ok=True)

    records: List[ClipRecord] = []
    label_rows: List[dict] = []
    failures: List[str] = []
    for i, rec in enumerate(recordings, start=1):
        log.info(f"[{i}/{len(recordings)}] Converting {rec.recording_id}")
        try:
            rec_records, rec_labels = convert_recording(rec, config, camera, curator)
        except (ValueError, FileNotFoundError, OSError) as e:
            log.error(f"[{rec.recording_id}] failed: {e}")
            failures.append(f"{rec.recording_id}: {e}")
            continue
        records.extend(rec_records)
        label_rows.extend(rec_labels)

    gates = ", ".join(f"{label}={n}" for label, n in sorted(curator.reason_count.items()))
    log.info(f"Curation gates: {gates or 'no windows'}")

    header = ManifestHeader(config_hash=config.config_hash(), config=config.processing_params())
    write_manifest(root / OUTPUT_FILES["manifest"], header, records)
    label_rows.sort(key=lambda r: (r["clip_id"], r["frame_index"], r["class"]))
    write_records(root / OUTPUT_FILES["seld_labels"], label_rows)

    stats = manifest_stats(records)
    (root / OUTPUT_FILES["stats"]).write_text(json.dumps(stats.to_dict(), indent=2, sort_keys=True) + "\n")
    print_summary(stats, failures)
    return 1 if failures else 0


# ─────────────────────────────────────────────────────────────────────────────
# EVALUATION
# ─────────────────────────────────────────────────────────────────────────────

def cmd_eval_frechet(reference: str, candidate: str) -> int:
    ref = fit_gaussian(load_embeddings(reference, "reference"))
    cand = fit_gaussian(load_embeddings(candidate, "candidate"))
    print(f"{frechet_distance(ref, cand):.4f}")
    return 0


def cmd_eval_align(detections: str, seld: str, config: PipelineConfig) -> int:
    det_tracks = detection_tracks_from_records(read_records(detections, DETECTION_SCHEMA), detections)
    seld_tracks = seld_tracks_from_records(read_records(seld, SELD_SCHEMA), seld)
    results = align_corpus(det_tracks, seld_tracks, config.align)

    for clip_id, result in results.items():
        flag = "  (undefined)" if result.score is None else ""
        print(f"{clip_id:<40} {_fmt(result.score)}  tp={result.tp} fn={result.fn_}{flag}")

    pooled = pool_align(results.values()).score
    mean = mean_align(results.values())
    headline = pooled if config.aggregate == "pooled" else mean
    print(f"\n  pooled : {_fmt(pooled)}")
    print(f"  mean   : {_fmt(mean)}")
    print(f"  Spatial AV-Align ({config.aggregate}): {_fmt(headline)}")
    return 0


def cmd_eval_seld(predictions: str, labels: str, threshold: float, config: PipelineConfig) -> int:
    pred_tracks = seld_tracks_from_records(read_records(predictions, SELD_SCHEMA), predictions)
    label_tracks = seld_tracks_from_records(read_records(labels, SELD_SCHEMA), labels)
    report = evaluate_corpus(pred_tracks, label_tracks, threshold, config.align.audio_classes)

    print(f"\n{'='*55}")
    print(f"  SELD EVALUATION  ({report.clips} clips, threshold {threshold})")
    print(f"{'='*55}")
    for cls, score in report.fscores.items():
        print(f"  F-score {cls:<16}: {_fmt(score)}")
    print(f"  Masked MSE (x)          : {_fmt(report.masked_mse)}")
    print(f"  Activity BCE            : {_fmt(report.activity_bce)}")
    print(f"{'='*55}\n")
    return 0


def cmd_stats(manifest: str, json_out: Optional[str]) -> int:
    header, records = read_manifest(manifest)
    if hash_params(header.config) != header.config_hash:
        raise ValueError(f"{manifest}: header config hash does not match its config")
    stats = manifest_stats(records)
    print_summary(stats)
    if json_out:
        Path(json_out).write_text(json.dumps(stats.to_dict(), indent=2, sort_keys=True) + "\n")
        log.info(f"Stats → {json_out}")
    return 0


# ─────────────────────────────────────────────────────────────────────────────
# ARGUMENTS
# ─────────────────────────────────────────────────────────────────────────────

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Spatial audio-video dataset and benchmark toolkit")
    parser.add_argument("--log-level", default=LOG_LEVEL, help="DEBUG, INFO, WARNING, ...")
    sub = parser.add_subparsers(dest="command", required=True)

    convert = sub.add_parser("convert", help="Cut, curate and render clips from 360° recordings")
    convert.add_argument("--config",    help="KEY=VALUE config file")
    convert.add_argument("--foa",       dest="FOA_WAV",    help="4-channel FOA WAV")
    convert.add_argument("--frames",    dest="FRAME_DIR",  help="Equirect frame directory with timing.json")
    convert.add_argument("--labels",    dest="LABEL_CSV",  help="Label CSV")
    convert.add_argument("--recordings", dest="RECORDINGS",
                         help="CSV listing recording_id,foa_wav,frame_dir,label_csv")
    convert.add_argument("--output",    dest="OUTPUT_ROOT", help="Output root directory")
    convert.add_argument("--time-step", dest="TIME_STEP", type=float, help="Seconds between window starts")
    convert.add_argument("--yaw-step",  dest="YAW_STEP",  type=float, help="Degrees between viewing angles")
    convert.add_argument("--activity-threshold", dest="ACTIVITY_THRESHOLD", type=float)
    convert.add_argument("--target-classes", dest="TARGET_CLASSES", help="Comma-separated class groups")
    convert.add_argument("--allow-overlap", dest="ALLOW_OVERLAP", action="store_const", const=True)
    convert.add_argument("--allow-offscreen", dest="REQUIRE_ONSCREEN", action="store_const", const=False)
    convert.add_argument("--gain-db",   dest="GAIN_DB", type=float)
    convert.add_argument("--no-highpass", dest="HIGHPASS", action="store_const", const=False)
    convert.add_argument("--dsp-order", dest="DSP_ORDER", choices=DSP_ORDERS)
    convert.add_argument("--workers",   dest="WORKERS", type=int)

    frechet = sub.add_parser("eval-frechet", help="Fréchet distance between two embedding sets")
    frechet.add_argument("reference")
    frechet.add_argument("candidate")

    align = sub.add_parser("eval-align", help="Spatial AV-Align of SELD output against detections")
    align.add_argument("--config")
    align.add_argument("--detections", required=True)
    align.add_argument("--seld",       required=True)
    align.add_argument("--margin",     dest="MARGIN", type=float)
    align.add_argument("--threshold",  dest="ALIGN_THRESHOLD", type=float)
    align.add_argument("--adjacency",  dest="ADJACENCY", type=int)
    align.add_argument("--audio-classes",  dest="AUDIO_CLASSES")
    align.add_argument("--object-classes", dest="OBJECT_CLASSES")
    align.add_argument("--aggregate",  dest="AGGREGATE", choices=AGGREGATES)

    seld = sub.add_parser("eval-seld", help="Frame-level SELD F-score, masked MSE and BCE")
    seld.add_argument("--config")
    seld.add_argument("--predictions", required=True)
    seld.add_argument("--labels",      required=True)
    seld.add_argument("--threshold",   type=float, default=SELD_EVAL["threshold"])
    seld.add_argument("--audio-classes", dest="AUDIO_CLASSES")

    stats = sub.add_parser("stats", help="Summarize a manifest")
    stats.add_argument("manifest")
    stats.add_argument("--json", dest="json_out", help="Also write the statistics as JSON")
    return parser


def _overrides(args: argparse.Namespace) -> dict:
    return {k: v for k, v in vars(args).items() if k.isupper() and v is not None}


def run(args: argparse.Namespace) -> int:
    if args.command == "eval-frechet":
        return cmd_eval_frechet(args.reference, args.candidate)
    if args.command == "stats":
        return cmd_stats(args.manifest, args.json_out)

    config = load_config(args.config, _overrides(args))
    if args.command == "convert":
        return cmd_convert(config)
    if args.command == "eval-align":
        return cmd_eval_align(args.detections, args.seld, config)
    return cmd_eval_seld(args.predictions, args.labels, args.threshold, config)


def main(argv: List[str] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=args.log_level.upper(), format=LOG_FORMAT)
    try:
        return run(args)
    except (ValueError, FileNotFoundError) as e:
        log.error(str(e))
        return 1
    except Exception:
        log.exception("Internal error")
        return 2


if __name__ == "__main__":
    sys.exit(main())
