"""Tests for cli.media_io."""

from __future__ import annotations

import json

import numpy as np
import pytest
import soundfile as sf

from cli.media_io import (
    read_foa_wav,
    read_frame_dir,
    read_wav,
    write_frames,
    write_stereo_wav,
)
from conftest import pattern_frame, write_frame_dir
from conversion.audio_dsp import WaveBuffer


class TestAudio:
    def test_foa_channels_and_rate(self, synthetic_recording) -> None:
        foa = read_foa_wav(synthetic_recording.foa_wav)
        assert foa.data.shape == (4, 6 * 24000)
        assert foa.sample_rate == 24000

    def test_rejects_non_foa(self, tmp_path) -> None:
        path = tmp_path / "stereo.wav"
        sf.write(str(path), np.zeros((100, 2)), 16000)
        with pytest.raises(ValueError, match="4 FOA channels"):
            read_foa_wav(path)

    def test_missing_file(self, tmp_path) -> None:
        with pytest.raises(FileNotFoundError):
            read_wav(tmp_path / "none.wav")

    def test_stereo_written_as_pcm16(self, tmp_path) -> None:
        data = np.vstack([np.linspace(-0.5, 0.5, 1600), np.zeros(1600)])
        path = write_stereo_wav(tmp_path / "out" / "clip.wav", WaveBuffer(data, 16000))
        info = sf.info(str(path))
        assert (info.channels, info.samplerate, info.subtype) == (2, 16000, "PCM_16")
        back = read_wav(path)
        np.testing.assert_allclose(back.data, data, atol=1.0 / 32768)

    def test_stereo_requires_two_channels(self, tmp_path) -> None:
        with pytest.raises(ValueError):
            write_stereo_wav(tmp_path / "mono.wav", WaveBuffer(np.zeros((1, 10)), 16000))


class TestFrames:
    def test_fps_timing(self, tmp_path) -> None:
        frames = [pattern_frame(shift=i) for i in range(5)]
        seq = read_frame_dir(write_frame_dir(tmp_path / "f", frames, fps=4, t0=1.0))
        assert len(seq) == 5
        np.testing.assert_allclose(seq.times, [1.0, 1.25, 1.5, 1.75, 2.0])
        np.testing.assert_array_equal(seq.fetch(3), frames[3])

    def test_explicit_times(self, tmp_path) -> None:
        frame_dir = write_frame_dir(tmp_path / "f", [pattern_frame(), pattern_frame(shift=1)], fps=1)
        (frame_dir / "timing.json").write_text(json.dumps({"times": [0.0, 0.04]}))
        np.testing.assert_allclose(read_frame_dir(frame_dir).times, [0.0, 0.04])

    def test_times_count_mismatch(self, tmp_path) -> None:
        frame_dir = write_frame_dir(tmp_path / "f", [pattern_frame()], fps=1)
        (frame_dir / "timing.json").write_text(json.dumps({"times": [0.0, 0.5]}))
        with pytest.raises(ValueError):
            read_frame_dir(frame_dir)

    def test_non_positive_fps(self, tmp_path) -> None:
        frame_dir = write_frame_dir(tmp_path / "f", [pattern_frame()], fps=0)
        with pytest.raises(ValueError, match="fps"):
            read_frame_dir(frame_dir)

    def test_missing_sidecar(self, tmp_path) -> None:
        frame_dir = write_frame_dir(tmp_path / "f", [pattern_frame()], fps=1)
        (frame_dir / "timing.json").unlink()
        with pytest.raises(FileNotFoundError):
            read_frame_dir(frame_dir)

    def test_no_images_suggests_extraction(self, tmp_path) -> None:
        frame_dir = tmp_path / "f"
        frame_dir.mkdir()
        (frame_dir / "timing.json").write_text('{"fps": 1}')
        with pytest.raises(ValueError, match="ffmpeg"):
            read_frame_dir(frame_dir)

    def test_write_frames_numbered(self, tmp_path) -> None:
        paths = write_frames(tmp_path / "clip", [pattern_frame(shift=i) for i in range(3)])
        assert [p.name for p in paths] == ["000.png", "001.png", "002.png"]
