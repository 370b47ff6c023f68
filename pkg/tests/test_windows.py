"""Tests for curation.windows."""

from __future__ import annotations

import pytest

from curation.curator import CurationConfig
from curation.windows import ClipWindow, enumerate_windows


class TestEnumerateWindows:
    def test_default_steps(self) -> None:
        windows = enumerate_windows(6.0, CurationConfig())
        assert len(windows) == 3 * 36
        assert windows[0] == ClipWindow(0.0, 0.0)
        assert windows[1] == ClipWindow(0.0, 10.0)
        assert windows[36] == ClipWindow(0.5, 0.0)
        assert windows[-1] == ClipWindow(1.0, 350.0)

    def test_defaults_are_half_second_and_ten_degrees(self) -> None:
        config = CurationConfig()
        assert config.time_step == 0.5
        assert config.yaw_step == 10.0

    def test_too_short(self) -> None:
        assert enumerate_windows(4.9, CurationConfig()) == []

    def test_exact_length_gives_one_start(self) -> None:
        windows = enumerate_windows(5.0, CurationConfig())
        assert {w.start for w in windows} == {0.0}
        assert len(windows) == 36

    def test_custom_steps(self) -> None:
        windows = enumerate_windows(7.0, CurationConfig(time_step=1.0, yaw_step=90.0))
        assert [w.start for w in windows[::4]] == [0.0, 1.0, 2.0]
        assert [w.yaw for w in windows[:4]] == [0.0, 90.0, 180.0, 270.0]

    def test_every_window_fits(self) -> None:
        for w in enumerate_windows(12.3, CurationConfig()):
            assert w.end <= 12.3 + 1e-9
            assert w.length == 5.0

    def test_rejects_zero_step(self) -> None:
        with pytest.raises(ValueError):
            enumerate_windows(6.0, CurationConfig(time_step=0.0))


class TestClipWindow:
    def test_suffix(self) -> None:
        assert ClipWindow(1.5, 30.0).clip_id_suffix == "t0001500_y030"

    def test_end(self) -> None:
        assert ClipWindow(2.0, 0.0).end == 7.0
