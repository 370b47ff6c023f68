"""
curation/windows.py
===================
Candidate clip enumeration: every start time on the time grid × every
viewing angle on the yaw grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, List

from config.settings import CLIP

if TYPE_CHECKING:
    from curation.curator import CurationConfig

_EPS = 1e-9


@dataclass(frozen=True, order=True)
class ClipWindow:
    start: float
    yaw: float
    length: float = CLIP["length_s"]

    @property
    def end(self) -> float:
        return self.start + self.length

    @property
    def clip_id_suffix(self) -> str:
        return f"t{self.start * 1000:07.0f}_y{self.yaw:03.0f}"


def enumerate_windows(duration: float, config: "CurationConfig") -> List[ClipWindow]:
    """Cartesian product of window starts and yaws, starts first."""
    length = CLIP["length_s"]
    if duration < length:
        return []
    if config.time_step <= 0 or config.yaw_step <= 0:
        raise ValueError("time_step and yaw_step must be positive")

    n_starts = math.floor((duration - length) / config.time_step + _EPS) + 1
    n_yaws = math.ceil(360.0 / config.yaw_step - _EPS)

    windows = []
    for i in range(n_starts):
        start = round(i * config.time_step, 9)
        for j in range(n_yaws):
            windows.append(ClipWindow(start=start, yaw=round(j * config.yaw_step, 9)))
    return windows
