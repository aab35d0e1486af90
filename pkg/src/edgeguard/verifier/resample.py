"""Clip resampler: pick 30 frames at a target rate from a native stream.

Frame j of the output comes from source index round(j * native_fps /
target_fps), rounding half up. All supported (fps, seconds) pairs
multiply out to 30 frames.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from edgeguard.core.types import CLIP_FRAMES


class InsufficientFrames(Exception):
    pass


@dataclass(frozen=True)
class ResampleConfig:
    fps: float
    seconds: float

    def __post_init__(self):
        if self.fps <= 0 or self.seconds <= 0:
            raise ValueError("fps and seconds must be positive")
        if round(self.fps * self.seconds) != CLIP_FRAMES:
            raise ValueError(
                "fps * seconds must give %d frames, got %g * %g"
                % (CLIP_FRAMES, self.fps, self.seconds)
            )


# The six supported sampling configurations, fastest first.
SUPPORTED_CONFIGS = (
    ResampleConfig(15, 2),
    ResampleConfig(6, 5),
    ResampleConfig(5, 6),
    ResampleConfig(1, 30),
    ResampleConfig(0.5, 60),
    ResampleConfig(0.25, 120),
)


def resample_indices(native_fps: float, cfg: ResampleConfig) -> list:
    step = native_fps / cfg.fps
    return [math.floor(j * step + 0.5) for j in range(CLIP_FRAMES)]


def resample_clip(frames, native_fps: float, cfg: ResampleConfig) -> list:
    """Select exactly 30 frames; the source must span cfg.seconds."""
    frames = list(frames)
    if native_fps <= 0:
        raise ValueError("native_fps must be positive")
    if len(frames) / native_fps < cfg.seconds:
        raise InsufficientFrames(
            "%d frames at %g fps span %.3fs < %gs window"
            % (len(frames), native_fps, len(frames) / native_fps, cfg.seconds)
        )
    indices = resample_indices(native_fps, cfg)
    if indices[-1] >= len(frames):
        raise InsufficientFrames(
            "index %d out of range for %d frames" % (indices[-1], len(frames))
        )
    return [frames[i] for i in indices]
