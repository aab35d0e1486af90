"""Synthetic frame generation for simulated cameras.

A device's scene is a flat dark background; during its scripted motion
intervals a bright square walks across the image, two pixels per frame,
which keeps the background-subtraction gate open. Pixel content is a
pure function of (geometry, seq), so runs are reproducible.
"""

from __future__ import annotations

import numpy as np

from edgeguard.core.types import Frame

BACKGROUND = 30
BOX_VALUE = 220


class FrameSource:
    def __init__(self, width: int, height: int, motion_intervals=()):
        self.width = width
        self.height = height
        self.motion_intervals = tuple(motion_intervals)
        self.box = max(4, min(width, height) // 6)

    def moving(self, seq: int) -> bool:
        return any(a <= seq <= b for a, b in self.motion_intervals)

    def frame(self, seq: int, timestamp: int) -> Frame:
        pixels = np.full((self.height, self.width), BACKGROUND, dtype=np.uint8)
        if self.moving(seq):
            span_x = self.width - self.box
            span_y = self.height - self.box
            x = (seq * 2) % max(span_x, 1)
            y = (seq * 1) % max(span_y, 1)
            pixels[y : y + self.box, x : x + self.box] = BOX_VALUE
        return Frame(
            width=self.width,
            height=self.height,
            pixels=pixels.tobytes(),
            timestamp=timestamp,
            seq=seq,
        )
