"""Parametric synthetic detector for scenario generation.

Outside any burst a class scores uniform noise in [0, noise); inside a
burst it scores clamp(mean + uniform(-jitter, +jitter), 0, 1). Every
frame consumes exactly two draws (gun first, then knife) from the seeded
Lcg64 stream, so streams are identical across runs and implementations
regardless of burst layout.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional

from edgeguard.core.types import DetectionScores, Frame, WeaponClass
from edgeguard.detectors.rng import Lcg64


@dataclass(frozen=True)
class Burst:
    start_seq: int
    length: int
    weapon: WeaponClass
    mean: float
    jitter: float = 0.0

    def __post_init__(self):
        if self.length <= 0:
            raise ValueError("burst length must be positive")
        if not 0.0 <= self.mean <= 1.0 or self.jitter < 0.0:
            raise ValueError("burst mean/jitter out of range")
        if self.mean + self.jitter > 1.0:
            raise ValueError("mean + jitter must be <= 1")

    def covers(self, seq: int) -> bool:
        return self.start_seq <= seq < self.start_seq + self.length


@dataclass(frozen=True)
class SyntheticProfile:
    seed: int
    noise: float = 0.0
    bursts: tuple = ()

    def __post_init__(self):
        if not 0.0 <= self.noise < 1.0:
            raise ValueError("noise level out of [0,1)")

    def active_burst(self, seq: int, weapon: WeaponClass) -> Optional[Burst]:
        for burst in self.bursts:
            if burst.weapon is weapon and burst.covers(seq):
                return burst
        return None


class SyntheticDetector:
    def __init__(self, profile: SyntheticProfile):
        self.profile = profile
        self._rng = Lcg64(profile.seed)

    def detect(self, frame: Frame) -> DetectionScores:
        values = {}
        for cls in WeaponClass:  # fixed class order keeps the stream aligned
            burst = self.profile.active_burst(frame.seq, cls)
            if burst is not None:
                q = burst.mean + self._rng.uniform(-burst.jitter, burst.jitter)
                values[cls] = min(1.0, max(0.0, q))
            else:
                values[cls] = self._rng.uniform(0.0, self.profile.noise)
        return DetectionScores(
            frame_seq=frame.seq,
            q_gun=values[WeaponClass.GUN],
            q_knife=values[WeaponClass.KNIFE],
        )
