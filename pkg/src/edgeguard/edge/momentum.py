"""Momentum trigger: exponentially weighted sum of recent confidences.

Each weapon class keeps a queue of its last n+1 per-frame confidences
(newest first). The score is

    momentum_c = sum(q_c(t - i) * k**i  for i in 0..min(n, len-1))

so a sustained detection accumulates toward q * (1-k^(n+1))/(1-k) while a
single-frame spike decays by a factor of k per frame. A detection is
valid only when the score strictly exceeds its class threshold, which is
what suppresses one-frame false positives.
"""

from __future__ import annotations

from collections import deque
from typing import Optional, Tuple

from edgeguard.core.types import DetectionScores, WeaponClass


class MomentumState:
    """Per-class confidence queues and their current momentum scores."""

    def __init__(self, k: float, n: int):
        if not 0.0 < k < 1.0:
            raise ValueError("k out of (0,1)")
        if n < 0:
            raise ValueError("n must be >= 0")
        self.k = k
        self.n = n
        self._queues = {cls: deque(maxlen=n + 1) for cls in WeaponClass}
        self.momentum = {cls: 0.0 for cls in WeaponClass}

    def push(self, scores: DetectionScores) -> None:
        """Add one frame's confidences and recompute both scores.

        The queue is tiny (n+1 entries), so the score is recomputed from
        it directly; this keeps the running value exactly equal to the
        windowed sum with no incremental drift.
        """
        for cls in WeaponClass:
            q = self._queues[cls]
            q.appendleft(scores.get(cls))
            total = 0.0
            weight = 1.0
            for value in q:
                total += value * weight
                weight *= self.k
            self.momentum[cls] = total

    def queue(self, cls: WeaponClass) -> tuple:
        """Snapshot of a class queue, newest first."""
        return tuple(self._queues[cls])


def check_trigger(state: MomentumState, thresholds: dict) -> Optional[Tuple[WeaponClass, float]]:
    """Return (class, momentum) for the strongest threshold crossing.

    Comparison is strict: a score exactly at its threshold does not fire.
    When both classes cross, the one with the larger excess over its own
    threshold wins.
    """
    best = None
    best_excess = 0.0
    for cls in WeaponClass:
        m = state.momentum[cls]
        excess = m - thresholds[cls]
        if excess > 0 and (best is None or excess > best_excess):
            best = (cls, m)
            best_excess = excess
    return best
