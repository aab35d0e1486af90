"""Discrete-event virtual clock.

Time is integer milliseconds and only moves forward when the owner runs
events. Events scheduled for the same instant run in insertion order, so
a fixed scenario and seed always produce the same execution trace.
"""

from __future__ import annotations

import heapq
from typing import Callable


class VirtualClock:
    def __init__(self, start_ms: int = 0):
        self._now = start_ms
        self._seq = 0
        self._heap = []  # (time, seq, callback) entries; cancelled ones hold None

    @property
    def now(self) -> int:
        return self._now

    def schedule(self, delay_ms: int, callback: Callable[[], None]) -> int:
        """Run ``callback`` after ``delay_ms``; returns a handle for cancel()."""
        return self.schedule_at(self._now + delay_ms, callback)

    def schedule_at(self, at_ms: int, callback: Callable[[], None]) -> int:
        if at_ms < self._now:
            raise ValueError("cannot schedule in the past (%d < %d)" % (at_ms, self._now))
        handle = self._seq
        self._seq += 1
        heapq.heappush(self._heap, [at_ms, handle, callback])
        return handle

    def cancel(self, handle: int) -> None:
        """Mark a pending event dead; it is skipped when it surfaces."""
        for entry in self._heap:
            if entry[1] == handle:
                entry[2] = None
                return

    def pending(self) -> int:
        return sum(1 for e in self._heap if e[2] is not None)

    def step(self) -> bool:
        """Run the next event. Returns False when the queue is empty."""
        while self._heap:
            at_ms, _, callback = heapq.heappop(self._heap)
            if callback is None:
                continue
            self._now = at_ms
            callback()
            return True
        return False

    def run_until(self, end_ms: int) -> None:
        """Run every event due at or before ``end_ms``, then land on it."""
        while self._heap:
            entry = self._heap[0]
            if entry[0] > end_ms:
                break
            self.step()
        if end_ms > self._now:
            self._now = end_ms

    def run(self) -> None:
        while self.step():
            pass
