"""Pre-trigger frame buffer: always the 30 most recent frames."""

from collections import deque

from edgeguard.core.types import CLIP_FRAMES, Clip, Frame, WeaponClass


class NotWarm(Exception):
    """Raised when a snapshot is requested before 30 frames are buffered."""


class ClipRing:
    def __init__(self, capacity: int = CLIP_FRAMES):
        self.capacity = capacity
        self._frames = deque(maxlen=capacity)

    def push(self, frame: Frame) -> None:
        self._frames.append(frame)

    @property
    def count(self) -> int:
        return len(self._frames)

    @property
    def warm(self) -> bool:
        return len(self._frames) == self.capacity

    def snapshot(self, device_id: str, trigger_class: WeaponClass,
                 momentum: float, now: int) -> Clip:
        """Freeze the buffered frames, oldest first, into a Clip."""
        if not self.warm:
            raise NotWarm("ring holds %d of %d frames" % (self.count, self.capacity))
        return Clip(
            device_id=device_id,
            frames=tuple(self._frames),
            trigger_class=trigger_class,
            momentum_at_trigger=momentum,
            captured_at=now,
        )
