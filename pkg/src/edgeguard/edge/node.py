"""Per-device pipeline state machine.

Frame flow: calibrate -> buffer -> motion gate -> detect -> momentum ->
trigger. A static scene skips the detector but still pushes zero scores,
so momentum decays during quiet periods instead of freezing. A trigger
snapshots the ring into a Clip, raises the siren, and starts a cooldown
during which further triggers are suppressed (frames keep buffering and
momentum keeps updating so a later burst can re-arm immediately).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, List, Optional, Tuple

from edgeguard.core.types import Clip, DetectionScores, DeviceConfig, Frame, WeaponClass
from edgeguard.edge.background import BackgroundModel
from edgeguard.edge.calibration import calibrate
from edgeguard.edge.momentum import MomentumState, check_trigger
from edgeguard.edge.ring import ClipRing


class EdgeState(Enum):
    CALIBRATING = "calibrating"
    IDLE = "idle"
    ACTIVE = "active"
    COOLDOWN = "cooldown"

    def __str__(self) -> str:
        return self.value


class AlarmActuator:
    """Simulated siren relay: idempotent set with a logged state change."""

    def __init__(self, log: Callable[[int, str, dict], None]):
        self.on = False
        self._log = log

    def set(self, on: bool, now: int) -> bool:
        """Returns the acknowledged state; repeated sets log nothing."""
        if on != self.on:
            self.on = on
            self._log(now, "alarm", {"on": on})
        return self.on


@dataclass
class FrameEffects:
    """What one processed frame did, for the caller to act on."""

    foreground_ratio: float
    scores: DetectionScores
    detector_invoked: bool
    trigger: Optional[Tuple[WeaponClass, float]] = None
    clip: Optional[Clip] = None
    trigger_deferred: bool = False


class EdgeNode:
    """One camera device. Single logical task; never shares mutable state."""

    def __init__(self, device_id: str, config: DeviceConfig, detector,
                 background: Optional[BackgroundModel] = None):
        self.device_id = device_id
        self.config = config
        self.detector = detector
        self.background = background or BackgroundModel()
        self.momentum = MomentumState(config.k, config.n)
        self.ring = ClipRing()
        self.state = EdgeState.CALIBRATING
        self.cooldown_until = 0
        self.events: List[dict] = []
        self.alarm = AlarmActuator(self._log)
        self._last_seq = None

    def log_event(self, t: int, kind: str, payload: dict) -> None:
        """Append one record to the device event log."""
        self.events.append(
            {"t": t, "device_id": self.device_id, "kind": kind, "payload": payload}
        )

    _log = log_event

    def _set_state(self, to: EdgeState, now: int) -> None:
        if to != self.state:
            self._log(now, "state", {"from": str(self.state), "to": str(to)})
            self.state = to

    def apply_config(self, config: DeviceConfig, now: int) -> None:
        """Swap in a new config; a k/n change resets the momentum window."""
        if (config.k, config.n) != (self.config.k, self.config.n):
            self.momentum = MomentumState(config.k, config.n)
        self.config = config
        self._log(now, "config", config.to_json())

    def process_frame(self, frame: Frame) -> FrameEffects:
        if self._last_seq is not None and frame.seq <= self._last_seq:
            raise ValueError(
                "frame seq %d not increasing (last %d)" % (frame.seq, self._last_seq)
            )
        self._last_seq = frame.seq
        now = frame.timestamp

        frame = calibrate(frame, self.config.alpha, self.config.beta)
        self.ring.push(frame)
        ratio = self.background.update(frame)

        if ratio >= self.config.motion_ratio_min:
            scores = self.detector.detect(frame)
            invoked = True
        else:
            scores = DetectionScores(frame_seq=frame.seq)
            invoked = False
        self.momentum.push(scores)

        if self.state is EdgeState.COOLDOWN and now >= self.cooldown_until:
            self._set_state(EdgeState.IDLE, now)

        if self.state is not EdgeState.COOLDOWN:
            if self.state is EdgeState.CALIBRATING:
                self._set_state(EdgeState.IDLE, now)
            self._set_state(
                EdgeState.ACTIVE if invoked else EdgeState.IDLE, now
            )

        effects = FrameEffects(foreground_ratio=ratio, scores=scores, detector_invoked=invoked)

        trig = check_trigger(self.momentum, self.config.thresholds)
        if trig is None or self.state is EdgeState.COOLDOWN:
            return effects

        cls, momentum = trig
        if not self.ring.warm:
            # Deferred, not dropped: if the burst persists the trigger
            # re-fires once 30 frames are buffered.
            self._log(now, "trigger_deferred",
                      {"class": str(cls), "momentum": momentum, "seq": frame.seq})
            effects.trigger_deferred = True
            return effects

        clip = self.ring.snapshot(self.device_id, cls, momentum, now)
        self.alarm.set(True, now)
        self.cooldown_until = now + self.config.cooldown_ms
        self._set_state(EdgeState.COOLDOWN, now)
        self._log(now, "trigger",
                  {"class": str(cls), "momentum": momentum, "seq": frame.seq,
                   "cooldown_until": self.cooldown_until})
        effects.trigger = trig
        effects.clip = clip
        return effects
