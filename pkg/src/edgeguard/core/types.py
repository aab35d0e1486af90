"""Shared domain value types.

Everything here is immutable after construction and safe to share across
threads. Pixel data is kept as raw ``bytes`` (row-major, 8-bit grayscale);
numeric code wraps it with ``numpy.frombuffer`` without copying.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum


class WeaponClass(Enum):
    GUN = "gun"
    KNIFE = "knife"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Frame:
    """One grayscale frame with capture metadata.

    ``pixels`` holds ``width * height`` intensities in row-major order.
    ``timestamp`` is virtual milliseconds; ``seq`` increases strictly
    within one device stream.
    """

    width: int
    height: int
    pixels: bytes
    timestamp: int
    seq: int

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError("frame dimensions must be positive")
        if len(self.pixels) != self.width * self.height:
            raise ValueError(
                "pixel count %d does not match %dx%d"
                % (len(self.pixels), self.width, self.height)
            )


@dataclass(frozen=True)
class DetectionScores:
    """Per-class confidences for one frame, each in [0, 1].

    A class that was not detected scores exactly 0.0.
    """

    frame_seq: int
    q_gun: float = 0.0
    q_knife: float = 0.0

    def __post_init__(self):
        for name, q in (("q_gun", self.q_gun), ("q_knife", self.q_knife)):
            if not 0.0 <= q <= 1.0:
                raise ValueError("%s=%r out of [0, 1]" % (name, q))

    def get(self, cls: WeaponClass) -> float:
        return self.q_gun if cls is WeaponClass.GUN else self.q_knife


# Defaults for the momentum trigger: window exponent bound n=5 (queue of
# six confidences), decay k=0.5, per-class thresholds 1.05 / 0.7.
DEFAULT_K = 0.5
DEFAULT_N = 5
DEFAULT_THRESHOLDS = {WeaponClass.GUN: 1.05, WeaponClass.KNIFE: 0.7}


@dataclass(frozen=True)
class DeviceConfig:
    """Per-device tuning knobs.

    alpha/beta are the capture calibration gain and offset, k/n the
    momentum decay and window bound (queue capacity is n+1), thresholds
    the per-class trigger levels.
    """

    alpha: float = 1.0
    beta: float = 0.0
    k: float = DEFAULT_K
    n: int = DEFAULT_N
    thresholds: dict = field(
        default_factory=lambda: dict(DEFAULT_THRESHOLDS)
    )
    cooldown_ms: int = 10_000
    motion_ratio_min: float = 0.01

    @property
    def queue_capacity(self) -> int:
        return self.n + 1

    def to_json(self) -> dict:
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "k": self.k,
            "n": self.n,
            "thresholds": {str(c): t for c, t in sorted(self.thresholds.items(), key=lambda kv: kv[0].value)},
            "cooldown_ms": self.cooldown_ms,
            "motion_ratio_min": self.motion_ratio_min,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "DeviceConfig":
        kwargs = dict(obj)
        if "thresholds" in kwargs:
            kwargs["thresholds"] = {
                WeaponClass(name): float(v) for name, v in kwargs["thresholds"].items()
            }
        return cls(**kwargs)


def validate_config(cfg: DeviceConfig) -> list:
    """Return every violated config invariant; an empty list means ok.

    Total function: never raises, reports all problems at once so a
    console can render them per field.
    """
    errors = []
    if not cfg.alpha > 0:
        errors.append("alpha must be > 0")
    if not 0.0 < cfg.k < 1.0:
        errors.append("k out of (0,1)")
    if not (isinstance(cfg.n, int) and cfg.n >= 0):
        errors.append("n must be a non-negative integer")
    for cls in WeaponClass:
        t = cfg.thresholds.get(cls)
        if t is None:
            errors.append("missing threshold for %s" % cls)
        elif not t > 0:
            errors.append("threshold for %s must be > 0" % cls)
    for cls in cfg.thresholds:
        if not isinstance(cls, WeaponClass):
            errors.append("unknown threshold class %r" % (cls,))
    if cfg.cooldown_ms < 0:
        errors.append("cooldown_ms must be >= 0")
    if not 0.0 <= cfg.motion_ratio_min <= 1.0:
        errors.append("motion_ratio_min out of [0,1]")
    return errors


CLIP_FRAMES = 30


@dataclass(frozen=True)
class Clip:
    """The 30-frame pre-trigger buffer snapshot shipped to the verifier."""

    device_id: str
    frames: tuple
    trigger_class: WeaponClass
    momentum_at_trigger: float
    captured_at: int

    def __post_init__(self):
        if len(self.frames) != CLIP_FRAMES:
            raise ValueError("clip must hold exactly %d frames, got %d" % (CLIP_FRAMES, len(self.frames)))
        seqs = [f.seq for f in self.frames]
        if any(b <= a for a, b in zip(seqs, seqs[1:])):
            raise ValueError("clip frame seq values must strictly increase")

    @property
    def trigger_seq(self) -> int:
        return self.frames[-1].seq
