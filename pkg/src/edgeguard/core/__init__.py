from edgeguard.core.types import (
    Frame,
    WeaponClass,
    DetectionScores,
    DeviceConfig,
    Clip,
    validate_config,
)
from edgeguard.core.alerts import AlertEvent, AlertState, IllegalTransition, transition
from edgeguard.core.clock import VirtualClock

__all__ = [
    "Frame",
    "WeaponClass",
    "DetectionScores",
    "DeviceConfig",
    "Clip",
    "validate_config",
    "AlertEvent",
    "AlertState",
    "IllegalTransition",
    "transition",
    "VirtualClock",
]
