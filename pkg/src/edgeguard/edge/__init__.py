from edgeguard.edge.calibration import calibrate
from edgeguard.edge.background import BackgroundModel, DimensionMismatch
from edgeguard.edge.momentum import MomentumState, check_trigger
from edgeguard.edge.ring import ClipRing, NotWarm
from edgeguard.edge.node import AlarmActuator, EdgeNode, EdgeState

__all__ = [
    "calibrate",
    "BackgroundModel",
    "DimensionMismatch",
    "MomentumState",
    "check_trigger",
    "ClipRing",
    "NotWarm",
    "AlarmActuator",
    "EdgeNode",
    "EdgeState",
]
