"""Alert lifecycle: one record per suspected robbery.

States move along a fixed graph; ``history`` is append-only so the full
path survives into the event log.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional


class AlertState(Enum):
    PENDING = "pending"
    VERIFYING = "verifying"
    CONFIRMED = "confirmed"
    REJECTED = "rejected"
    NOTIFIED = "notified"
    DISMISSED = "dismissed"

    def __str__(self) -> str:
        return self.value


TERMINAL_STATES = frozenset({AlertState.REJECTED, AlertState.NOTIFIED, AlertState.DISMISSED})

# Automatic pipeline edges; Dismissed is additionally reachable from any
# non-terminal state via operator action.
_EDGES = {
    AlertState.PENDING: {AlertState.VERIFYING},
    AlertState.VERIFYING: {AlertState.CONFIRMED, AlertState.REJECTED},
    AlertState.CONFIRMED: {AlertState.NOTIFIED},
}


class IllegalTransition(Exception):
    def __init__(self, current: AlertState, to: AlertState):
        super().__init__("illegal alert transition %s -> %s" % (current, to))
        self.current = current
        self.to = to


def allowed_transitions(state: AlertState) -> frozenset:
    if state in TERMINAL_STATES:
        return frozenset()
    return frozenset(_EDGES.get(state, set()) | {AlertState.DISMISSED})


@dataclass(frozen=True)
class AlertEvent:
    """Lifecycle record for one suspected robbery.

    ``history`` is a tuple of (state, virtual ms, actor) entries, oldest
    first; the current state is always the last entry's state.
    """

    alert_id: str
    device_id: str
    clip_ref: str
    trigger_class: str
    trigger_seq: int
    created_at: int
    state: AlertState = AlertState.PENDING
    verifier_score: Optional[float] = None
    history: tuple = field(default_factory=tuple)

    @classmethod
    def new(cls, alert_id, device_id, clip_ref, trigger_class, trigger_seq, now, actor="edge"):
        return cls(
            alert_id=alert_id,
            device_id=device_id,
            clip_ref=clip_ref,
            trigger_class=trigger_class,
            trigger_seq=trigger_seq,
            created_at=now,
            history=((AlertState.PENDING.value, now, actor),),
        )

    @property
    def terminal(self) -> bool:
        return self.state in TERMINAL_STATES


def transition(alert: AlertEvent, to: AlertState, actor: str, now: int,
               score: Optional[float] = None) -> AlertEvent:
    """Move an alert to a new state, appending to its history.

    Raises IllegalTransition when the edge is not in the legal graph
    (including any move out of a terminal state).
    """
    if to not in allowed_transitions(alert.state):
        raise IllegalTransition(alert.state, to)
    return replace(
        alert,
        state=to,
        verifier_score=score if score is not None else alert.verifier_score,
        history=alert.history + ((to.value, now, actor),),
    )
