from edgeguard.cloud.eventlog import CorruptLog, EventLog, read_log
from edgeguard.cloud.notify import LogNotifier, WebhookNotifier
from edgeguard.cloud.service import ClipStore, CloudService, StubVerifier, NetworkVerifier

__all__ = [
    "CorruptLog",
    "EventLog",
    "read_log",
    "LogNotifier",
    "WebhookNotifier",
    "ClipStore",
    "CloudService",
    "StubVerifier",
    "NetworkVerifier",
]
