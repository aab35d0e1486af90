"""Alert verification service.

Sans-IO core: it consumes decoded protocol messages, mutates state, logs
every change to the event log, and emits outbound messages through a
``send`` callback. Timers run on the injected clock, so the same code is
driven by the deterministic harness and by the live server.

Verification is asynchronous: an ALERT is acknowledged immediately,
verified after ``verify_latency_ms`` (bounded to ``max_inflight``
concurrent verifications; excess alerts stay Pending and start as slots
free), and the verdict goes back to the device as a VERDICT message.
Confirmed alerts enter the notification pipeline with the shared
backoff-and-retry schedule.

Because state is a pure fold over the event log, ``CloudService.rebuild``
reconstructs a mid-scenario service from its log and clip store, then
re-schedules outstanding verifications and notification attempts at the
times they were already due.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

from edgeguard.core.alerts import AlertEvent, AlertState, IllegalTransition, transition
from edgeguard.core.clock import VirtualClock
from edgeguard.core.types import DeviceConfig, validate_config
from edgeguard.cloud.eventlog import EventLog
from edgeguard.verifier import infer, resample_clip
from edgeguard.verifier.network import NetworkSpec
from edgeguard.verifier.resample import ResampleConfig
from edgeguard.wire import Message, MessageType, RETRY_DELAYS_MS
from edgeguard.wire.gifcodec import Malformed, decode_gif

HEARTBEAT_INTERVAL_MS = 5_000
ONLINE_WINDOW_MS = 15_000  # three heartbeat intervals


class UnknownDevice(Exception):
    pass


class StubVerifier:
    """Fixed score per device (or default); stands in for the network."""

    def __init__(self, default: float = 0.9, per_device: Optional[dict] = None):
        self.default = default
        self.per_device = dict(per_device or {})

    def score(self, frames, native_fps: float, device_id: str) -> float:
        return float(self.per_device.get(device_id, self.default))


class NetworkVerifier:
    """Real forward pass: resample the clip, then run the network."""

    def __init__(self, arch: NetworkSpec, params, resample: ResampleConfig):
        self.arch = arch
        self.params = params
        self.resample = resample

    def score(self, frames, native_fps: float, device_id: str) -> float:
        selected = resample_clip(frames, native_fps, self.resample)
        return infer(self.arch, self.params, selected)


class ClipStore:
    """Alert clips by id, in memory with an optional directory mirror."""

    def __init__(self, directory=None):
        self._blobs: Dict[str, bytes] = {}
        self._dir = Path(directory) if directory else None
        if self._dir:
            self._dir.mkdir(parents=True, exist_ok=True)
            for path in sorted(self._dir.glob("*.gif")):
                self._blobs[path.stem] = path.read_bytes()

    def put(self, alert_id: str, blob: bytes) -> str:
        self._blobs[alert_id] = blob
        if self._dir:
            (self._dir / ("%s.gif" % alert_id)).write_bytes(blob)
        return "clips/%s.gif" % alert_id

    def get(self, alert_id: str) -> bytes:
        return self._blobs[alert_id]

    def __contains__(self, alert_id: str) -> bool:
        return alert_id in self._blobs


@dataclass
class DeviceRecord:
    device_id: str
    config: DeviceConfig
    config_version: int = 1
    fps: float = 30.0
    last_heartbeat: int = 0
    queued_config: Optional[DeviceConfig] = None
    queued_version: Optional[int] = None

    def online(self, now: int) -> bool:
        return now - self.last_heartbeat <= ONLINE_WINDOW_MS

    def to_json(self, now: int) -> dict:
        return {
            "device_id": self.device_id,
            "config": self.config.to_json(),
            "config_version": self.config_version,
            "fps": self.fps,
            "last_heartbeat": self.last_heartbeat,
            "online": self.online(now),
            "queued_config": self.queued_config.to_json() if self.queued_config else None,
        }


def alert_to_json(alert: AlertEvent) -> dict:
    return {
        "alert_id": alert.alert_id,
        "device_id": alert.device_id,
        "state": str(alert.state),
        "trigger_class": alert.trigger_class,
        "trigger_seq": alert.trigger_seq,
        "created_at": alert.created_at,
        "verifier_score": alert.verifier_score,
        "clip_ref": alert.clip_ref,
        "history": [list(entry) for entry in alert.history],
    }


class CloudService:
    def __init__(
        self,
        clock: VirtualClock,
        verifier,
        notifier,
        send: Callable[[str, Message], None],
        event_log: Optional[EventLog] = None,
        clip_store: Optional[ClipStore] = None,
        verify_latency_ms: int = 500,
        max_inflight: int = 64,
    ):
        self.clock = clock
        self.verifier = verifier
        self.notifier = notifier
        self.send = send
        self.log = event_log if event_log is not None else EventLog()
        self.clips = clip_store if clip_store is not None else ClipStore()
        self.verify_latency_ms = verify_latency_ms
        self.max_inflight = max_inflight

        self.devices: Dict[str, DeviceRecord] = {}
        self.alerts: Dict[str, AlertEvent] = {}
        self._dedup: Dict[Tuple[str, str], str] = {}
        self._alert_count = 0
        self._msg_count = 0
        self._inflight = 0
        self._waiting: List[str] = []
        self._notify_attempts: Dict[str, int] = {}
        self._native_fps: Dict[str, float] = {}
        self._frames_cache: Dict[str, list] = {}
        self._handles: List[int] = []
        self._dead = False
        self.observers: List[Callable[[str, dict], None]] = []

    # -- plumbing ---------------------------------------------------------

    def _emit(self, kind: str, data: dict) -> None:
        self.log.append(self.clock.now, kind, data)
        for observer in self.observers:
            observer(kind, data)

    def _next_msg_id(self) -> str:
        self._msg_count += 1
        return "cloud-%d" % self._msg_count

    def _reply(self, device_id: str, mtype: MessageType, meta: dict, payload: bytes = b"") -> None:
        self.send(
            device_id,
            Message(mtype, self._next_msg_id(), device_id, self.clock.now,
                    payload=payload, meta=meta),
        )

    def _schedule(self, delay_ms: int, callback) -> None:
        def guarded():
            if not self._dead:
                callback()
        self._handles.append(self.clock.schedule(delay_ms, guarded))

    def shutdown(self) -> None:
        """Simulated crash: drop all timers; state lives on only in the log."""
        self._dead = True
        for handle in self._handles:
            self.clock.cancel(handle)
        self._handles.clear()

    # -- message entry point ----------------------------------------------

    def handle_message(self, msg: Message) -> None:
        if msg.type is MessageType.REGISTER:
            self._handle_register(msg)
        elif msg.type is MessageType.HEARTBEAT:
            self._handle_heartbeat(msg)
        elif msg.type is MessageType.ALERT:
            self._handle_alert(msg)
        else:
            self._emit("protocol_fault",
                       {"device_id": msg.device_id,
                        "reason": "unexpected %s from device" % msg.type.value})

    def _handle_register(self, msg: Message) -> None:
        now = self.clock.now
        config = DeviceConfig.from_json(msg.meta["config"]) if "config" in msg.meta else DeviceConfig()
        fps = float(msg.meta.get("fps", 30.0))
        record = self.devices.get(msg.device_id)
        if record is None:
            record = DeviceRecord(msg.device_id, config, fps=fps, last_heartbeat=now)
            self.devices[msg.device_id] = record
        else:
            record.fps = fps
            record.last_heartbeat = now
        self._emit("device_registered",
                   {"device_id": msg.device_id, "fps": fps, "config": record.config.to_json()})
        self._reply(msg.device_id, MessageType.REGISTER_ACK, {"ack_of": msg.msg_id})
        if record.queued_config is not None:
            self._deliver_config(record)

    def _handle_heartbeat(self, msg: Message) -> None:
        record = self.devices.get(msg.device_id)
        if record is None:
            self._reply(msg.device_id, MessageType.ERROR,
                        {"code": "unknown_device", "detail": msg.device_id})
            return
        record.last_heartbeat = self.clock.now
        self._emit("heartbeat", {"device_id": msg.device_id})

    def _handle_alert(self, msg: Message) -> None:
        now = self.clock.now
        record = self.devices.get(msg.device_id)
        if record is None:
            self._emit("protocol_fault",
                       {"device_id": msg.device_id, "reason": "alert from unregistered device"})
            self._reply(msg.device_id, MessageType.ERROR,
                        {"code": "unknown_device", "detail": msg.device_id})
            return

        key = (msg.device_id, msg.msg_id)
        if key in self._dedup:
            # retried delivery: same effect exactly once, ACK again
            self._emit("duplicate_alert", {"device_id": msg.device_id, "msg_id": msg.msg_id})
            self._reply(msg.device_id, MessageType.ACK, {"ack_of": msg.msg_id})
            return

        try:
            frames = decode_gif(msg.payload)
        except Malformed as exc:
            self._emit("protocol_fault",
                       {"device_id": msg.device_id, "reason": "bad clip: %s" % exc})
            self._reply(msg.device_id, MessageType.ERROR,
                        {"code": "bad_payload", "detail": "clip is not a valid GIF"})
            return

        self._alert_count += 1
        alert_id = "alert-%06d" % self._alert_count
        clip_ref = self.clips.put(alert_id, msg.payload)
        self._frames_cache[alert_id] = frames
        alert = AlertEvent.new(
            alert_id,
            msg.device_id,
            clip_ref,
            trigger_class=str(msg.meta.get("trigger_class", "gun")),
            trigger_seq=int(msg.meta.get("trigger_seq", -1)),
            now=now,
        )
        self.alerts[alert_id] = alert
        self._dedup[key] = alert_id
        self._native_fps[alert_id] = float(msg.meta.get("fps", record.fps))
        self._emit("alert_received",
                   {"alert_id": alert_id, "device_id": msg.device_id, "msg_id": msg.msg_id,
                    "trigger_class": alert.trigger_class, "trigger_seq": alert.trigger_seq,
                    "momentum": msg.meta.get("momentum"),
                    "captured_at": msg.meta.get("captured_at"),
                    "fps": msg.meta.get("fps", record.fps), "clip_ref": clip_ref})
        self._reply(msg.device_id, MessageType.ACK, {"ack_of": msg.msg_id})
        self._maybe_start_verification(alert_id)

    # -- verification -----------------------------------------------------

    def _maybe_start_verification(self, alert_id: str) -> None:
        if self._inflight >= self.max_inflight:
            self._waiting.append(alert_id)
            self._emit("verify_queued", {"alert_id": alert_id})
            return
        self._start_verification(alert_id)

    def _start_verification(self, alert_id: str) -> None:
        self._transition(alert_id, AlertState.VERIFYING, "cloud")
        self._inflight += 1
        self._schedule(self.verify_latency_ms,
                       lambda: self._finish_verification(alert_id))

    def _finish_verification(self, alert_id: str) -> None:
        self._inflight -= 1
        alert = self.alerts[alert_id]
        if alert.state is AlertState.VERIFYING:
            native_fps = self._native_fps[alert_id]
            frames = self._frames_cache.get(alert_id)
            if frames is None:
                frames = decode_gif(self.clips.get(alert_id))
                self._frames_cache[alert_id] = frames
            score = self.verifier.score(frames, native_fps, alert.device_id)
            verdict = AlertState.CONFIRMED if score > 0.5 else AlertState.REJECTED
            self._transition(alert_id, verdict, "verifier", score=score)
            self._reply(alert.device_id, MessageType.VERDICT,
                        {"alert_id": alert_id, "verdict": str(verdict),
                         "score": score})
            self._emit("verdict_sent",
                       {"alert_id": alert_id, "device_id": alert.device_id,
                        "verdict": str(verdict)})
            if verdict is AlertState.CONFIRMED:
                self._notify(alert_id, attempt=1)
        if self._waiting:
            self._start_verification(self._waiting.pop(0))

    def _transition(self, alert_id: str, to: AlertState, actor: str,
                    score: Optional[float] = None) -> AlertEvent:
        alert = self.alerts[alert_id]
        updated = transition(alert, to, actor, self.clock.now, score=score)
        self.alerts[alert_id] = updated
        data = {"alert_id": alert_id, "from": str(alert.state), "to": str(to), "actor": actor}
        if score is not None:
            data["score"] = score
        self._emit("alert_state", data)
        return updated

    # -- notifications ------------------------------------------------------

    def _notify(self, alert_id: str, attempt: int) -> None:
        alert = self.alerts[alert_id]
        if alert.state is not AlertState.CONFIRMED:
            return  # dismissed while waiting for a retry
        self._notify_attempts[alert_id] = attempt
        body = {
            "alert_id": alert_id,
            "device_id": alert.device_id,
            "score": alert.verifier_score,
            "clip_url": "/alerts/%s/clip" % alert_id,
        }
        ok, detail = self.notifier.deliver(body)
        self._emit("notify_attempt",
                   {"alert_id": alert_id, "attempt": attempt, "ok": ok,
                    "channel": self.notifier.channel, "detail": detail})
        if ok:
            self._transition(alert_id, AlertState.NOTIFIED, "notifier")
            self._emit("notification",
                       {"alert_id": alert_id, "channel": self.notifier.channel,
                        "ok": True, "attempts": attempt})
        elif attempt <= len(RETRY_DELAYS_MS):
            delay = RETRY_DELAYS_MS[attempt - 1]
            self._schedule(delay, lambda: self._notify(alert_id, attempt + 1))
        else:
            # alert stays Confirmed with the failure on record
            self._emit("notification",
                       {"alert_id": alert_id, "channel": self.notifier.channel,
                        "ok": False, "attempts": attempt, "detail": detail})

    # -- console operations -------------------------------------------------

    def dismiss(self, alert_id: str, actor: str = "console") -> AlertEvent:
        if alert_id not in self.alerts:
            raise KeyError(alert_id)
        return self._transition(alert_id, AlertState.DISMISSED, actor)

    def update_config(self, device_id: str, config: DeviceConfig) -> dict:
        record = self.devices.get(device_id)
        if record is None:
            raise UnknownDevice(device_id)
        errors = validate_config(config)
        if errors:
            return {"ok": False, "errors": errors}
        version = max(record.config_version, record.queued_version or 0) + 1
        if record.online(self.clock.now):
            record.config = config
            record.config_version = version
            record.queued_config = None
            record.queued_version = None
            self._emit("config_updated",
                       {"device_id": device_id, "config": config.to_json(),
                        "version": version, "queued": False})
            self._reply(device_id, MessageType.CONFIG_UPDATE, {"version": version},
                        payload=json.dumps(config.to_json(), sort_keys=True,
                                           separators=(",", ":")).encode())
        else:
            record.queued_config = config
            record.queued_version = version
            self._emit("config_updated",
                       {"device_id": device_id, "config": config.to_json(),
                        "version": version, "queued": True})
        return {"ok": True, "version": version, "queued": not record.online(self.clock.now)}

    def _deliver_config(self, record: DeviceRecord) -> None:
        config, version = record.queued_config, record.queued_version
        record.config = config
        record.config_version = version
        record.queued_config = None
        record.queued_version = None
        self._emit("config_delivered", {"device_id": record.device_id, "version": version})
        self._reply(record.device_id, MessageType.CONFIG_UPDATE, {"version": version},
                    payload=json.dumps(config.to_json(), sort_keys=True,
                                       separators=(",", ":")).encode())

    # -- rebuild ------------------------------------------------------------

    @classmethod
    def rebuild(cls, records: List[dict], clock, verifier, notifier, send,
                clip_store: ClipStore, event_log: Optional[EventLog] = None,
                verify_latency_ms: int = 500, max_inflight: int = 64) -> "CloudService":
        """Fold a log into a fresh service and resume outstanding work.

        The new service continues appending to ``event_log`` (pass the
        original records first when persisting to the same file).
        """
        service = cls(clock, verifier, notifier, send, event_log=event_log,
                      clip_store=clip_store, verify_latency_ms=verify_latency_ms,
                      max_inflight=max_inflight)
        if event_log is None:
            service.log.resume(records)

        received_at: Dict[str, int] = {}
        verify_started_at: Dict[str, int] = {}
        last_attempt_at: Dict[str, int] = {}
        notify_final: Dict[str, bool] = {}

        for record in records:
            kind, data, t = record["kind"], record["data"], record["t"]
            if kind == "device_registered":
                device_id = data["device_id"]
                existing = service.devices.get(device_id)
                if existing is None:
                    service.devices[device_id] = DeviceRecord(
                        device_id, DeviceConfig.from_json(data["config"]),
                        fps=data["fps"], last_heartbeat=t)
                else:
                    existing.fps = data["fps"]
                    existing.last_heartbeat = t
            elif kind == "heartbeat":
                service.devices[data["device_id"]].last_heartbeat = t
            elif kind == "alert_received":
                alert_id = data["alert_id"]
                service._alert_count += 1
                service._dedup[(data["device_id"], data["msg_id"])] = alert_id
                service._native_fps[alert_id] = float(data["fps"])
                service.alerts[alert_id] = AlertEvent.new(
                    alert_id, data["device_id"], data["clip_ref"],
                    trigger_class=data["trigger_class"],
                    trigger_seq=data["trigger_seq"], now=t)
                received_at[alert_id] = t
            elif kind == "alert_state":
                alert_id = data["alert_id"]
                alert = service.alerts[alert_id]
                to = AlertState(data["to"])
                service.alerts[alert_id] = transition(
                    alert, to, data["actor"], t, score=data.get("score"))
                if to is AlertState.VERIFYING:
                    verify_started_at[alert_id] = t
            elif kind == "notify_attempt":
                service._notify_attempts[data["alert_id"]] = data["attempt"]
                last_attempt_at[data["alert_id"]] = t
            elif kind == "notification":
                notify_final[data["alert_id"]] = data["ok"]
            elif kind == "config_updated":
                record_dev = service.devices[data["device_id"]]
                config = DeviceConfig.from_json(data["config"])
                if data["queued"]:
                    record_dev.queued_config = config
                    record_dev.queued_version = data["version"]
                else:
                    record_dev.config = config
                    record_dev.config_version = data["version"]
            elif kind == "config_delivered":
                record_dev = service.devices[data["device_id"]]
                if record_dev.queued_config is not None:
                    record_dev.config = record_dev.queued_config
                    record_dev.config_version = record_dev.queued_version
                    record_dev.queued_config = None
                    record_dev.queued_version = None

        now = clock.now
        # resume verifications at their original due times
        for alert_id, alert in service.alerts.items():
            if alert.state is AlertState.VERIFYING:
                due = max(verify_started_at[alert_id] + verify_latency_ms, now)
                service._inflight += 1
                service._schedule(due - now, lambda a=alert_id: service._finish_verification(a))
            elif alert.state is AlertState.PENDING:
                service._maybe_start_verification(alert_id)
            elif alert.state is AlertState.CONFIRMED and alert_id not in notify_final:
                attempts = service._notify_attempts.get(alert_id, 0)
                if attempts == 0:
                    service._notify(alert_id, attempt=1)
                elif attempts <= len(RETRY_DELAYS_MS):
                    due = max(last_attempt_at[alert_id] + RETRY_DELAYS_MS[attempts - 1], now)
                    service._schedule(due - now,
                                      lambda a=alert_id, k=attempts: service._notify(a, k + 1))
        return service
