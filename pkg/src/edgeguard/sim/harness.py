"""Deterministic discrete-event run of N edge devices against the cloud.

Everything runs on one virtual clock: frame capture, the simulated
network (seeded latency and drops both ways), alert verification, and
notification retries. Devices register, heartbeat, process frames, and
upload clips with the protocol's retry schedule; the cloud deduplicates,
verifies, and replies. A crash point can be injected to exercise log
replay: the service is dropped mid-scenario and rebuilt from its event
log and clip store at the same virtual instant.

The report is computed by folding the cloud event log against the
scenario's ground truth, so ``simharness metrics <logdir>`` reproduces
exactly what ``simharness run`` printed.
"""

from __future__ import annotations

import dataclasses
import json
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from edgeguard.cloud.eventlog import EventLog
from edgeguard.cloud.notify import LogNotifier, WebhookNotifier
from edgeguard.cloud.service import ClipStore, CloudService, NetworkVerifier, StubVerifier
from edgeguard.core.clock import VirtualClock
from edgeguard.core.types import DeviceConfig, WeaponClass
from edgeguard.detectors import Lcg64, ScoreTrace, SyntheticDetector, TraceDetector, split_seed
from edgeguard.edge.node import EdgeNode
from edgeguard.sim.framesource import FrameSource
from edgeguard.sim.metrics import DegenerateLabels, MetricsReport, compute_auc
from edgeguard.sim.scenario import Scenario, scenario_to_json
from edgeguard.verifier.network import NetworkSpec
from edgeguard.verifier.weights import load_weights
from edgeguard.wire import Message, MessageType, RETRY_DELAYS_MS
from edgeguard.wire.gifcodec import encode_gif

GEOMETRIC_SUM = lambda k, n: sum(k**i for i in range(n + 1))  # noqa: E731


class _Network:
    """Seeded latency/drop model applied to every transmission."""

    def __init__(self, model, seed: int):
        self.lo, self.hi = model.latency_ms
        self.drop_probability = model.drop_probability
        self.rng = Lcg64(seed)

    def transmit(self, clock: VirtualClock, deliver) -> bool:
        """Schedule ``deliver`` after a latency draw; False when dropped."""
        if self.drop_probability > 0.0 and self.rng.uniform() < self.drop_probability:
            return False
        latency = self.lo if self.hi == self.lo else int(self.rng.uniform(self.lo, self.hi + 1))
        clock.schedule(latency, deliver)
        return True


class _Router:
    """Level of indirection so in-flight deliveries reach the live service."""

    def __init__(self):
        self.service: Optional[CloudService] = None

    def deliver(self, msg: Message) -> None:
        self.service.handle_message(msg)


class DeviceAgent:
    """Owns one EdgeNode plus its uplink state machine."""

    def __init__(self, clock, spec, scenario: Scenario, router: _Router,
                 network: _Network, detector, trigger_mode: str):
        self.clock = clock
        self.spec = spec
        self.scenario = scenario
        self.router = router
        self.network = network
        config = spec.config
        if trigger_mode == "instant":
            # single-frame baseline: window of one frame, thresholds scaled
            # down by the full geometric weight the momentum window carries
            scale = GEOMETRIC_SUM(config.k, config.n)
            config = dataclasses.replace(
                config,
                n=0,
                thresholds={cls: t / scale for cls, t in config.thresholds.items()},
            )
        self.node = EdgeNode(spec.device_id, config, detector)
        self.frames = FrameSource(spec.width, spec.height, spec.motion_intervals)
        self.frame_period = 1000.0 / spec.fps
        self._msg_count = 0
        self._acked = set()
        self._registered = False
        self._seq = 0

    # -- outbound ---------------------------------------------------------

    def _next_msg_id(self) -> str:
        self._msg_count += 1
        return "%s-%d" % (self.spec.device_id, self._msg_count)

    def _transmit(self, msg: Message) -> None:
        self.network.transmit(self.clock, lambda: self.router.deliver(msg))

    def _send_with_retries(self, msg: Message, attempt: int = 1) -> None:
        if msg.msg_id in self._acked:
            return
        self._transmit(msg)
        if attempt <= len(RETRY_DELAYS_MS):
            delay = RETRY_DELAYS_MS[attempt - 1]
            self.clock.schedule(
                delay, lambda: self._retry(msg, attempt + 1)
            )
        else:
            self.node.log_event(self.clock.now, "upload_failed",
                                {"msg_id": msg.msg_id, "attempts": attempt})

    def _retry(self, msg: Message, attempt: int) -> None:
        if msg.msg_id in self._acked:
            return
        resent = dataclasses.replace(msg, sent_at=self.clock.now)
        self._send_with_retries(resent, attempt)

    def start(self) -> None:
        self._register(attempt=1)
        self._heartbeat()
        self._schedule_next_frame()

    def _register(self, attempt: int) -> None:
        if self._registered or self.clock.now >= self.scenario.duration_ms:
            return
        msg = Message(
            MessageType.REGISTER, self._next_msg_id(), self.spec.device_id,
            self.clock.now,
            meta={"fps": self.spec.fps, "config": self.node.config.to_json()},
        )
        self._transmit(msg)
        delay = RETRY_DELAYS_MS[min(attempt - 1, len(RETRY_DELAYS_MS) - 1)]
        self.clock.schedule(delay, lambda: self._register(attempt + 1))

    def _heartbeat(self) -> None:
        if self.clock.now >= self.scenario.duration_ms:
            return
        if self._registered:
            msg = Message(MessageType.HEARTBEAT, self._next_msg_id(),
                          self.spec.device_id, self.clock.now)
            self._transmit(msg)
        self.clock.schedule(5_000, self._heartbeat)

    def _schedule_next_frame(self) -> None:
        self._seq += 1
        at = round(self._seq * self.frame_period)
        if at > self.scenario.duration_ms:
            return
        self.clock.schedule_at(at, self._on_frame)

    def _on_frame(self) -> None:
        seq = self._seq
        frame = self.frames.frame(seq, self.clock.now)
        effects = self.node.process_frame(frame)
        if effects.clip is not None:
            self._upload(effects.clip)
        self._schedule_next_frame()

    def _upload(self, clip) -> None:
        blob = encode_gif(clip.frames, delay_cs=max(1, round(100.0 / self.spec.fps)))
        msg = Message(
            MessageType.ALERT,
            self._next_msg_id(),
            self.spec.device_id,
            self.clock.now,
            payload=blob,
            meta={
                "trigger_class": str(clip.trigger_class),
                "momentum": clip.momentum_at_trigger,
                "captured_at": clip.captured_at,
                "trigger_seq": clip.trigger_seq,
                "fps": self.spec.fps,
            },
        )
        self.node.log_event(self.clock.now, "upload",
                            {"msg_id": msg.msg_id, "bytes": len(blob),
                             "trigger_seq": clip.trigger_seq})
        self._send_with_retries(msg)

    # -- inbound ----------------------------------------------------------

    def receive(self, msg: Message) -> None:
        now = self.clock.now
        if msg.type is MessageType.REGISTER_ACK:
            self._registered = True
        elif msg.type is MessageType.ACK:
            self._acked.add(msg.meta["ack_of"])
            self.node.log_event(now, "ack", {"msg_id": msg.meta["ack_of"]})
        elif msg.type is MessageType.VERDICT:
            self.node.log_event(now, "verdict",
                                {"alert_id": msg.meta["alert_id"],
                                 "verdict": msg.meta["verdict"]})
            if msg.meta["verdict"] == "rejected":
                self.node.alarm.set(False, now)
        elif msg.type is MessageType.CONFIG_UPDATE:
            config = DeviceConfig.from_json(json.loads(msg.payload.decode()))
            self.node.apply_config(config, now)
        elif msg.type is MessageType.ERROR:
            self.node.log_event(now, "server_error", {"code": msg.meta.get("code")})


class _SimWebhook:
    """Deterministic webhook endpoint: fail the first N attempts per alert."""

    def __init__(self, fail_attempts: int):
        self.fail_attempts = fail_attempts
        self.calls: Dict[str, int] = {}
        self.delivered: List[dict] = []

    def post(self, url: str, body: dict) -> Tuple[bool, str]:
        count = self.calls.get(body["alert_id"], 0) + 1
        self.calls[body["alert_id"]] = count
        if count <= self.fail_attempts:
            return False, "simulated outage (attempt %d)" % count
        self.delivered.append(body)
        return True, "delivered"


def _build_verifier(scenario: Scenario):
    if scenario.verifier_stub is not None:
        stub = scenario.verifier_stub
        return StubVerifier(stub.get("default", 0.9), stub.get("per_device"))
    arch = NetworkSpec.load(scenario.arch_path)
    params = load_weights(scenario.weights_path)
    return NetworkVerifier(arch, params, scenario.resample)


def _build_detector(spec, scenario: Scenario, index: int):
    if spec.profile is not None:
        profile = spec.profile
        if profile.seed == 0:
            profile = dataclasses.replace(
                profile, seed=split_seed(scenario.seed, index, 1))
        return SyntheticDetector(profile), ()
    trace = ScoreTrace.load(spec.trace_path, device_id=spec.device_id)
    return TraceDetector(trace), tuple(trace.ground_truth)


class SimRun:
    """One wired-up scenario; drives the clock and collects artifacts."""

    def __init__(self, scenario: Scenario, trigger_mode: str = "momentum",
                 outdir=None, crash_at_ms: Optional[int] = None):
        self.scenario = scenario
        self.outdir = Path(outdir) if outdir else None
        self.crash_at_ms = crash_at_ms
        self.clock = VirtualClock()
        self.router = _Router()
        self.network = _Network(scenario.network, split_seed(scenario.seed, 0xAE))
        self.webhook = _SimWebhook(scenario.webhook_fail_attempts)
        notifier = (WebhookNotifier(scenario.webhook_url or "sim://webhook",
                                    post=self.webhook.post)
                    if scenario.notifier_channel == "webhook" else LogNotifier())
        self.log = EventLog()
        self.clips = ClipStore(self.outdir / "clips" if self.outdir else None)
        self.verifier = _build_verifier(scenario)
        self.notifier = notifier
        self.router.service = CloudService(
            self.clock, self.verifier, notifier, self._send_to_device,
            event_log=self.log, clip_store=self.clips,
            verify_latency_ms=scenario.verify_latency_ms,
        )
        self.truth: Dict[str, tuple] = {}
        self.agents: Dict[str, DeviceAgent] = {}
        for index, spec in enumerate(scenario.devices):
            detector, trace_truth = _build_detector(spec, scenario, index)
            agent = DeviceAgent(self.clock, spec, scenario, self.router,
                                self.network, detector, trigger_mode)
            self.agents[spec.device_id] = agent
            self.truth[spec.device_id] = spec.ground_truth or trace_truth

    def _send_to_device(self, device_id: str, msg: Message) -> None:
        agent = self.agents.get(device_id)
        if agent is not None:
            self.network.transmit(self.clock, lambda: agent.receive(msg))

    def _crash_and_rebuild(self) -> None:
        old = self.router.service
        old.shutdown()
        records = list(self.log.records)
        self.log.append(self.clock.now, "service_restart", {"replayed": len(records)})
        self.router.service = CloudService.rebuild(
            records, self.clock, self.verifier, self.notifier,
            self._send_to_device, clip_store=self.clips, event_log=self.log,
            verify_latency_ms=self.scenario.verify_latency_ms,
        )

    def run(self) -> MetricsReport:
        for agent in self.agents.values():
            agent.start()
        if self.crash_at_ms is not None:
            self.clock.schedule_at(self.crash_at_ms, self._crash_and_rebuild)
        self.clock.run()
        report = report_from_log(self.log.records, self.truth)
        if self.outdir:
            self._write_artifacts(report)
        return report

    def _write_artifacts(self, report: MetricsReport) -> None:
        outdir = self.outdir
        outdir.mkdir(parents=True, exist_ok=True)
        self.log.dump(outdir / "events.jsonl")
        devices_dir = outdir / "devices"
        devices_dir.mkdir(exist_ok=True)
        for device_id, agent in self.agents.items():
            with open(devices_dir / ("%s.jsonl" % device_id), "w") as fh:
                for event in agent.node.events:
                    fh.write(json.dumps(event, sort_keys=True) + "\n")
        (outdir / "ground_truth.json").write_text(_truth_json(self.truth))
        (outdir / "scenario.json").write_text(
            json.dumps(scenario_to_json(self.scenario), indent=2, sort_keys=True) + "\n")
        (outdir / "report.json").write_text(
            json.dumps(report.to_json(), indent=2, sort_keys=True) + "\n")


def _truth_json(truth: Dict[str, tuple]) -> str:
    obj = {
        device_id: [
            {"start_seq": iv.start_seq, "end_seq": iv.end_seq, "label": iv.label}
            for iv in intervals
        ]
        for device_id, intervals in truth.items()
    }
    return json.dumps({"devices": obj}, indent=2, sort_keys=True) + "\n"


def run_scenario(scenario: Scenario, outdir=None, seed: Optional[int] = None,
                 crash_at_ms: Optional[int] = None,
                 trigger_mode: str = "momentum") -> MetricsReport:
    if seed is not None:
        scenario = dataclasses.replace(scenario, seed=seed)
    return SimRun(scenario, trigger_mode=trigger_mode, outdir=outdir,
                  crash_at_ms=crash_at_ms).run()


def compare_momentum(scenario: Scenario, seed: Optional[int] = None) -> dict:
    """Run twice: momentum trigger vs single-frame thresholding."""
    on = run_scenario(scenario, seed=seed, trigger_mode="momentum")
    off = run_scenario(scenario, seed=seed, trigger_mode="instant")
    return {"momentum_on": on, "momentum_off": off}


# -- report folding ---------------------------------------------------------

def report_from_log(records: List[dict], truth: Dict[str, tuple]) -> MetricsReport:
    """Fold cloud event-log records into the alert-level metrics report."""
    alerts: Dict[str, dict] = {}
    for record in records:
        kind, data, t = record["kind"], record["data"], record["t"]
        if kind == "alert_received":
            alerts[data["alert_id"]] = {
                "alert_id": data["alert_id"],
                "device_id": data["device_id"],
                "trigger_seq": data["trigger_seq"],
                "captured_at": data["captured_at"],
                "verdict": None,
                "score": None,
                "verdict_at": None,
            }
        elif kind == "alert_state" and data["to"] in ("confirmed", "rejected"):
            entry = alerts[data["alert_id"]]
            entry["verdict"] = data["to"]
            entry["score"] = data.get("score")
            entry["verdict_at"] = t

    def in_robbery(device_id: str, seq: int) -> bool:
        return any(iv.label == "robbery" and iv.contains(seq)
                   for iv in truth.get(device_id, ()))

    report = MetricsReport()
    confirmed_seqs: Dict[str, list] = {}
    scores, labels = [], []
    for alert in alerts.values():
        label = 1 if in_robbery(alert["device_id"], alert["trigger_seq"]) else 0
        alert["label"] = "robbery" if label else "normal"
        if alert["score"] is not None:
            scores.append(alert["score"])
            labels.append(label)
        if alert["verdict"] == "confirmed":
            confirmed_seqs.setdefault(alert["device_id"], []).append(alert["trigger_seq"])
            if label:
                report.tp += 1
            else:
                report.fp += 1
        if alert["verdict_at"] is not None and alert["captured_at"] is not None:
            report.latencies_ms.append(alert["verdict_at"] - alert["captured_at"])
        report.alerts.append(alert)

    for device_id, intervals in truth.items():
        seqs = confirmed_seqs.get(device_id, [])
        for iv in intervals:
            hit = any(iv.contains(seq) for seq in seqs)
            if iv.label == "robbery" and not hit:
                report.fn += 1
            elif iv.label == "normal" and not hit:
                report.tn += 1

    report.alerts.sort(key=lambda a: a["alert_id"])
    try:
        report.auc = compute_auc(scores, labels)
    except (DegenerateLabels, ValueError):
        report.auc = None
    return report
