"""Scenario description and JSON loading.

A scenario pins everything a run needs: the seed, device fleet (frame
geometry, capture rate, motion script, detector backend, ground truth),
the network model, verifier mode, and duration. Same scenario + same
seed means byte-identical logs and reports.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Tuple

from edgeguard.core.types import DeviceConfig, WeaponClass, validate_config
from edgeguard.detectors import Burst, GroundTruthInterval, ScoreTrace, SyntheticProfile
from edgeguard.verifier.resample import ResampleConfig


class ScenarioError(Exception):
    pass


@dataclass(frozen=True)
class NetworkModel:
    latency_ms: Tuple[int, int]  # (lo, hi); fixed when lo == hi
    drop_probability: float = 0.0

    def __post_init__(self):
        lo, hi = self.latency_ms
        if lo < 0 or hi < lo:
            raise ScenarioError("latency range must satisfy 0 <= lo <= hi")
        if not 0.0 <= self.drop_probability < 1.0:
            raise ScenarioError("drop_probability out of [0,1)")


@dataclass(frozen=True)
class DeviceSpec:
    device_id: str
    fps: float = 15.0
    width: int = 64
    height: int = 48
    config: DeviceConfig = field(default_factory=DeviceConfig)
    motion_intervals: tuple = ()  # inclusive (start_seq, end_seq) pairs
    profile: Optional[SyntheticProfile] = None
    trace_path: Optional[str] = None
    ground_truth: tuple = ()

    def __post_init__(self):
        if self.fps <= 0:
            raise ScenarioError("device fps must be positive")
        if (self.profile is None) == (self.trace_path is None):
            raise ScenarioError(
                "device %r needs exactly one backend (synthetic profile or trace)"
                % self.device_id
            )
        errors = validate_config(self.config)
        if errors:
            raise ScenarioError("device %r config invalid: %s" % (self.device_id, "; ".join(errors)))


@dataclass(frozen=True)
class Scenario:
    seed: int
    duration_ms: int
    devices: tuple
    network: NetworkModel = NetworkModel((0, 0), 0.0)
    resample: ResampleConfig = ResampleConfig(15, 2)
    verifier_stub: Optional[dict] = None  # {"default": x, "per_device": {...}}
    weights_path: Optional[str] = None
    arch_path: Optional[str] = None
    verify_latency_ms: int = 500
    notifier_channel: str = "log"
    webhook_url: Optional[str] = None
    webhook_fail_attempts: int = 0  # simulated webhook: fail the first N attempts

    def __post_init__(self):
        if self.duration_ms <= 0:
            raise ScenarioError("duration_ms must be positive")
        if not self.devices:
            raise ScenarioError("scenario needs at least one device")
        ids = [d.device_id for d in self.devices]
        if len(set(ids)) != len(ids):
            raise ScenarioError("duplicate device ids")
        if (self.verifier_stub is None) == (self.weights_path is None):
            raise ScenarioError("verifier must be exactly one of stub or weights file")
        for device in self.devices:
            if device.fps > self.resample.fps:
                raise ScenarioError(
                    "device %r captures at %g fps, above the verifier sampling rate %g; "
                    "its 30-frame clips would span less than %gs"
                    % (device.device_id, device.fps, self.resample.fps, self.resample.seconds)
                )
        if self.notifier_channel not in ("log", "webhook"):
            raise ScenarioError("notifier channel must be 'log' or 'webhook'")


def _parse_bursts(items) -> tuple:
    bursts = []
    for item in items:
        bursts.append(
            Burst(
                start_seq=item["start_seq"],
                length=item["length"],
                weapon=WeaponClass(item["class"]),
                mean=item["mean"],
                jitter=item.get("jitter", 0.0),
            )
        )
    return tuple(bursts)


def _parse_truth(items) -> tuple:
    return tuple(
        GroundTruthInterval(iv["start_seq"], iv["end_seq"], iv["label"]) for iv in items
    )


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        obj = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ScenarioError("cannot read scenario %s: %s" % (path, exc)) from exc
    return scenario_from_json(obj, base_dir=path.parent)


def scenario_from_json(obj: dict, base_dir=None) -> Scenario:
    base_dir = Path(base_dir) if base_dir else Path(".")
    try:
        devices = []
        for index, spec in enumerate(obj["devices"]):
            backend = spec["backend"]
            profile = None
            trace_path = None
            if "synthetic" in backend:
                synth = backend["synthetic"]
                profile = SyntheticProfile(
                    seed=synth.get("seed", 0) or 0,
                    noise=synth.get("noise", 0.0),
                    bursts=_parse_bursts(synth.get("bursts", [])),
                )
            elif "trace" in backend:
                trace_path = str(base_dir / backend["trace"])
            else:
                raise ScenarioError("device backend must be 'synthetic' or 'trace'")
            config = DeviceConfig.from_json(spec.get("config", {}))
            devices.append(
                DeviceSpec(
                    device_id=spec["device_id"],
                    fps=spec.get("fps", 15.0),
                    width=spec.get("width", 64),
                    height=spec.get("height", 48),
                    config=config,
                    motion_intervals=tuple(tuple(iv) for iv in spec.get("motion_intervals", [])),
                    profile=profile,
                    trace_path=trace_path,
                    ground_truth=_parse_truth(spec.get("ground_truth", [])),
                )
            )
        network = obj.get("network", {})
        latency = network.get("latency_ms", 0)
        if isinstance(latency, (int, float)):
            latency = (int(latency), int(latency))
        else:
            latency = (int(latency[0]), int(latency[1]))
        resample = obj.get("resample", {"fps": 15, "seconds": 2})
        verifier = obj.get("verifier", {"stub": {"default": 0.9}})
        stub = verifier.get("stub")
        weights_path = verifier.get("weights")
        arch_path = verifier.get("arch")
        notifier = obj.get("notifier", {"channel": "log"})
        return Scenario(
            seed=obj["seed"],
            duration_ms=obj["duration_ms"],
            devices=tuple(devices),
            network=NetworkModel(latency, network.get("drop_probability", 0.0)),
            resample=ResampleConfig(resample["fps"], resample["seconds"]),
            verifier_stub=stub,
            weights_path=str(base_dir / weights_path) if weights_path else None,
            arch_path=str(base_dir / arch_path) if arch_path else None,
            verify_latency_ms=obj.get("verify_latency_ms", 500),
            notifier_channel=notifier.get("channel", "log"),
            webhook_url=notifier.get("url"),
            webhook_fail_attempts=notifier.get("fail_attempts", 0),
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ScenarioError):
            raise
        raise ScenarioError("bad scenario: %s" % exc) from exc


def scenario_to_json(s: Scenario) -> dict:
    devices = []
    for d in s.devices:
        if d.profile is not None:
            backend = {
                "synthetic": {
                    "seed": d.profile.seed,
                    "noise": d.profile.noise,
                    "bursts": [
                        {
                            "start_seq": b.start_seq,
                            "length": b.length,
                            "class": str(b.weapon),
                            "mean": b.mean,
                            "jitter": b.jitter,
                        }
                        for b in d.profile.bursts
                    ],
                }
            }
        else:
            backend = {"trace": d.trace_path}
        devices.append(
            {
                "device_id": d.device_id,
                "fps": d.fps,
                "width": d.width,
                "height": d.height,
                "config": d.config.to_json(),
                "motion_intervals": [list(iv) for iv in d.motion_intervals],
                "backend": backend,
                "ground_truth": [
                    {"start_seq": iv.start_seq, "end_seq": iv.end_seq, "label": iv.label}
                    for iv in d.ground_truth
                ],
            }
        )
    verifier = {"stub": s.verifier_stub} if s.verifier_stub is not None else {
        "weights": s.weights_path, "arch": s.arch_path}
    return {
        "seed": s.seed,
        "duration_ms": s.duration_ms,
        "network": {"latency_ms": list(s.network.latency_ms),
                    "drop_probability": s.network.drop_probability},
        "resample": {"fps": s.resample.fps, "seconds": s.resample.seconds},
        "verifier": verifier,
        "verify_latency_ms": s.verify_latency_ms,
        "notifier": {"channel": s.notifier_channel, "url": s.webhook_url,
                     "fail_attempts": s.webhook_fail_attempts},
        "devices": devices,
    }
