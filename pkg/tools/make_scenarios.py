#!/usr/bin/env python3
"""Regenerate the demo scenarios under scenarios/."""

import json
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "tests"))

from scenario_builders import spike_scenario, three_device_scenario  # noqa: E402

from edgeguard.detectors import GroundTruthInterval, ScoreTrace  # noqa: E402
from edgeguard.sim.scenario import scenario_to_json  # noqa: E402
from edgeguard.verifier.network import NetworkSpec, Conv3d, Dense, GlobalAvgPool, Relu, Sigmoid  # noqa: E402
from edgeguard.verifier.network import init_weights  # noqa: E402
from edgeguard.verifier.weights import save_weights  # noqa: E402

ROOT = pathlib.Path(__file__).resolve().parent.parent / "scenarios"


def write_json(name, obj):
    (ROOT / name).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")
    print("wrote scenarios/%s" % name)


def main():
    ROOT.mkdir(exist_ok=True)
    write_json("demo.json", scenario_to_json(three_device_scenario()))
    write_json("spikes.json", scenario_to_json(spike_scenario()))

    # golden example of the trace CSV + ground-truth sidecar schema
    entries = [(seq, 0.7, 0.05) for seq in range(120, 130)]
    entries += [(50, 0.85, 0.0), (51, 0.0, 0.0)]  # an isolated spike
    trace = ScoreTrace(
        "cam-entrance",
        sorted(entries),
        [
            GroundTruthInterval(0, 100, "normal"),
            GroundTruthInterval(115, 140, "robbery"),
        ],
    )
    trace.save(ROOT / "cam-entrance.csv")
    print("wrote scenarios/cam-entrance.csv (+ .truth.json)")

    replay = {
        "seed": 7,
        "duration_ms": 15_000,
        "network": {"latency_ms": [20, 60], "drop_probability": 0.0},
        "resample": {"fps": 15, "seconds": 2},
        "verifier": {"stub": {"default": 0.9}},
        "verify_latency_ms": 500,
        "notifier": {"channel": "log"},
        "devices": [
            {
                "device_id": "cam-entrance",
                "fps": 15,
                "width": 64,
                "height": 48,
                "motion_intervals": [[40, 60], [100, 160]],
                "backend": {"trace": "cam-entrance.csv"},
            }
        ],
    }
    write_json("trace_replay.json", replay)

    arch = NetworkSpec(
        input_dims=(1, 30, 32, 32),
        layers=(
            Conv3d(1, 4, (3, 3, 3), padding=1),
            Relu(),
            Conv3d(4, 8, (3, 3, 3), padding=1),
            Relu(),
            GlobalAvgPool(),
            Dense(8, 4),
            Relu(),
            Dense(4, 1),
            Sigmoid(),
        ),
    )
    arch.save(ROOT / "arch_small.json")
    print("wrote scenarios/arch_small.json")
    save_weights(init_weights(arch, seed=7), ROOT / "weights_small.bin")
    print("wrote scenarios/weights_small.bin")

    real = dict(replay)
    real["verifier"] = {"weights": "weights_small.bin", "arch": "arch_small.json"}
    write_json("trace_replay_real_verifier.json", real)


if __name__ == "__main__":
    main()
