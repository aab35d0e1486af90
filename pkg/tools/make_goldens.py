#!/usr/bin/env python3
"""Regenerate the byte-exact fixtures under tests/data/.

Run from the repo root after an intentional format change, then review
the diff carefully: these files pin the wire formats.
"""

import hashlib
import json
import pathlib

from edgeguard.core.types import DeviceConfig, Frame
from edgeguard.verifier.network import NetworkSpec, Conv3d, Dense, GlobalAvgPool, Relu, Sigmoid, init_weights
from edgeguard.verifier.weights import save_weights
from edgeguard.wire import MessageType, Message, encode, encode_gif

DATA = pathlib.Path(__file__).resolve().parent.parent / "tests" / "data"


def golden_frames():
    frames = []
    for i in range(30):
        pixels = bytes(((x * 31 + i * 97) % 256) for x in range(48 * 32))
        frames.append(Frame(width=48, height=32, pixels=pixels, timestamp=i * 67, seq=100 + i))
    return frames


def golden_messages(gif_blob):
    cfg = DeviceConfig().to_json()
    return {
        "register": Message(MessageType.REGISTER, "dev-1-1", "dev-1", 1000,
                            meta={"fps": 30.0}),
        "register_ack": Message(MessageType.REGISTER_ACK, "cloud-1", "dev-1", 1002,
                                meta={"ack_of": "dev-1-1"}),
        "heartbeat": Message(MessageType.HEARTBEAT, "dev-1-2", "dev-1", 6000),
        "alert": Message(MessageType.ALERT, "dev-1-3", "dev-1", 7003, payload=gif_blob,
                         meta={"trigger_class": "gun", "momentum": 1.18125,
                               "captured_at": 7000, "trigger_seq": 129, "fps": 30.0}),
        "ack": Message(MessageType.ACK, "cloud-2", "dev-1", 7010,
                       meta={"ack_of": "dev-1-3"}),
        "verdict": Message(MessageType.VERDICT, "cloud-3", "dev-1", 7450,
                           meta={"alert_id": "alert-000001", "verdict": "confirmed",
                                 "score": 0.9173}),
        "config_update": Message(MessageType.CONFIG_UPDATE, "cloud-4", "dev-1", 9000,
                                 payload=json.dumps(cfg, sort_keys=True,
                                                    separators=(",", ":")).encode()),
        "error": Message(MessageType.ERROR, "cloud-5", "dev-1", 9500,
                         meta={"code": "bad_payload", "detail": "clip is not a valid GIF"}),
    }


def main():
    DATA.mkdir(parents=True, exist_ok=True)
    frames = golden_frames()
    gif_blob = encode_gif(frames, delay_cs=7)
    (DATA / "golden_clip.gif").write_bytes(gif_blob)
    print("golden_clip.gif sha256 =", hashlib.sha256(gif_blob).hexdigest())

    for name, msg in golden_messages(gif_blob).items():
        blob = encode(msg)
        (DATA / ("envelope_%s.hex" % name)).write_text(blob.hex() + "\n")
        print("envelope_%s.hex (%d bytes)" % (name, len(blob)))

    arch = NetworkSpec(
        input_dims=(1, 30, 8, 8),
        layers=(Conv3d(1, 2, (3, 3, 3), padding=1), Relu(), GlobalAvgPool(),
                Dense(2, 1), Sigmoid()),
    )
    blob = save_weights(init_weights(arch, seed=424242))
    (DATA / "weights_tiny.hex").write_text(blob.hex() + "\n")
    print("weights_tiny.hex (%d bytes)" % len(blob))


if __name__ == "__main__":
    main()
