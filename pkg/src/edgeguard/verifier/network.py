"""Network architecture description and the full forward pass.

The layer stack is data-driven from a JSON architecture file so variants
can be tested without code changes. The default is the smallest stack
matching the verifier design: two 3x3x3 convolutions (1->16->32, padding
1), global average pooling, then a two-layer fully connected head ending
in a sigmoid. Output above 0.5 reads as "robbery".

Input clips are grayscale, scaled to [0,1] by division by 255 and resized
(nearest neighbor, floor index mapping) to the architecture's input
height/width.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from edgeguard.core.types import CLIP_FRAMES
from edgeguard.detectors.rng import Lcg64
from edgeguard.verifier import ops
from edgeguard.verifier.tensor import Tensor4

DECISION_THRESHOLD = 0.5


@dataclass(frozen=True)
class Conv3d:
    in_channels: int
    out_channels: int
    kernel: Tuple[int, int, int]
    padding: int


@dataclass(frozen=True)
class Relu:
    pass


@dataclass(frozen=True)
class GlobalAvgPool:
    pass


@dataclass(frozen=True)
class Dense:
    in_features: int
    out_features: int


@dataclass(frozen=True)
class Sigmoid:
    pass


@dataclass(frozen=True)
class NetworkSpec:
    """Input dims (channels, time, height, width) plus the layer stack."""

    input_dims: Tuple[int, int, int, int]
    layers: tuple

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        """Walk the stack symbolically; adjacent shapes must chain."""
        shape = self.input_dims  # rank-4 until pooling, then a vector length
        pooled = False
        for i, layer in enumerate(self.layers):
            if isinstance(layer, Conv3d):
                if pooled:
                    raise ValueError("layer %d: conv3d after pooling" % i)
                if layer.in_channels != shape[0]:
                    raise ValueError(
                        "layer %d: conv3d expects %d channels, gets %d"
                        % (i, layer.in_channels, shape[0])
                    )
                kt, kh, kw = layer.kernel
                dims = tuple(
                    d + 2 * layer.padding - k + 1
                    for d, k in zip(shape[1:], (kt, kh, kw))
                )
                if any(d <= 0 for d in dims):
                    raise ValueError("layer %d: kernel larger than padded input" % i)
                shape = (layer.out_channels,) + dims
            elif isinstance(layer, GlobalAvgPool):
                if pooled:
                    raise ValueError("layer %d: repeated pooling" % i)
                pooled = True
                shape = (shape[0],)
            elif isinstance(layer, Dense):
                if not pooled:
                    raise ValueError("layer %d: dense before pooling" % i)
                if layer.in_features != shape[0]:
                    raise ValueError(
                        "layer %d: dense expects %d features, gets %d"
                        % (i, layer.in_features, shape[0])
                    )
                shape = (layer.out_features,)
            elif isinstance(layer, (Relu, Sigmoid)):
                pass
            else:
                raise ValueError("unknown layer %r" % (layer,))
        if not pooled or shape != (1,):
            raise ValueError("network must pool and end with one output, got %r" % (shape,))

    def parameterized(self) -> list:
        return [l for l in self.layers if isinstance(l, (Conv3d, Dense))]

    def to_json(self) -> dict:
        layers = []
        for layer in self.layers:
            if isinstance(layer, Conv3d):
                layers.append(
                    {
                        "type": "conv3d",
                        "in_channels": layer.in_channels,
                        "out_channels": layer.out_channels,
                        "kernel": list(layer.kernel),
                        "padding": layer.padding,
                    }
                )
            elif isinstance(layer, Relu):
                layers.append({"type": "relu"})
            elif isinstance(layer, GlobalAvgPool):
                layers.append({"type": "global_avg_pool"})
            elif isinstance(layer, Dense):
                layers.append(
                    {
                        "type": "dense",
                        "in_features": layer.in_features,
                        "out_features": layer.out_features,
                    }
                )
            elif isinstance(layer, Sigmoid):
                layers.append({"type": "sigmoid"})
        c, t, h, w = self.input_dims
        return {
            "input": {"channels": c, "time": t, "height": h, "width": w},
            "layers": layers,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "NetworkSpec":
        inp = obj["input"]
        dims = (inp["channels"], inp["time"], inp["height"], inp["width"])
        layers = []
        for spec in obj["layers"]:
            kind = spec["type"]
            if kind == "conv3d":
                layers.append(
                    Conv3d(
                        in_channels=spec["in_channels"],
                        out_channels=spec["out_channels"],
                        kernel=tuple(spec["kernel"]),
                        padding=spec["padding"],
                    )
                )
            elif kind == "relu":
                layers.append(Relu())
            elif kind == "global_avg_pool":
                layers.append(GlobalAvgPool())
            elif kind == "dense":
                layers.append(Dense(spec["in_features"], spec["out_features"]))
            elif kind == "sigmoid":
                layers.append(Sigmoid())
            else:
                raise ValueError("unknown layer type %r" % kind)
        return cls(input_dims=dims, layers=tuple(layers))

    @classmethod
    def load(cls, path) -> "NetworkSpec":
        with open(path) as fh:
            return cls.from_json(json.load(fh))

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=2)
            fh.write("\n")


def default_arch(height: int = 224, width: int = 224) -> NetworkSpec:
    return NetworkSpec(
        input_dims=(1, CLIP_FRAMES, height, width),
        layers=(
            Conv3d(1, 16, (3, 3, 3), padding=1),
            Relu(),
            Conv3d(16, 32, (3, 3, 3), padding=1),
            Relu(),
            GlobalAvgPool(),
            Dense(32, 16),
            Relu(),
            Dense(16, 1),
            Sigmoid(),
        ),
    )


def init_weights(spec: NetworkSpec, seed: int) -> List[Tuple[np.ndarray, np.ndarray]]:
    """Seeded uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)) initialization.

    Values are drawn from Lcg64 in layer order (weights then bias, C
    order) and rounded to float32 so an init -> save -> load cycle is
    lossless.
    """
    rng = Lcg64(seed)
    params = []
    for layer in spec.parameterized():
        if isinstance(layer, Conv3d):
            kt, kh, kw = layer.kernel
            shape = (layer.out_channels, layer.in_channels, kt, kh, kw)
            fan_in = layer.in_channels * kt * kh * kw
            bias_len = layer.out_channels
        else:
            shape = (layer.out_features, layer.in_features)
            fan_in = layer.in_features
            bias_len = layer.out_features
        bound = 1.0 / (fan_in ** 0.5)
        w = np.array(
            [rng.uniform(-bound, bound) for _ in range(int(np.prod(shape)))],
            dtype=np.float32,
        ).reshape(shape)
        b = np.array([rng.uniform(-bound, bound) for _ in range(bias_len)], dtype=np.float32)
        params.append((w.astype(np.float64), b.astype(np.float64)))
    return params


def run(spec: NetworkSpec, params, x: Tensor4) -> float:
    """Forward pass over a prepared input tensor; returns the final scalar."""
    if x.dims != spec.input_dims:
        raise ops.ShapeMismatch("input dims %r do not match arch %r" % (x.dims, spec.input_dims))
    value = x
    it = iter(params)
    for layer in spec.layers:
        if isinstance(layer, Conv3d):
            w, b = next(it)
            value = ops.conv3d(value, w, b, layer.padding)
        elif isinstance(layer, Relu):
            if isinstance(value, Tensor4):
                value = ops.relu(value)
            else:
                value = np.maximum(value, 0.0)
        elif isinstance(layer, GlobalAvgPool):
            value = ops.global_avg_pool(value)
        elif isinstance(layer, Dense):
            w, b = next(it)
            value = ops.dense(value, w, b)
        elif isinstance(layer, Sigmoid):
            value = ops.sigmoid(float(value[0]))
    return float(value)


def _resize_nearest(stack: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Nearest-neighbor resize with floor index mapping src = i*in // out."""
    t, in_h, in_w = stack.shape
    if (in_h, in_w) == (out_h, out_w):
        return stack
    rows = (np.arange(out_h) * in_h) // out_h
    cols = (np.arange(out_w) * in_w) // out_w
    return stack[:, rows[:, None], cols[None, :]]


def clip_to_tensor(spec: NetworkSpec, frames) -> Tensor4:
    frames = list(frames)
    _, t_in, h_in, w_in = spec.input_dims
    if len(frames) != t_in:
        raise ops.ShapeMismatch("arch expects %d frames, clip has %d" % (t_in, len(frames)))
    stack = np.stack(
        [
            np.frombuffer(f.pixels, dtype=np.uint8).reshape(f.height, f.width)
            for f in frames
        ]
    ).astype(np.float64)
    stack /= 255.0
    stack = _resize_nearest(stack, h_in, w_in)
    return Tensor4(stack[np.newaxis, :, :, :])


def infer(spec: NetworkSpec, params, frames) -> float:
    """Classify a clip; pure function of (weights, clip).

    Frames are scaled to [0,1] and resized to the architecture input;
    the returned probability reads "robbery" when above 0.5.
    """
    return run(spec, params, clip_to_tensor(spec, frames))
