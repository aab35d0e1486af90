from edgeguard.verifier.ops import (
    ShapeMismatch,
    LengthMismatch,
    EmptyInput,
    conv3d,
    relu,
    global_avg_pool,
    dense,
    sigmoid,
    bce,
)
from edgeguard.verifier.tensor import Tensor4
from edgeguard.verifier.network import NetworkSpec, default_arch, infer, init_weights
from edgeguard.verifier.weights import WeightFormatError, load_weights, save_weights
from edgeguard.verifier.resample import InsufficientFrames, ResampleConfig, resample_clip
from edgeguard.verifier.kernels import backend_name

__all__ = [
    "ShapeMismatch",
    "LengthMismatch",
    "EmptyInput",
    "conv3d",
    "relu",
    "global_avg_pool",
    "dense",
    "sigmoid",
    "bce",
    "Tensor4",
    "NetworkSpec",
    "default_arch",
    "infer",
    "init_weights",
    "WeightFormatError",
    "load_weights",
    "save_weights",
    "InsufficientFrames",
    "ResampleConfig",
    "resample_clip",
    "backend_name",
]
