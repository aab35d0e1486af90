"""Forward-pass operations with contract checks.

Shapes are validated here; the arithmetic lives in
edgeguard.verifier.kernels (compiled or numpy backend).
"""

from __future__ import annotations

import math

import numpy as np

from edgeguard.verifier import kernels
from edgeguard.verifier.tensor import Tensor4


class ShapeMismatch(Exception):
    pass


class LengthMismatch(Exception):
    pass


class EmptyInput(Exception):
    pass


def conv3d(x: Tensor4, weights, bias, padding: int = 0) -> Tensor4:
    """3D cross-correlation, stride 1, zero padding.

    weights: (c_out, c_in, kt, kh, kw) with odd kernel extents;
    output time/height/width are input + 2*padding - kernel + 1.
    """
    w = np.asarray(weights, dtype=np.float64)
    b = np.asarray(bias, dtype=np.float64)
    if w.ndim != 5:
        raise ShapeMismatch("conv3d weights need rank 5, got %d" % w.ndim)
    c_out, c_in, kt, kh, kw = w.shape
    if c_in != x.channels:
        raise ShapeMismatch("kernel expects %d input channels, tensor has %d" % (c_in, x.channels))
    if b.shape != (c_out,):
        raise ShapeMismatch("bias shape %r does not match %d output channels" % (b.shape, c_out))
    if any(k % 2 == 0 or k <= 0 for k in (kt, kh, kw)):
        raise ShapeMismatch("kernel extents must be odd and positive, got %r" % ((kt, kh, kw),))
    if padding < 0:
        raise ShapeMismatch("padding must be >= 0")
    for axis, k in zip(x.dims[1:], (kt, kh, kw)):
        if axis + 2 * padding - k + 1 <= 0:
            raise ShapeMismatch("kernel %r too large for input %r with padding %d"
                                % ((kt, kh, kw), x.dims, padding))
    return Tensor4(kernels.conv3d_raw(x.data, w, b, padding))


def relu(x: Tensor4) -> Tensor4:
    return Tensor4(np.maximum(x.data, 0.0))


def global_avg_pool(x: Tensor4) -> np.ndarray:
    """Per-channel mean over time x height x width."""
    return kernels.global_avg_pool_raw(x.data)


def dense(v, weights, bias) -> np.ndarray:
    """Affine map W @ v + b."""
    v = np.asarray(v, dtype=np.float64)
    w = np.asarray(weights, dtype=np.float64)
    b = np.asarray(bias, dtype=np.float64)
    if v.ndim != 1 or w.ndim != 2:
        raise ShapeMismatch("dense needs a vector and a matrix")
    if w.shape[1] != v.shape[0] or b.shape != (w.shape[0],):
        raise ShapeMismatch(
            "dense shapes incompatible: W %r, v %r, b %r" % (w.shape, v.shape, b.shape)
        )
    return kernels.dense_raw(v, w, b)


def sigmoid(s: float) -> float:
    """Logistic function, stable for |s| <= 500 (no overflow branch)."""
    if s >= 0.0:
        return 1.0 / (1.0 + math.exp(-s))
    e = math.exp(s)
    return e / (1.0 + e)


def _softplus(x: float) -> float:
    # log(1 + e^x) without overflowing for large x
    if x > 0.0:
        return x + math.log1p(math.exp(-x))
    return math.log1p(math.exp(x))


def bce(y, logits) -> float:
    """Mean binary cross-entropy of sigmoid(logits) against labels.

    Evaluated in log space: the y=1 term is softplus(-s) and the y=0 term
    softplus(s), so confident correct predictions lose nothing to
    catastrophic cancellation.
    """
    y = list(y)
    logits = list(logits)
    if len(y) != len(logits):
        raise LengthMismatch("labels %d vs logits %d" % (len(y), len(logits)))
    if not y:
        raise EmptyInput("bce needs at least one data point")
    total = 0.0
    for yi, si in zip(y, logits):
        if yi not in (0, 1):
            raise ValueError("labels must be binary, got %r" % (yi,))
        total += yi * _softplus(-si) + (1 - yi) * _softplus(si)
    return total / len(y)
