"""Numeric kernels with backend dispatch.

Two interchangeable convolution backends:

  * a compiled direct kernel (edgeguard.verifier._kernels, Cython) that
    wins in the low-tap regime (few input/output channels) where GEMM
    setup and im2col copies dominate;
  * a vectorized numpy path (one GEMM per time slice) that wins once the
    channel product grows, because BLAS out-muscles any hand-written
    scalar loop there.

``bench/bench_kernels.py`` holds the measurements behind the dispatch
threshold below. The numpy path is also the fallback when the extension
is not built; EDGEGUARD_PURE=1 forces it.

All kernels take and return float64 C-contiguous arrays; shape checking
lives one level up in edgeguard.verifier.ops.
"""

import os

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

try:
    if os.environ.get("EDGEGUARD_PURE"):
        _ext = None
    else:
        from edgeguard.verifier import _kernels as _ext
except ImportError:
    _ext = None


def backend_name() -> str:
    return "compiled" if _ext is not None else "numpy"


def conv3d_numpy(x, w, b, padding):
    """Cross-correlation, stride 1, zero padding; one GEMM per time slice.

    x: (c_in, t, h, w), w: (c_out, c_in, kt, kh, kw), b: (c_out,).
    Output spatial dims are input + 2*padding - kernel + 1.
    """
    c_out, c_in, kt, kh, kw = w.shape
    p = padding
    xp = np.pad(x, ((0, 0), (p, p), (p, p), (p, p))) if p else x
    t_out = x.shape[1] + 2 * p - kt + 1
    h_out = x.shape[2] + 2 * p - kh + 1
    w_out = x.shape[3] + 2 * p - kw + 1
    out = np.empty((c_out, t_out, h_out, w_out), dtype=np.float64)
    wmat = w.reshape(c_out, c_in * kt * kh * kw)
    for t in range(t_out):
        block = xp[:, t : t + kt]
        win = sliding_window_view(block, (kh, kw), axis=(2, 3))
        col = win.transpose(0, 1, 4, 5, 2, 3).reshape(wmat.shape[1], h_out * w_out)
        out[:, t] = (wmat @ col).reshape(c_out, h_out, w_out)
    out += b[:, None, None, None]
    return out


def dense_numpy(v, w, b):
    return w @ v + b


def global_avg_pool_numpy(x):
    return x.reshape(x.shape[0], -1).mean(axis=1)


# measured crossover: the direct kernel beats im2col+GEMM only while the
# channel product stays small (single-channel first layer territory)
_DIRECT_CHANNEL_LIMIT = 16


def conv3d_raw(x, w, b, padding):
    c_out, c_in = w.shape[0], w.shape[1]
    if _ext is not None and c_in * c_out <= _DIRECT_CHANNEL_LIMIT:
        p = int(padding)
        xp = np.pad(x, ((0, 0), (p, p), (p, p), (p, p))) if p else np.ascontiguousarray(x)
        return _ext.conv3d_padded(xp, np.ascontiguousarray(w), np.ascontiguousarray(b))
    return conv3d_numpy(x, w, b, padding)


# dense and pooling measured faster through BLAS/numpy at every size the
# networks here use; the compiled versions stay available for the bench
dense_raw = dense_numpy
global_avg_pool_raw = global_avg_pool_numpy
