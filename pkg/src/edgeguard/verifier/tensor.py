"""Dense rank-4 array (channels, time, height, width) for 3D inference."""

from __future__ import annotations

import numpy as np


class Tensor4:
    """Validating wrapper around a float64 ndarray of rank 4.

    The wrapped array is read-only; operations return new tensors.
    """

    __slots__ = ("data",)

    def __init__(self, data):
        arr = np.asarray(data, dtype=np.float64)
        if arr.ndim != 4:
            raise ValueError("Tensor4 needs rank 4, got rank %d" % arr.ndim)
        if not np.all(np.isfinite(arr)):
            raise ValueError("Tensor4 values must be finite")
        arr = np.ascontiguousarray(arr)
        arr.setflags(write=False)
        self.data = arr

    @property
    def dims(self):
        return self.data.shape

    @property
    def channels(self) -> int:
        return self.data.shape[0]

    def __repr__(self):
        return "Tensor4(dims=%r)" % (self.dims,)
