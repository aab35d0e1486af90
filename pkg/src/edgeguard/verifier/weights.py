"""Binary weight container.

Layout (all integers little-endian, floats f32 little-endian, C order):

    magic   4 bytes  "S3DC"
    version u16      currently 1
    count   u16      number of parameterized layers
    per layer:
        kind     u8   1 = conv3d, 2 = dense
        rank     u8   number of weight dimensions
        dims     u32 * rank
        bias_len u32
        weights  f32 * prod(dims)
        biases   f32 * bias_len

Total byte length must match the declared shapes exactly; serialization
round-trips bit-for-bit.
"""

from __future__ import annotations

import struct
from typing import List, Tuple

import numpy as np

MAGIC = b"S3DC"
VERSION = 1
_KIND_CONV = 1
_KIND_DENSE = 2


class WeightFormatError(Exception):
    pass


def save_weights(params: List[Tuple[np.ndarray, np.ndarray]], path=None) -> bytes:
    """Serialize (weight, bias) pairs; writes to ``path`` when given."""
    out = bytearray()
    out += MAGIC
    out += struct.pack("<HH", VERSION, len(params))
    for w, b in params:
        kind = _KIND_CONV if w.ndim == 5 else _KIND_DENSE
        out.append(kind)
        out.append(w.ndim)
        out += struct.pack("<%dI" % w.ndim, *w.shape)
        out += struct.pack("<I", b.size)
        out += np.asarray(w, dtype="<f4").tobytes(order="C")
        out += np.asarray(b, dtype="<f4").tobytes(order="C")
    blob = bytes(out)
    if path is not None:
        with open(path, "wb") as fh:
            fh.write(blob)
    return blob


def load_weights(source) -> List[Tuple[np.ndarray, np.ndarray]]:
    """Parse a weight blob (bytes or path); arrays come back as float64."""
    if not isinstance(source, (bytes, bytearray)):
        with open(source, "rb") as fh:
            source = fh.read()
    data = bytes(source)
    if data[:4] != MAGIC:
        raise WeightFormatError("bad magic %r" % data[:4])
    if len(data) < 8:
        raise WeightFormatError("truncated header")
    version, count = struct.unpack_from("<HH", data, 4)
    if version != VERSION:
        raise WeightFormatError("unsupported version %d" % version)
    offset = 8
    params = []
    for _ in range(count):
        try:
            kind, rank = struct.unpack_from("<BB", data, offset)
            offset += 2
            dims = struct.unpack_from("<%dI" % rank, data, offset)
            offset += 4 * rank
            (bias_len,) = struct.unpack_from("<I", data, offset)
            offset += 4
        except struct.error as exc:
            raise WeightFormatError("truncated layer header") from exc
        if kind not in (_KIND_CONV, _KIND_DENSE):
            raise WeightFormatError("unknown layer kind %d" % kind)
        if (kind == _KIND_CONV and rank != 5) or (kind == _KIND_DENSE and rank != 2):
            raise WeightFormatError("kind %d with rank %d" % (kind, rank))
        w_count = 1
        for d in dims:
            w_count *= d
        need = 4 * (w_count + bias_len)
        if offset + need > len(data):
            raise WeightFormatError("byte length shorter than declared shapes")
        w = np.frombuffer(data, dtype="<f4", count=w_count, offset=offset).reshape(dims)
        offset += 4 * w_count
        b = np.frombuffer(data, dtype="<f4", count=bias_len, offset=offset)
        offset += 4 * bias_len
        params.append((w.astype(np.float64), b.astype(np.float64)))
    if offset != len(data):
        raise WeightFormatError("%d trailing bytes" % (len(data) - offset))
    return params
