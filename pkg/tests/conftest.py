import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))  # for tools.make_goldens

from edgeguard.core.types import Frame


def make_frame(width=8, height=6, fill=0, seq=0, timestamp=0, pixels=None):
    if pixels is None:
        pixels = bytes([fill]) * (width * height)
    return Frame(width=width, height=height, pixels=pixels, timestamp=timestamp, seq=seq)


def pattern_frame(width, height, seq, timestamp=None):
    """Deterministic pixel pattern, distinct per seq."""
    idx = np.arange(width * height, dtype=np.int64)
    pixels = ((idx * 31 + seq * 97) % 256).astype(np.uint8).tobytes()
    return Frame(
        width=width,
        height=height,
        pixels=pixels,
        timestamp=timestamp if timestamp is not None else seq * 33,
        seq=seq,
    )


@pytest.fixture
def frame():
    return make_frame()
