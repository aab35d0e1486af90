"""Install-time brightness/contrast calibration.

Each pixel maps through ``alpha * p + beta``, rounded half-up and clamped
to the 8-bit range (the linear map itself has no range handling).
"""

import numpy as np

from edgeguard.core.types import Frame


def calibrate(frame: Frame, alpha: float, beta: float) -> Frame:
    if alpha <= 0:
        raise ValueError("alpha must be > 0")
    p = np.frombuffer(frame.pixels, dtype=np.uint8).astype(np.float64)
    # floor(x + 0.5) is round-half-up; np.round would round half-even
    out = np.floor(alpha * p + beta + 0.5)
    out = np.clip(out, 0, 255).astype(np.uint8)
    return Frame(
        width=frame.width,
        height=frame.height,
        pixels=out.tobytes(),
        timestamp=frame.timestamp,
        seq=frame.seq,
    )
