"""Motion gate: single-Gaussian running-mean background model.

Stands in for a full mixture-model subtractor behind the same interface:
feed a frame, get back the fraction of pixels that moved. A pixel counts
as foreground when it deviates from the *previous* mean by more than tau;
the mean then absorbs the frame at learning rate rho.
"""

import numpy as np

from edgeguard.core.types import Frame


class DimensionMismatch(Exception):
    pass


class BackgroundModel:
    """Per-pixel running mean with fixed rho / tau for a device session."""

    def __init__(self, rho: float = 0.05, tau: float = 25.0):
        if not 0.0 < rho < 1.0:
            raise ValueError("rho out of (0,1)")
        self.rho = rho
        self.tau = tau
        self._mean = None  # lazily sized from the first frame
        self._shape = None

    @property
    def warm(self) -> bool:
        return self._mean is not None

    def update(self, frame: Frame) -> float:
        """Absorb one frame; returns the foreground ratio in [0, 1].

        The first frame initializes the mean and reports no motion.
        """
        pixels = np.frombuffer(frame.pixels, dtype=np.uint8).astype(np.float64)
        if self._mean is None:
            self._mean = pixels.copy()
            self._shape = (frame.width, frame.height)
            return 0.0
        if (frame.width, frame.height) != self._shape:
            raise DimensionMismatch(
                "frame %dx%d does not match model %dx%d"
                % (frame.width, frame.height, self._shape[0], self._shape[1])
            )
        moved = np.abs(pixels - self._mean) > self.tau
        self._mean = (1.0 - self.rho) * self._mean + self.rho * pixels
        return float(np.count_nonzero(moved)) / pixels.size
