from edgeguard.detectors.rng import Lcg64, split_seed
from edgeguard.detectors.replay import GroundTruthInterval, ScoreTrace, TraceDetector
from edgeguard.detectors.synthetic import Burst, SyntheticDetector, SyntheticProfile

__all__ = [
    "Lcg64",
    "split_seed",
    "GroundTruthInterval",
    "ScoreTrace",
    "TraceDetector",
    "Burst",
    "SyntheticProfile",
    "SyntheticDetector",
]
