"""Shared scenario constructions for harness and acceptance tests."""

from edgeguard.core.types import WeaponClass
from edgeguard.detectors import Burst, GroundTruthInterval, SyntheticProfile
from edgeguard.sim.scenario import DeviceSpec, NetworkModel, Scenario
from edgeguard.verifier.resample import ResampleConfig


def three_device_scenario(seed=1234, drop=0.0, duration_ms=30_000, latency=(40, 40)):
    """One robbery burst, one spike-noise device, one idle device.

    Spike bounds are chosen so momentum can never cross the gun threshold
    (max 0.9 + 0.1 * 0.96875 < 1.05) while every spike clears the
    single-frame baseline threshold 1.05 / 1.96875.
    """
    robbery = DeviceSpec(
        device_id="cam-robbery",
        fps=15,
        width=64,
        height=48,
        motion_intervals=((40, 90),),
        profile=SyntheticProfile(
            seed=0,  # derived from the scenario seed
            noise=0.0,
            bursts=(Burst(start_seq=60, length=15, weapon=WeaponClass.GUN, mean=0.6),),
        ),
        ground_truth=(GroundTruthInterval(55, 80, "robbery"),),
    )
    spikes = DeviceSpec(
        device_id="cam-spikes",
        fps=15,
        width=64,
        height=48,
        motion_intervals=((0, 449),),
        profile=SyntheticProfile(
            seed=0,
            noise=0.1,
            bursts=tuple(
                Burst(start_seq=s, length=1, weapon=WeaponClass.GUN, mean=0.8, jitter=0.1)
                for s in (50, 100, 150, 200, 250, 300, 350, 400)
            ),
        ),
        ground_truth=(GroundTruthInterval(0, 449, "normal"),),
    )
    idle = DeviceSpec(
        device_id="cam-idle",
        fps=15,
        width=64,
        height=48,
        motion_intervals=(),
        profile=SyntheticProfile(seed=0, noise=0.0),
        ground_truth=(GroundTruthInterval(0, 449, "normal"),),
    )
    return Scenario(
        seed=seed,
        duration_ms=duration_ms,
        devices=(robbery, spikes, idle),
        network=NetworkModel(latency, drop),
        resample=ResampleConfig(15, 2),
        verifier_stub={"default": 0.9},
        verify_latency_ms=500,
    )


def spike_scenario(seed=1, duration_ms=10_000):
    """Single spike-heavy device, small frames: fast momentum-vs-off sweeps."""
    device = DeviceSpec(
        device_id="cam-spikes",
        fps=15,
        width=32,
        height=24,
        motion_intervals=((0, 149),),
        profile=SyntheticProfile(
            seed=0,
            noise=0.1,
            bursts=tuple(
                Burst(start_seq=s, length=1, weapon=WeaponClass.GUN, mean=0.8, jitter=0.1)
                for s in (40, 90, 140)
            ),
        ),
        ground_truth=(GroundTruthInterval(0, 149, "normal"),),
    )
    return Scenario(
        seed=seed,
        duration_ms=duration_ms,
        devices=(device,),
        network=NetworkModel((20, 20), 0.0),
        resample=ResampleConfig(15, 2),
        verifier_stub={"default": 0.9},
        verify_latency_ms=300,
    )
