"""Edge-filtered weapon alerting with cloud clip verification.

Subpackages:
    core        shared domain types, config validation, virtual clock
    edge        per-device pipeline: calibration, motion gate, momentum trigger
    detectors   pluggable per-frame confidence backends (trace replay, synthetic)
    verifier    3D-CNN forward pass, clip resampling, loss evaluation
    wire        framed binary device protocol and the GIF clip codec
    cloud       alert verification service, registry, event log, console API
    sim         deterministic discrete-event harness, metrics, CLI
"""

__version__ = "0.1.0"
