from edgeguard.sim.metrics import DegenerateLabels, MetricsReport, compute_auc, compute_metrics
from edgeguard.sim.scenario import Scenario, ScenarioError
from edgeguard.sim.harness import compare_momentum, run_scenario

__all__ = [
    "DegenerateLabels",
    "MetricsReport",
    "compute_auc",
    "compute_metrics",
    "Scenario",
    "ScenarioError",
    "compare_momentum",
    "run_scenario",
]
