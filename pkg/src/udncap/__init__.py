"""Fast per-cluster uplink capacity estimation for clustered ultra-dense networks."""
from .capacity import CapacityEstimate, exact_capacity_once, monte_carlo_capacity
from .channel import FadingParams, LogBase, build_channel, large_scale_gain, sinr_trace
from .closed_form import closed_form_capacity, continuous_uniform_capacity, stability_gap
from .fise import fise_capacity, spectral_params
from .harness import ExperimentConfig, run_experiment
from .netgen import ScenarioConfig, ScenarioKind, Selector, generate, kmeans_partition, select_cluster
from .rngkit import RngStream

__all__ = [
    "CapacityEstimate", "ExperimentConfig", "FadingParams", "LogBase", "RngStream",
    "ScenarioConfig", "ScenarioKind", "Selector", "build_channel", "closed_form_capacity",
    "continuous_uniform_capacity", "exact_capacity_once", "fise_capacity", "generate",
    "kmeans_partition", "large_scale_gain", "monte_carlo_capacity", "run_experiment",
    "select_cluster", "sinr_trace", "spectral_params", "stability_gap",
]
