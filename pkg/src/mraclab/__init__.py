"""Simulation laboratory for adaptive augmentation of an LQ pitch-axis law."""

from .baseline import BaselineDesign, BaselineState, design_baseline
from .mrac import AdaptiveGains, MracDesign, ZTransform, build_mrac, build_transform
from .plant import PlantModel, PlantState, plant_matrices
from .sim import Scenario, SimTrace, compute_metrics, run_scenario

__version__ = "0.1.0"

__all__ = [
    "AdaptiveGains",
    "BaselineDesign",
    "BaselineState",
    "MracDesign",
    "PlantModel",
    "PlantState",
    "Scenario",
    "SimTrace",
    "ZTransform",
    "build_mrac",
    "build_transform",
    "compute_metrics",
    "design_baseline",
    "plant_matrices",
    "run_scenario",
    "__version__",
]
