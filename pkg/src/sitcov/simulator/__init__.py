"""Deterministic 2D T-intersection simulator.

The run loop lives in :mod:`sitcov.simulator.engine`.
"""

from .config import PerceptionParams, SimConfig, load_sim_config
from .geometry import IntersectionGeometry, build_geometry
from .perception import Detection, EnvConditions, aeb_decision, perceive, visibility_factor
from .physics import VehicleState, braking_distance, collision_check

__all__ = [
    "Detection", "EnvConditions", "IntersectionGeometry", "PerceptionParams",
    "SimConfig", "VehicleState", "aeb_decision", "braking_distance",
    "build_geometry", "collision_check", "load_sim_config",
    "perceive", "visibility_factor",
]
