"""Parametric camera perception and the AEB gate.

This is a stand-in for a trained detector: confidence is the product of a
weather visibility factor, a smooth distance falloff and seeded
multiplicative noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from typing import Mapping

import numpy as np

from .config import VISUAL_ELEMENTS, PerceptionConfig, PerceptionParams


@dataclass(frozen=True)
class EnvConditions:
    friction: float = 1.0
    fog_density: float = 0.0
    precipitation: float = 0.0
    precipitation_deposits: float = 0.0
    cloudiness: float = 0.0
    wind_intensity: float = 0.0
    wetness: float = 0.0
    fog_distance: float = 0.0

    def __post_init__(self) -> None:
        if not 0.1 <= self.friction <= 1.0:
            raise ValueError(f"friction {self.friction} outside [0.1, 1.0]")
        for f in fields(self)[1:]:
            v = getattr(self, f.name)
            if not 0.0 <= v <= 100.0:
                raise ValueError(f"{f.name} {v} outside [0, 100]")

    @classmethod
    def from_values(cls, values: Mapping[str, float]) -> EnvConditions:
        """Build from element-id keyed values (``{"Friction": 0.46, ...}``)."""
        return cls(**{_snake(k): float(v) for k, v in values.items()})

    def intensity(self, element_id: str) -> float:
        return getattr(self, _snake(element_id))


def _snake(element_id: str) -> str:
    return "".join("_" + c.lower() if c.isupper() else c for c in element_id).lstrip("_")


@dataclass(frozen=True)
class Detection:
    visible: bool
    confidence: float
    apparent_size: float
    bearing: float


def visibility_factor(env: EnvConditions, attenuation: Mapping[str, float]) -> float:
    v = 1.0
    for eid in VISUAL_ELEMENTS:
        v *= 1.0 - attenuation[eid] * env.intensity(eid) / 100.0
    return v


def wrap_angle(a: float) -> float:
    return (a + math.pi) % (2 * math.pi) - math.pi


def distance_falloff(distance: float, falloff_distance: float, exponent: float = 2.0) -> float:
    """Smooth decreasing factor: 1 at the camera, 1/2 at ``falloff_distance``."""
    return 1.0 / (1.0 + (distance / falloff_distance) ** exponent)


def perceive(ego_pose: tuple[float, float, float], ov_pos: tuple[float, float],
             ov_width: float, env: EnvConditions, rng: np.random.Generator,
             cfg: PerceptionConfig, visibility: float | None = None) -> Detection:
    """Detect the OV from the ego camera.

    Always consumes exactly one uniform draw from ``rng`` so that the noise
    sequence of a run does not depend on what the camera saw.
    """
    noise = 1.0 - cfg.noise * rng.random()
    ex, ey, heading = ego_pose
    dx, dy = ov_pos[0] - ex, ov_pos[1] - ey
    dist = math.hypot(dx, dy)
    if dist == 0.0:
        size, bearing = 1.0, 0.0
    else:
        size = min(1.0, cfg.camera_constant * ov_width / dist)
        bearing = wrap_angle(math.atan2(dy, dx) - heading)
    visible = abs(bearing) <= cfg.field_of_view / 2
    if not visible:
        return Detection(False, 0.0, size, bearing)
    v = visibility_factor(env, cfg.attenuation) if visibility is None else visibility
    conf = v * distance_falloff(dist, cfg.falloff_distance, cfg.falloff_exponent) * noise
    return Detection(True, min(1.0, max(0.0, conf)), size, bearing)


def aeb_decision(d: Detection, p: PerceptionParams) -> bool:
    return (d.visible
            and d.confidence >= p.prob_threshold
            and d.apparent_size >= p.size_threshold
            and abs(d.bearing) <= p.centering_limit)
