"""Typed view of the simulator configuration file."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace
from importlib import resources
from pathlib import Path
from typing import Any, Mapping

import yaml

VISUAL_ELEMENTS = ("FogDensity", "Precipitation", "PrecipitationDeposits",
                   "Cloudiness", "Wetness", "FogDistance")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class GeometryConfig:
    lane_width: float = 3.5
    leg_length: float = 100.0


@dataclass(frozen=True)
class PhysicsConfig:
    dt: float = 0.05
    g_accel: float = 9.81
    av_speed: float = 8.0
    ov_speed: float = 8.0
    approach_distance: float = 60.0
    vehicle_length: float = 4.5
    vehicle_width: float = 2.0
    max_ticks: int = 1200
    ov_clear_distance: float = 15.0
    p_swerve: float = 0.05
    swerve_trigger_distance: float = 10.0


@dataclass(frozen=True)
class PerceptionConfig:
    field_of_view_deg: float = 120.0
    camera_constant: float = 1.5
    falloff_distance: float = 50.0
    falloff_exponent: float = 2.0
    noise: float = 0.05
    attenuation: Mapping[str, float] = field(default_factory=lambda: {
        "FogDensity": 0.06, "Precipitation": 0.04, "PrecipitationDeposits": 0.26,
        "Cloudiness": 0.02, "Wetness": 0.025, "FogDistance": 0.05})

    @property
    def field_of_view(self) -> float:
        return math.radians(self.field_of_view_deg)


@dataclass(frozen=True)
class PerceptionParams:
    """The three AEB gate parameters of the ego AV.

    ``size_threshold`` is the minimum apparent size (fraction of the image)
    of the OV, ``prob_threshold`` the minimum detection confidence and
    ``centering_limit`` the largest bearing off the ego heading, in radians.
    """

    prob_threshold: float = 0.60
    size_threshold: float = 0.10
    centering_limit: float = math.radians(50.0)

    def __post_init__(self) -> None:
        for name in ("prob_threshold", "size_threshold"):
            v = getattr(self, name)
            if not 0 < v <= 1:
                raise ConfigError(f"{name} must lie in (0, 1], got {v}")
        if not 0 < self.centering_limit <= math.pi:
            raise ConfigError("centering_limit must lie in (0, pi]")


@dataclass(frozen=True)
class FaultValues:
    f1_prob_threshold: float = 0.95
    f2_centering_limit_deg: float = 10.0
    f3_size_threshold: float = 0.20


@dataclass(frozen=True)
class SimConfig:
    temperature: float = 1.0
    geometry: GeometryConfig = GeometryConfig()
    physics: PhysicsConfig = PhysicsConfig()
    perception: PerceptionConfig = PerceptionConfig()
    aeb: PerceptionParams = PerceptionParams()
    faults: FaultValues = FaultValues()
    aeb_enabled: bool = True

    def with_(self, **sections: Any) -> SimConfig:
        """Copy with some fields of sub-sections replaced.

        ``cfg.with_(physics={"p_swerve": 0.0})`` or ``cfg.with_(aeb_enabled=False)``.
        """
        out = self
        for name, value in sections.items():
            if isinstance(value, Mapping):
                out = replace(out, **{name: replace(getattr(out, name), **value)})
            else:
                out = replace(out, **{name: value})
        return out


def _section(cls, data: Mapping[str, Any] | None, name: str):
    data = dict(data or {})
    known = {f.name for f in fields(cls)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown key(s) in [{name}]: {', '.join(sorted(unknown))}")
    return cls(**data)


def build_sim_config(data: Mapping[str, Any]) -> SimConfig:
    unknown = set(data) - {"generator", "geometry", "physics", "perception", "aeb", "faults"}
    if unknown:
        raise ConfigError(f"unknown section(s): {', '.join(sorted(unknown))}")
    temperature = float((data.get("generator") or {}).get("temperature", 1.0))
    if not temperature > 0:
        raise ConfigError("generator.temperature must be positive")
    aeb = dict(data.get("aeb") or {})
    if "centering_limit_deg" in aeb:
        aeb["centering_limit"] = math.radians(float(aeb.pop("centering_limit_deg")))
    perception = dict(data.get("perception") or {})
    att = perception.get("attenuation")
    if att is not None:
        if set(att) != set(VISUAL_ELEMENTS):
            raise ConfigError(f"attenuation must list exactly {', '.join(VISUAL_ELEMENTS)}")
        if not all(0 < float(a) < 1 for a in att.values()):
            raise ConfigError("attenuation coefficients must lie in (0, 1)")
        perception["attenuation"] = {k: float(att[k]) for k in VISUAL_ELEMENTS}
    cfg = SimConfig(
        temperature=temperature,
        geometry=_section(GeometryConfig, data.get("geometry"), "geometry"),
        physics=_section(PhysicsConfig, data.get("physics"), "physics"),
        perception=_section(PerceptionConfig, perception, "perception"),
        aeb=_section(PerceptionParams, aeb, "aeb"),
        faults=_section(FaultValues, data.get("faults"), "faults"),
    )
    p = cfg.physics
    if p.dt <= 0 or p.av_speed <= 0 or p.ov_speed <= 0 or p.max_ticks <= 0:
        raise ConfigError("dt, speeds and max_ticks must be positive")
    if not 0 <= p.p_swerve <= 1:
        raise ConfigError("p_swerve must lie in [0, 1]")
    return cfg


def load_sim_config(path: str | Path | None = None) -> tuple[SimConfig, bytes]:
    """Load the simulator YAML (bundled default when ``path`` is None)."""
    if path is None:
        raw = resources.files("sitcov.data").joinpath("simulator.yaml").read_bytes()
    else:
        raw = Path(path).read_bytes()
    data = yaml.safe_load(raw) or {}
    if not isinstance(data, dict):
        raise ConfigError("simulator config must be a mapping")
    return build_sim_config(data), raw
