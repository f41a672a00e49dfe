"""Fixed-timestep simulation of one ego-AV vs OV encounter."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any

from ..faults import FaultId, apply_fault
from ..hyperspace import ConflictInteraction, Hyperspace, Situation, resolve_label
from ..rng import run_stream
from .config import GeometryConfig, SimConfig
from .geometry import GeometryError, IntersectionGeometry, Path, build_geometry, check_interaction
from .perception import EnvConditions, aeb_decision, perceive, visibility_factor
from .physics import VehicleState, brake_step, collision_check

_ROUND = 6


@dataclass(frozen=True)
class SpawnPlan:
    av_offset: float
    ov_offset: float
    av_conflict_progress: float
    ov_conflict_progress: float
    arrival_time: float


def calibrate_spawns(geom: IntersectionGeometry, interaction: ConflictInteraction,
                     v_av: float, v_ov: float, approach_distance: float = 60.0) -> SpawnPlan:
    """Spawn offsets along both paths so that, without braking, both vehicle
    centres reach the conflict point at the same instant.

    The AV starts ``approach_distance`` before the conflict point; the OV
    distance is scaled by the speed ratio.
    """
    if v_av <= 0 or v_ov <= 0:
        raise ValueError("speeds must be positive")
    cp = geom.conflict_points[interaction.conflict_point]
    av = geom.path(interaction.av_start, interaction.av_goal)
    ov = geom.path(interaction.ov_start, interaction.ov_goal)
    s_av, s_ov = av.project(cp), ov.project(cp)
    t = approach_distance / v_av
    av_off, ov_off = s_av - approach_distance, s_ov - v_ov * t
    if av_off < 0 or ov_off < 0:
        raise GeometryError(f"{interaction}: spawn offset exceeds the path length")
    return SpawnPlan(av_off, ov_off, s_av, s_ov, t)


@lru_cache(maxsize=8)
def _geometry(params: GeometryConfig) -> IntersectionGeometry:
    return build_geometry(params)


@dataclass
class World:
    av_path: Path
    ov_path: Path
    ego: VehicleState
    ov: VehicleState
    plan: SpawnPlan
    decel: float
    swerve_planned: bool
    swerve_trigger: float
    tick: int = 0
    braking: bool = False
    swerving: bool = False

    def place(self) -> None:
        self.ego.x, self.ego.y, self.ego.heading = self.av_path.pose(self.ego.progress)
        if not self.swerving:
            self.ov.x, self.ov.y, self.ov.heading = self.ov_path.pose(self.ov.progress)


def step(world: World, dt: float) -> World:
    """Advance the world by one tick (in place; returned for chaining)."""
    k = world.tick + 1
    ego = world.ego
    if world.braking:
        ego.speed, ds = brake_step(ego.speed, world.decel, dt)
        ego.progress += ds
    elif ego.speed > 0:
        # unbraked motion is evaluated in closed form so calibrated meetings are exact
        ego.progress = world.plan.av_offset + ego.speed * dt * k
    ov = world.ov
    if (world.swerve_planned and not world.swerving
            and ov.progress >= world.plan.ov_conflict_progress - world.swerve_trigger):
        world.swerving = True
    if world.swerving:
        ov.heading = math.atan2(ego.y - ov.y, ego.x - ov.x)
        ov.x += ov.speed * dt * math.cos(ov.heading)
        ov.y += ov.speed * dt * math.sin(ov.heading)
    else:
        ov.progress = world.plan.ov_offset + ov.speed * dt * k
    world.tick = k
    world.place()
    return world


@dataclass
class RunOutcome:
    situation: Situation
    fault: FaultId
    seed_lineage: tuple[int, int]
    collided: bool
    braked: bool
    min_separation: float
    collision_tick: int | None
    brake_tick: int | None
    end_tick: int
    ov_swerved: bool
    timed_out: bool = False
    trace: list[dict[str, Any]] | None = field(default=None, compare=True)

    def braking_ticks(self) -> range:
        """Ticks during which the (latched) AEB command was active."""
        if self.brake_tick is None:
            return range(0)
        return range(self.brake_tick, self.end_tick)

    def to_dict(self) -> dict[str, Any]:
        d = {
            "situation": self.situation.to_dict(),
            "fault": self.fault.value,
            "seed_lineage": list(self.seed_lineage),
            "collided": self.collided,
            "braked": self.braked,
            "min_separation": self.min_separation,
            "collision_tick": self.collision_tick,
            "brake_tick": self.brake_tick,
            "end_tick": self.end_tick,
            "ov_swerved": self.ov_swerved,
            "timed_out": self.timed_out,
        }
        if self.trace is not None:
            d["trace"] = self.trace
        return d

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> RunOutcome:
        return cls(
            situation=Situation.from_dict(d["situation"]),
            fault=FaultId(d["fault"]),
            seed_lineage=(int(d["seed_lineage"][0]), int(d["seed_lineage"][1])),
            collided=bool(d["collided"]),
            braked=bool(d["braked"]),
            min_separation=float(d["min_separation"]),
            collision_tick=d["collision_tick"],
            brake_tick=d["brake_tick"],
            end_tick=int(d["end_tick"]),
            ov_swerved=bool(d["ov_swerved"]),
            timed_out=bool(d.get("timed_out", False)),
            trace=d.get("trace"),
        )


def _r(x: float) -> float:
    return round(x, _ROUND) + 0.0


def run(situation: Situation, fault: FaultId | str, seed_lineage: tuple[int, int],
        config: SimConfig, hyperspace: Hyperspace, trace: bool = False,
        stop_on_collision: bool = True) -> RunOutcome:
    """Simulate one situation. Pure function of its arguments."""
    hyperspace.validate_situation(situation)
    fault = FaultId(fault)
    geom = _geometry(config.geometry)
    interaction = resolve_label(hyperspace, situation.label)
    check_interaction(geom, interaction)
    env = EnvConditions.from_values(hyperspace.env_values(situation))
    params = apply_fault(config.aeb, fault, config.faults)
    phys, pcfg = config.physics, config.perception
    plan = calibrate_spawns(geom, interaction, phys.av_speed, phys.ov_speed,
                            phys.approach_distance)
    rng = run_stream(*seed_lineage)
    swerve_planned = bool(rng.random() < phys.p_swerve)

    hl, hw = phys.vehicle_length / 2, phys.vehicle_width / 2
    world = World(
        av_path=geom.path(interaction.av_start, interaction.av_goal),
        ov_path=geom.path(interaction.ov_start, interaction.ov_goal),
        ego=VehicleState(plan.av_offset, phys.av_speed, hl, hw),
        ov=VehicleState(plan.ov_offset, phys.ov_speed, hl, hw),
        plan=plan,
        decel=env.friction * phys.g_accel,
        swerve_planned=swerve_planned,
        swerve_trigger=phys.swerve_trigger_distance,
    )
    world.place()
    visibility = visibility_factor(env, pcfg.attenuation)
    ov_clear = plan.ov_conflict_progress + phys.ov_clear_distance

    min_sep = math.inf
    collision_tick: int | None = None
    brake_tick: int | None = None
    timed_out = False
    log: list[dict[str, Any]] | None = [] if trace else None
    while True:
        k = world.tick
        ego, ov = world.ego, world.ov
        min_sep = min(min_sep, math.hypot(ego.x - ov.x, ego.y - ov.y))
        if collision_tick is None and collision_check(ego, ov):
            collision_tick = k
            if stop_on_collision:
                break
        if ego.progress >= world.av_path.length:
            break
        if not world.swerving and ov.progress >= ov_clear:
            break
        if k >= phys.max_ticks:
            timed_out = True
            break
        det = perceive(ego.pose, ov.position, phys.vehicle_width, env, rng, pcfg, visibility)
        if config.aeb_enabled and not world.braking and aeb_decision(det, params):
            world.braking = True
            brake_tick = k
        if log is not None:
            log.append({
                "tick": k,
                "ego": [_r(ego.x), _r(ego.y), _r(ego.heading), _r(ego.speed)],
                "ov": [_r(ov.x), _r(ov.y), _r(ov.heading)],
                "visible": det.visible,
                "confidence": _r(det.confidence),
                "apparent_size": _r(det.apparent_size),
                "bearing": _r(det.bearing),
                "brake": world.braking,
            })
        step(world, phys.dt)

    return RunOutcome(
        situation=situation,
        fault=fault,
        seed_lineage=(int(seed_lineage[0]), int(seed_lineage[1])),
        collided=collision_tick is not None,
        braked=brake_tick is not None,
        min_separation=_r(min_sep),
        collision_tick=collision_tick,
        brake_tick=brake_tick,
        end_tick=world.tick,
        ov_swerved=world.swerving,
        timed_out=timed_out,
        trace=log,
    )
