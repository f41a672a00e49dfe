"""Seedable perception faults for the ego AV."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

from .simulator.config import FaultValues, PerceptionParams


class FaultId(str, enum.Enum):
    NONE = "none"
    F1 = "f1"
    F2 = "f2"
    F3 = "f3"


@dataclass(frozen=True)
class FaultSpec:
    id: FaultId
    description: str
    field: str | None
    value: float | None


def catalog(values: FaultValues = FaultValues()) -> list[FaultSpec]:
    return [
        FaultSpec(FaultId.NONE, "no fault seeded", None, None),
        FaultSpec(FaultId.F1, "detection probability threshold set very high",
                  "prob_threshold", values.f1_prob_threshold),
        FaultSpec(FaultId.F2, "centering limits so rigid the OV must be dead centre",
                  "centering_limit", math.radians(values.f2_centering_limit_deg)),
        FaultSpec(FaultId.F3, "object-size threshold so high the OV must be extremely close",
                  "size_threshold", values.f3_size_threshold),
    ]


def apply_fault(p: PerceptionParams, f: FaultId | str,
                values: FaultValues = FaultValues()) -> PerceptionParams:
    """Return ``p`` with the gate parameter targeted by ``f`` overridden."""
    f = FaultId(f)
    spec = next(s for s in catalog(values) if s.id is f)
    if spec.field is None:
        return p
    return replace(p, **{spec.field: spec.value})


def tightens(p: PerceptionParams, spec: FaultSpec) -> bool:
    """Whether the fault makes its AEB gate strictly harder to pass than ``p``."""
    if spec.field is None:
        return False
    current = getattr(p, spec.field)
    if spec.field == "centering_limit":
        return spec.value < current
    return spec.value > current
