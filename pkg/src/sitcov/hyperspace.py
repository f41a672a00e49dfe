"""Situation hyperspace: environmental-condition bins and intersection labels."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Mapping, Sequence

import yaml

ELEMENT_IDS: tuple[str, ...] = (
    "Friction",
    "FogDensity",
    "Precipitation",
    "PrecipitationDeposits",
    "Cloudiness",
    "WindIntensity",
    "Wetness",
    "FogDistance",
)
LEGS = ("L", "R", "B")
CONFLICT_POINTS = ("c1", "c2", "c3", "c4")
BINS_PER_ELEMENT = 6
LABEL_COUNT = 12
FRICTION_MIN = 0.1


class HyperspaceError(ValueError):
    """Raised for a malformed hyperspace configuration."""


@dataclass(frozen=True)
class EnvironmentalElement:
    id: str
    values: tuple[float, ...]

    @property
    def n_bins(self) -> int:
        return len(self.values)

    def value(self, bin_index: int) -> float:
        return self.values[bin_index]


@dataclass(frozen=True)
class ConflictInteraction:
    av_start: str
    av_goal: str
    ov_start: str
    ov_goal: str
    conflict_point: str

    def __str__(self) -> str:
        return (f"{self.conflict_point}: AV {self.av_start}->{self.av_goal} "
                f"x OV {self.ov_start}->{self.ov_goal}")


@dataclass(frozen=True)
class IntersectionSituationLabel:
    label: str
    interaction: ConflictInteraction


@dataclass(frozen=True)
class Situation:
    """One concrete point of the hyperspace.

    ``env_bins`` maps every element id to a bin index; ``label`` names the
    intersection situation.
    """

    env_bins: Mapping[str, int]
    label: str

    def to_dict(self) -> dict[str, Any]:
        return {"env_bins": dict(self.env_bins), "label": self.label}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> Situation:
        return cls(env_bins={k: int(v) for k, v in data["env_bins"].items()},
                   label=str(data["label"]))


@dataclass(frozen=True)
class Hyperspace:
    elements: tuple[EnvironmentalElement, ...]
    labels: tuple[IntersectionSituationLabel, ...]
    _label_index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_label_index",
                           {lab.label: i for i, lab in enumerate(self.labels)})

    @property
    def element_ids(self) -> tuple[str, ...]:
        return tuple(e.id for e in self.elements)

    @property
    def label_names(self) -> tuple[str, ...]:
        return tuple(lab.label for lab in self.labels)

    def element(self, element_id: str) -> EnvironmentalElement:
        for e in self.elements:
            if e.id == element_id:
                return e
        raise KeyError(element_id)

    def label_index(self, label: str) -> int:
        try:
            return self._label_index[label]
        except KeyError:
            raise HyperspaceError(f"unknown label {label!r}") from None

    def validate_situation(self, s: Situation) -> None:
        if set(s.env_bins) != set(self.element_ids):
            raise HyperspaceError(
                f"situation elements {sorted(s.env_bins)} do not match hyperspace")
        for e in self.elements:
            b = s.env_bins[e.id]
            if not 0 <= b < e.n_bins:
                raise HyperspaceError(f"bin {b} out of range for {e.id}")
        self.label_index(s.label)

    def env_values(self, s: Situation) -> dict[str, float]:
        """Physical representative value of each element for a situation."""
        return {e.id: e.value(s.env_bins[e.id]) for e in self.elements}

    def to_config(self) -> dict[str, Any]:
        return {
            "elements": [{"name": e.id, "values": list(e.values)} for e in self.elements],
            "intersections": [
                {"label": lab.label,
                 "av_start": lab.interaction.av_start,
                 "av_goal": lab.interaction.av_goal,
                 "ov_start": lab.interaction.ov_start,
                 "ov_goal": lab.interaction.ov_goal,
                 "conflict_point": lab.interaction.conflict_point}
                for lab in self.labels
            ],
        }


def _check_interaction(label: str, row: Mapping[str, Any]) -> ConflictInteraction:
    try:
        ci = ConflictInteraction(*(str(row[k]) for k in
                                   ("av_start", "av_goal", "ov_start", "ov_goal",
                                    "conflict_point")))
    except KeyError as exc:
        raise HyperspaceError(f"{label}: missing field {exc.args[0]!r}") from None
    for leg in (ci.av_start, ci.av_goal, ci.ov_start, ci.ov_goal):
        if leg not in LEGS:
            raise HyperspaceError(f"{label}: unknown leg {leg!r}")
    if ci.av_start == ci.av_goal:
        raise HyperspaceError(f"{label}: AV start and goal are the same leg")
    if ci.ov_start == ci.ov_goal:
        raise HyperspaceError(f"{label}: OV start and goal are the same leg")
    if ci.conflict_point not in CONFLICT_POINTS:
        raise HyperspaceError(f"{label}: unknown conflict point {ci.conflict_point!r}")
    return ci


def build_hyperspace(config: Mapping[str, Any]) -> Hyperspace:
    """Validate a hyperspace configuration mapping and build the hyperspace.

    Geometric checks (that the named conflict point really lies on both
    paths) belong to :func:`sitcov.simulator.geometry.build_geometry`.
    """
    rows = config.get("elements")
    if not isinstance(rows, list):
        raise HyperspaceError("config has no 'elements' list")
    by_name: dict[str, EnvironmentalElement] = {}
    for row in rows:
        name = row.get("name")
        if name not in ELEMENT_IDS:
            raise HyperspaceError(f"unknown element {name!r}")
        if name in by_name:
            raise HyperspaceError(f"duplicate element {name!r}")
        values = tuple(float(v) for v in row.get("values", ()))
        if len(values) != BINS_PER_ELEMENT:
            raise HyperspaceError(
                f"wrong bin count for {name}: {len(values)} != {BINS_PER_ELEMENT}")
        if not all(math.isfinite(v) for v in values):
            raise HyperspaceError(f"non-finite value in {name}")
        diffs = [b - a for a, b in zip(values, values[1:])]
        if not (all(d > 0 for d in diffs) or all(d < 0 for d in diffs)):
            raise HyperspaceError(f"{name} values are not strictly ordered")
        if name == "Friction":
            if min(values) != FRICTION_MIN or max(values) > 1.0:
                raise HyperspaceError("Friction values must lie in [0.1, 1.0] with minimum 0.1")
        elif min(values) < 0 or max(values) > 100:
            raise HyperspaceError(f"{name} values must lie on the 0-100 scale")
        by_name[name] = EnvironmentalElement(name, values)
    missing = [n for n in ELEMENT_IDS if n not in by_name]
    if missing:
        raise HyperspaceError(f"missing element(s): {', '.join(missing)}")

    table = config.get("intersections")
    if not isinstance(table, list):
        raise HyperspaceError("config has no 'intersections' list")
    labels: list[IntersectionSituationLabel] = []
    seen: set[str] = set()
    for row in table:
        label = str(row.get("label", ""))
        if not label:
            raise HyperspaceError("intersection row without label")
        if label in seen:
            raise HyperspaceError(f"duplicate label {label!r}")
        seen.add(label)
        labels.append(IntersectionSituationLabel(label, _check_interaction(label, row)))
    if len(labels) != LABEL_COUNT:
        raise HyperspaceError(f"expected {LABEL_COUNT} intersection labels, got {len(labels)}")

    return Hyperspace(tuple(by_name[n] for n in ELEMENT_IDS), tuple(labels))


def situation_count(h: Hyperspace) -> int:
    return math.prod(e.n_bins for e in h.elements) * len(h.labels)


def resolve_label(h: Hyperspace, label: str) -> ConflictInteraction:
    return h.labels[h.label_index(label)].interaction


def default_config_text() -> str:
    return resources.files("sitcov.data").joinpath("hyperspace.yaml").read_text()


def load_config(path: str | Path | None = None) -> tuple[dict[str, Any], bytes]:
    """Read a hyperspace YAML file (bundled default when ``path`` is None).

    Returns the parsed mapping and the raw bytes, the latter for fingerprinting.
    """
    if path is None:
        raw = resources.files("sitcov.data").joinpath("hyperspace.yaml").read_bytes()
    else:
        raw = Path(path).read_bytes()
    data = yaml.safe_load(raw)
    if not isinstance(data, dict):
        raise HyperspaceError("hyperspace config must be a mapping")
    return data, raw


def load_hyperspace(path: str | Path | None = None) -> Hyperspace:
    return build_hyperspace(load_config(path)[0])


def dump_hyperspace(h: Hyperspace) -> str:
    return yaml.safe_dump(h.to_config(), sort_keys=False)


def make_situation(h: Hyperspace, bins: Sequence[int] | int, label: str) -> Situation:
    """Convenience constructor: one bin index per element (or one for all)."""
    if isinstance(bins, int):
        bins = [bins] * len(h.elements)
    s = Situation(dict(zip(h.element_ids, (int(b) for b in bins))), label)
    h.validate_situation(s)
    return s
