"""Situation generation: inverse-SoftMax coverage sampling and the random baseline."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .hyperspace import Hyperspace, HyperspaceError, Situation
from .metrics import LABEL_AXIS, CoverageReport, coverage_from_counts


class GenerationMode(str, enum.Enum):
    SITCOV = "sitcov"
    RANDOM = "random"


@dataclass(frozen=True)
class WeightVector:
    weights: np.ndarray
    temperature: float

    def __len__(self) -> int:
        return len(self.weights)


@dataclass
class CoverageState:
    """Per-bin generation counters for every element plus the label axis."""

    env_counts: dict[str, np.ndarray]
    label_counts: np.ndarray
    total_generated: int = 0

    @classmethod
    def fresh(cls, h: Hyperspace) -> CoverageState:
        return cls({e.id: np.zeros(e.n_bins, dtype=np.int64) for e in h.elements},
                   np.zeros(len(h.labels), dtype=np.int64), 0)

    def copy(self) -> CoverageState:
        return CoverageState({k: v.copy() for k, v in self.env_counts.items()},
                             self.label_counts.copy(), self.total_generated)

    def check_shape(self, h: Hyperspace) -> None:
        if list(self.env_counts) != list(h.element_ids):
            raise HyperspaceError("coverage state elements do not match the hyperspace")
        for e in h.elements:
            if len(self.env_counts[e.id]) != e.n_bins:
                raise HyperspaceError(f"coverage state has wrong bin count for {e.id}")
        if len(self.label_counts) != len(h.labels):
            raise HyperspaceError("coverage state has wrong label count")


def inverse_softmax_weights(counts, temperature: float = 1.0) -> WeightVector:
    """Selection weights that favour rarely generated bins.

    SoftMax over the counts, reciprocal, renormalise. The reciprocal of a
    SoftMax component is proportional to ``exp(-c_i / T)``, so this is the
    SoftMax of the negated counts; it is evaluated shifted by ``min(c)`` to
    stay finite for large counts.
    """
    c = np.asarray(counts, dtype=float)
    if c.ndim != 1 or c.size == 0:
        raise ValueError("counts must be a non-empty 1-D array")
    if not np.all(np.isfinite(c)):
        raise ValueError("counts must be finite")
    if not (temperature > 0 and math.isfinite(temperature)):
        raise ValueError("temperature must be positive")
    z = np.exp(-(c - c.min()) / temperature)
    return WeightVector(z / z.sum(), float(temperature))


def weighted_choice(w: WeightVector, rng: np.random.Generator) -> int:
    """Draw an index with probability ``w.weights[i]``; consumes one uniform."""
    u = rng.random()
    cdf = np.cumsum(w.weights)
    i = int(np.searchsorted(cdf, u * cdf[-1], side="right"))
    return min(i, len(cdf) - 1)


def next_situation(state: CoverageState, h: Hyperspace, mode: GenerationMode,
                   rng: np.random.Generator, temperature: float = 1.0) -> Situation:
    """Pick the next situation; ``state`` is not modified."""
    state.check_shape(h)
    mode = GenerationMode(mode)

    def pick(counts: np.ndarray) -> int:
        if mode is GenerationMode.SITCOV:
            return weighted_choice(inverse_softmax_weights(counts, temperature), rng)
        return weighted_choice(WeightVector(np.full(len(counts), 1.0 / len(counts)),
                                            temperature), rng)

    bins = {e.id: pick(state.env_counts[e.id]) for e in h.elements}
    label = h.labels[pick(state.label_counts)].label
    return Situation(bins, label)


def record_generation(state: CoverageState, s: Situation, h: Hyperspace) -> CoverageState:
    """Return a copy of ``state`` with the bins used by ``s`` incremented."""
    h.validate_situation(s)
    new = state.copy()
    for eid, b in s.env_bins.items():
        new.env_counts[eid][b] += 1
    new.label_counts[h.label_index(s.label)] += 1
    new.total_generated += 1
    return new


def coverage_metrics(state: CoverageState) -> CoverageReport:
    counts = {**state.env_counts, LABEL_AXIS: state.label_counts}
    return coverage_from_counts(counts, state.total_generated)
