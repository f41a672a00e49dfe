"""Failure distributions, coverage statistics, triggered faults and result files."""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, Any, Iterable, Mapping, Sequence

import numpy as np

if TYPE_CHECKING:
    from .hyperspace import Hyperspace
    from .simulator.engine import RunOutcome

LABEL_AXIS = "IntersectionSituation"
FORMAT_VERSION = 1
_DIGITS = 12


class IntegrityError(ValueError):
    """Two result sets cannot be compared, or a file contradicts itself."""


def _round(x: float) -> float:
    return round(float(x), _DIGITS) + 0.0


@dataclass(frozen=True)
class EvennessStats:
    min: int
    max: int
    range: int
    stddev: float
    covered: float

    def to_dict(self) -> dict[str, Any]:
        return {"min": self.min, "max": self.max, "range": self.range,
                "stddev": self.stddev, "covered": self.covered}


def evenness(counts: Sequence[int] | np.ndarray) -> EvennessStats:
    """Descriptive statistics of a count array (population stddev)."""
    c = np.asarray(counts, dtype=np.int64)
    if c.size == 0:
        raise ValueError("counts must be non-empty")
    lo, hi = int(c.min()), int(c.max())
    return EvennessStats(lo, hi, hi - lo, _round(np.std(c.astype(float))),
                         _round(np.count_nonzero(c) / c.size))


@dataclass(frozen=True)
class CoverageReport:
    axes: dict[str, EvennessStats]
    overall_coverage: float
    total_generated: int
    counts: dict[str, list[int]]

    def to_dict(self) -> dict[str, Any]:
        return {"axes": {k: v.to_dict() for k, v in self.axes.items()},
                "overall_coverage": _round(self.overall_coverage),
                "total_generated": self.total_generated,
                "counts": self.counts}

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> CoverageReport:
        return cls({k: EvennessStats(**v) for k, v in d["axes"].items()},
                   float(d["overall_coverage"]), int(d["total_generated"]),
                   {k: [int(x) for x in v] for k, v in d["counts"].items()})

    @property
    def label_coverage(self) -> float:
        return self.axes[LABEL_AXIS].covered


def coverage_from_counts(counts: Mapping[str, Sequence[int]], total: int) -> CoverageReport:
    axes = {k: evenness(v) for k, v in counts.items()}
    covered = sum(int(np.count_nonzero(v)) for v in counts.values())
    n = sum(len(v) for v in counts.values())
    return CoverageReport(axes, _round(covered / n) if n else 0.0, total,
                          {k: [int(x) for x in v] for k, v in counts.items()})


@dataclass(frozen=True)
class BinTally:
    generated: int
    failed: int

    @property
    def rate(self) -> float | None:
        """Failure rate, or ``None`` for a bin that was never generated."""
        if self.generated == 0:
            return None
        return _round(self.failed / self.generated)


@dataclass(frozen=True)
class FailureDistribution:
    axes: dict[str, tuple[BinTally, ...]]
    label_names: tuple[str, ...]

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {}
        for axis, tallies in self.axes.items():
            rows = []
            for i, t in enumerate(tallies):
                row: dict[str, Any] = {"bin": i, "generated": t.generated,
                                       "failed": t.failed, "rate": t.rate}
                if axis == LABEL_AXIS:
                    row["label"] = self.label_names[i]
                rows.append(row)
            out[axis] = rows
        return out

    def total_failures(self, axis: str = LABEL_AXIS) -> int:
        return sum(t.failed for t in self.axes[axis])


def aggregate(outcomes: Iterable[RunOutcome], h: Hyperspace) -> FailureDistribution:
    gen = {e.id: np.zeros(e.n_bins, dtype=np.int64) for e in h.elements}
    fail = {e.id: np.zeros(e.n_bins, dtype=np.int64) for e in h.elements}
    gen[LABEL_AXIS] = np.zeros(len(h.labels), dtype=np.int64)
    fail[LABEL_AXIS] = np.zeros(len(h.labels), dtype=np.int64)
    for o in outcomes:
        hit = 1 if o.collided else 0
        for eid, b in o.situation.env_bins.items():
            gen[eid][b] += 1
            fail[eid][b] += hit
        li = h.label_index(o.situation.label)
        gen[LABEL_AXIS][li] += 1
        fail[LABEL_AXIS][li] += hit
    axes = {k: tuple(BinTally(int(g), int(f)) for g, f in zip(gen[k], fail[k])) for k in gen}
    return FailureDistribution(axes, h.label_names)


@dataclass
class ExperimentResult:
    config_fingerprint: str
    mode: str
    fault: str
    seeds: list[int]
    outcomes: list[RunOutcome]
    coverage: CoverageReport
    per_seed_coverage: list[CoverageReport]
    distribution: FailureDistribution
    meta: dict[str, Any] = field(default_factory=dict)

    @property
    def failures(self) -> int:
        return sum(1 for o in self.outcomes if o.collided)

    def to_dict(self) -> dict[str, Any]:
        return {
            "meta": self.meta,
            "config_fingerprint": self.config_fingerprint,
            "mode": self.mode,
            "fault": self.fault,
            "seeds": list(self.seeds),
            "outcomes": [o.to_dict() for o in self.outcomes],
            "coverage": {"pooled": self.coverage.to_dict(),
                         "per_seed": [c.to_dict() for c in self.per_seed_coverage]},
            "distribution": self.distribution.to_dict(),
        }


def fingerprint(*blobs: bytes) -> str:
    """Content hash over raw configuration bytes."""
    h = hashlib.sha256()
    for b in blobs:
        h.update(len(b).to_bytes(8, "big"))
        h.update(b)
    return h.hexdigest()


def dumps(result: ExperimentResult) -> str:
    return json.dumps(result.to_dict(), sort_keys=True, indent=1, allow_nan=False) + "\n"


def loads(text: str, h: Hyperspace) -> ExperimentResult:
    """Parse a results document, re-deriving and cross-checking its tallies."""
    from .simulator.engine import RunOutcome

    try:
        d = json.loads(text)
        outcomes = [RunOutcome.from_dict(o) for o in d["outcomes"]]
        result = ExperimentResult(
            config_fingerprint=d["config_fingerprint"],
            mode=d["mode"],
            fault=d["fault"],
            seeds=[int(s) for s in d["seeds"]],
            outcomes=outcomes,
            coverage=CoverageReport.from_dict(d["coverage"]["pooled"]),
            per_seed_coverage=[CoverageReport.from_dict(c) for c in d["coverage"]["per_seed"]],
            distribution=aggregate(outcomes, h),
            meta=d.get("meta", {}),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise IntegrityError(f"malformed results document: {exc}") from exc
    if result.distribution.to_dict() != d["distribution"]:
        raise IntegrityError("stored distribution does not match the outcomes")
    return result


def write_result(result: ExperimentResult, path: str | Path) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(dumps(result))
    except OSError as exc:
        raise OSError(f"cannot write results file {path}: {exc.strerror}") from exc
    return path


def read_result(path: str | Path, h: Hyperspace) -> ExperimentResult:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise OSError(f"cannot read results file {path}: {exc.strerror}") from exc
    return loads(text, h)


def _csv_text(rows: list[list[Any]]) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def _fmt_rate(rate: float | None) -> str:
    return "null" if rate is None else f"{rate:.6f}"


def distribution_csvs(dist: FailureDistribution) -> dict[str, str]:
    """One CSV document per axis, keyed by axis name."""
    out = {}
    for axis, tallies in dist.axes.items():
        if axis == LABEL_AXIS:
            rows = [["bin", "label", "generated", "failed", "rate"]]
            rows += [[i, dist.label_names[i], t.generated, t.failed, _fmt_rate(t.rate)]
                     for i, t in enumerate(tallies)]
        else:
            rows = [["bin", "generated", "failed", "rate"]]
            rows += [[i, t.generated, t.failed, _fmt_rate(t.rate)] for i, t in enumerate(tallies)]
        out[axis] = _csv_text(rows)
    return out


def export(result: ExperimentResult, fmt: str, out: str | Path) -> list[Path]:
    """Write ``result`` as a JSON document (``out`` is a file) or as
    per-axis CSV tables (``out`` is a directory)."""
    out = Path(out)
    if fmt == "json":
        return [write_result(result, out)]
    if fmt != "csv":
        raise ValueError(f"unknown export format {fmt!r}")
    written = []
    try:
        out.mkdir(parents=True, exist_ok=True)
        for axis, text in distribution_csvs(result.distribution).items():
            p = out / f"{axis}.csv"
            p.write_text(text)
            written.append(p)
    except OSError as exc:
        raise OSError(f"cannot write CSV export under {out}: {exc.strerror}") from exc
    return written


@dataclass(frozen=True)
class TriggeredRow:
    mode: str
    f_nf: int
    f_faults: dict[str, int | None]

    def triggered(self, fault: str) -> int | None:
        f = self.f_faults.get(fault)
        return None if f is None else f - self.f_nf

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {"mode": self.mode, "f_NF": self.f_nf}
        for k in ("f1", "f2", "f3"):
            d[f"f_{k.upper()}"] = self.f_faults.get(k)
            d[f"triggered_{k.upper()}"] = self.triggered(k)
        return d

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> TriggeredRow:
        row = cls(d["mode"], int(d["f_NF"]),
                  {k: d[f"f_{k.upper()}"] for k in ("f1", "f2", "f3")})
        for k in ("f1", "f2", "f3"):
            if d[f"triggered_{k.upper()}"] != row.triggered(k):
                raise IntegrityError(f"triggered_{k.upper()} does not equal f_{k.upper()} - f_NF")
        return row


def check_comparable(baseline: ExperimentResult, faulted: ExperimentResult) -> None:
    if baseline.mode != faulted.mode:
        raise IntegrityError(f"mode differs: {baseline.mode} vs {faulted.mode}")
    if baseline.seeds != faulted.seeds:
        raise IntegrityError(
            f"seed lists differ: baseline {baseline.seeds} vs faulted {faulted.seeds}")
    if baseline.config_fingerprint != faulted.config_fingerprint:
        raise IntegrityError("config fingerprints differ")
    if baseline.meta.get("layout") != faulted.meta.get("layout"):
        raise IntegrityError(
            f"run layouts differ: {baseline.meta.get('layout')} vs {faulted.meta.get('layout')}")
    if len(baseline.outcomes) != len(faulted.outcomes):
        raise IntegrityError("run counts differ")


def faults_triggered(baseline: ExperimentResult, faulted: ExperimentResult) -> int:
    """Failures beyond the baseline on the identical seed set."""
    check_comparable(baseline, faulted)
    return faulted.failures - baseline.failures


def triggered_table(baseline: ExperimentResult,
                    faulted: Sequence[ExperimentResult]) -> TriggeredRow:
    f_faults: dict[str, int | None] = {"f1": None, "f2": None, "f3": None}
    for r in faulted:
        if r.fault not in f_faults:
            raise IntegrityError(f"unexpected fault {r.fault!r} among faulted results")
        faults_triggered(baseline, r)
        f_faults[r.fault] = r.failures
    return TriggeredRow(baseline.mode, baseline.failures, f_faults)


def render_table(rows: Sequence[TriggeredRow]) -> str:
    head = ["Generation", "f_NF", "f_F1", "f_F2", "f_F3",
            "F1 triggered", "F2 triggered", "F3 triggered"]
    body = []
    for r in rows:
        cells = [r.mode, r.f_nf] + [r.f_faults[k] for k in ("f1", "f2", "f3")]
        cells += [r.triggered(k) for k in ("f1", "f2", "f3")]
        body.append(["-" if c is None else str(c) for c in cells])
    widths = [max(len(x) for x in col) for col in zip(head, *body)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip()
             for row in [head, *body]]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"

