"""Experiment plans: the generate -> simulate -> record loop over master seeds."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from . import __version__
from .faults import FaultId
from .generator import CoverageState, GenerationMode, coverage_metrics, next_situation, record_generation
from .hyperspace import Hyperspace, Situation, build_hyperspace, load_config
from .metrics import LABEL_AXIS, ExperimentResult, aggregate, coverage_from_counts, fingerprint
from .rng import generation_stream
from .simulator.config import SimConfig, load_sim_config
from .simulator.engine import RunOutcome, run

DEFAULT_SEEDS = (0, 1, 2, 3, 4)


@dataclass(frozen=True)
class ExperimentPlan:
    mode: GenerationMode = GenerationMode.SITCOV
    fault: FaultId = FaultId.NONE
    batch_size: int = 20
    batches_per_seed: int = 1
    master_seeds: tuple[int, ...] = DEFAULT_SEEDS
    carry_coverage: bool = False
    hyperspace_path: str | None = None
    config_path: str | None = None
    trace: bool = False
    jobs: int = 1

    def __post_init__(self) -> None:
        if self.batch_size < 1 or self.batches_per_seed < 1:
            raise ValueError("batch size and batch count must be positive")
        if not self.master_seeds:
            raise ValueError("at least one master seed is required")
        if len(set(self.master_seeds)) != len(self.master_seeds):
            raise ValueError("master seeds must be distinct")
        object.__setattr__(self, "mode", GenerationMode(self.mode))
        object.__setattr__(self, "fault", FaultId(self.fault))

    @property
    def runs_per_seed(self) -> int:
        return self.batch_size * self.batches_per_seed

    @property
    def total_runs(self) -> int:
        return self.runs_per_seed * len(self.master_seeds)


@dataclass
class LoadedConfig:
    hyperspace: Hyperspace
    sim: SimConfig
    fingerprint: str
    sources: dict[str, str] = field(default_factory=dict)


def load_configs(hyperspace_path: str | None = None,
                 config_path: str | None = None) -> LoadedConfig:
    hdata, hraw = load_config(hyperspace_path)
    h = build_hyperspace(hdata)
    sim, sraw = load_sim_config(config_path)
    from .simulator.geometry import build_geometry

    build_geometry(sim.geometry, h)
    return LoadedConfig(h, sim, fingerprint(hraw, sraw),
                        {"hyperspace": hyperspace_path or "<bundled>",
                         "simulator": config_path or "<bundled>"})


def generate_situations(h: Hyperspace, mode: GenerationMode, seeds: tuple[int, ...],
                        runs_per_seed: int, temperature: float = 1.0,
                        carry_coverage: bool = False
                        ) -> tuple[list[list[Situation]], list[CoverageState]]:
    """Situation sequence per master seed and the coverage state after each.

    Counters reset per seed unless ``carry_coverage`` pools them.
    """
    per_seed, states = [], []
    state = CoverageState.fresh(h)
    for seed in seeds:
        if not carry_coverage:
            state = CoverageState.fresh(h)
        rng = generation_stream(seed)
        seq = []
        for _ in range(runs_per_seed):
            s = next_situation(state, h, mode, rng, temperature)
            state = record_generation(state, s, h)
            seq.append(s)
        per_seed.append(seq)
        states.append(state)
    return per_seed, states


def _run_one(args) -> RunOutcome:
    situation, fault, lineage, sim, h, trace = args
    return run(situation, fault, lineage, sim, h, trace=trace)


def run_experiment(plan: ExperimentPlan, cfg: LoadedConfig | None = None) -> ExperimentResult:
    cfg = cfg or load_configs(plan.hyperspace_path, plan.config_path)
    h, sim = cfg.hyperspace, cfg.sim
    per_seed, states = generate_situations(h, plan.mode, plan.master_seeds, plan.runs_per_seed,
                                           sim.temperature, plan.carry_coverage)
    jobs = [(s, plan.fault, (seed, k), sim, h, plan.trace)
            for seed, seq in zip(plan.master_seeds, per_seed)
            for k, s in enumerate(seq)]
    if plan.jobs > 1:
        with ProcessPoolExecutor(plan.jobs) as pool:
            outcomes = list(pool.map(_run_one, jobs, chunksize=8))
    else:
        outcomes = [_run_one(j) for j in jobs]

    per_seed_cov = [coverage_metrics(st) for st in states]
    # pooled counts come from the sequences, so carried state is not double counted
    pooled = CoverageState.fresh(h)
    for seq in per_seed:
        for s in seq:
            pooled = record_generation(pooled, s, h)
    counts = {**pooled.env_counts, LABEL_AXIS: pooled.label_counts}
    meta = {
        "tool": "sitcov",
        "version": __version__,
        "layout": {"batch_size": plan.batch_size, "batches_per_seed": plan.batches_per_seed,
                   "carry_coverage": plan.carry_coverage},
        "temperature": sim.temperature,
        "config_sources": cfg.sources,
        "trace": plan.trace,
    }
    return ExperimentResult(
        config_fingerprint=cfg.fingerprint,
        mode=plan.mode.value,
        fault=plan.fault.value,
        seeds=list(plan.master_seeds),
        outcomes=outcomes,
        coverage=coverage_from_counts(counts, pooled.total_generated),
        per_seed_coverage=per_seed_cov,
        distribution=aggregate(outcomes, h),
        meta=meta,
    )
