"""Command-line experiment runner.

    sitcov run --mode sitcov --fault none --out results/nf.json
    sitcov compare results/nf.json results/f1.json results/f2.json
    sitcov report results/nf.json --format csv --out results/nf_csv
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from .experiment import DEFAULT_SEEDS, ExperimentPlan, run_experiment
from .faults import FaultId
from .generator import GenerationMode
from .hyperspace import HyperspaceError, load_hyperspace
from .metrics import (LABEL_AXIS, ExperimentResult, IntegrityError, export, read_result,
                      render_table, triggered_table)
from .simulator.config import ConfigError
from .simulator.geometry import GeometryError

EXIT_OK, EXIT_USAGE, EXIT_INTEGRITY, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {v}")
    return v


def _seeds(values: Sequence[str]) -> tuple[int, ...]:
    out = []
    for v in values:
        for part in v.split(","):
            if part.strip():
                try:
                    out.append(int(part))
                except ValueError:
                    raise UsageError(f"invalid seed {part!r}") from None
    return tuple(out)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="sitcov", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("run", help="generate, simulate and record one experiment set")
    r.add_argument("--mode", choices=[m.value for m in GenerationMode], default="sitcov")
    r.add_argument("--fault", choices=[f.value for f in FaultId], default="none")
    r.add_argument("--batch-size", type=_positive, default=20)
    r.add_argument("--batches", type=_positive, default=1, help="batches per master seed")
    r.add_argument("--seeds", nargs="+", default=[",".join(map(str, DEFAULT_SEEDS))],
                   help="master seeds, space or comma separated")
    r.add_argument("--config", help="simulator config YAML (default: bundled)")
    r.add_argument("--hyperspace", help="hyperspace config YAML (default: bundled)")
    r.add_argument("--out", required=True, help="results JSON path")
    r.add_argument("--trace", action="store_true", help="store per-tick traces in the results")
    r.add_argument("--jobs", type=_positive, default=1, help="parallel simulation workers")
    r.add_argument("--carry-coverage", action="store_true",
                   help="keep coverage counters across master seeds")

    c = sub.add_parser("compare", help="triggered-faults table against a no-fault baseline")
    c.add_argument("baseline")
    c.add_argument("faulted", nargs="+")
    c.add_argument("--hyperspace")
    c.add_argument("--out", help="write the table as JSON here")

    rep = sub.add_parser("report", help="coverage summary and exports of a results file")
    rep.add_argument("result")
    rep.add_argument("--format", choices=["json", "csv"], default="csv")
    rep.add_argument("--out", help="export target (file for json, directory for csv)")
    rep.add_argument("--hyperspace")
    return p


def cmd_run(args: argparse.Namespace) -> int:
    plan = ExperimentPlan(
        mode=GenerationMode(args.mode),
        fault=FaultId(args.fault),
        batch_size=args.batch_size,
        batches_per_seed=args.batches,
        master_seeds=_seeds(args.seeds),
        carry_coverage=args.carry_coverage,
        hyperspace_path=args.hyperspace,
        config_path=args.config,
        trace=args.trace,
        jobs=args.jobs,
    )
    result = run_experiment(plan)
    export(result, "json", args.out)
    print(f"{plan.mode.value}/{plan.fault.value}: {len(result.outcomes)} runs, "
          f"{result.failures} failures -> {args.out}")
    return EXIT_OK


def cmd_compare(args: argparse.Namespace) -> int:
    h = load_hyperspace(args.hyperspace)
    baseline = read_result(args.baseline, h)
    if baseline.fault != FaultId.NONE.value:
        raise IntegrityError(f"baseline {args.baseline} has fault {baseline.fault!r}, not 'none'")
    faulted = [read_result(p, h) for p in args.faulted]
    row = triggered_table(baseline, faulted)
    sys.stdout.write(render_table([row]))
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(json.dumps({"rows": [row.to_dict()]}, sort_keys=True, indent=1) + "\n")
    return EXIT_OK


def coverage_summary(result: ExperimentResult) -> str:
    lines = [f"mode={result.mode} fault={result.fault} runs={len(result.outcomes)} "
             f"failures={result.failures}"]
    cov = result.coverage
    lines.append(f"overall coverage: {100 * cov.overall_coverage:.1f}%")
    for axis, st in cov.axes.items():
        tag = "label coverage" if axis == LABEL_AXIS else axis
        lines.append(f"  {tag}: {100 * st.covered:.1f}%  min={st.min} max={st.max} "
                     f"range={st.range} stddev={st.stddev:.3f}")
    return "\n".join(lines) + "\n"


def cmd_report(args: argparse.Namespace) -> int:
    h = load_hyperspace(args.hyperspace)
    src = Path(args.result)
    result = read_result(src, h)
    sys.stdout.write(coverage_summary(result))
    if args.out:
        if Path(args.out).resolve() == src.resolve():
            raise UsageError("refusing to overwrite the input results file")
        for p in export(result, args.format, args.out):
            print(f"wrote {p}")
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"run": cmd_run, "compare": cmd_compare, "report": cmd_report}[args.command]
    try:
        return handler(args)
    except IntegrityError as exc:
        print(f"sitcov: integrity error: {exc}", file=sys.stderr)
        return EXIT_INTEGRITY
    except (UsageError, ConfigError, HyperspaceError, GeometryError, ValueError) as exc:
        print(f"sitcov: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"sitcov: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
