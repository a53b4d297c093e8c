"""Command-line entry point: ``duelist {run,sweep,compare,oracle}``.

Exit codes: 0 on success, 2 on configuration or usage errors (the message
names the offending key), 1 on runtime failures. Files are written only
beneath the ``-o`` output directory. Logging goes to standard error and is
controlled by ``DUELIST_LOG`` (``quiet``, ``info`` or ``debug``) or ``-v``.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import os
import sys
from pathlib import Path
from typing import Sequence

from . import __version__
from .benchmarks import BENCHMARK_IDS, get_benchmark, grid_oracle
from .config import parse_config
from .core import ConfigError
from .harness import (
    ALGORITHMS,
    ComparisonSpec,
    ExperimentSpec,
    SweepSpec,
    bundle_results,
    emit_comparison_csv,
    emit_plot,
    emit_sweep_csv,
    emit_trace_csv,
    run_experiment,
    sweep,
)
from .harness.output import fmt

log = logging.getLogger("duelist")

LOG_LEVELS = {"quiet": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}


class UsageError(Exception):
    """Bad command-line input; reported with exit code 2."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _defaults_epilog() -> str:
    lines = ["algorithm parameters (config block) and their defaults:"]
    for algo in ALGORITHMS.values():
        pairs = ", ".join(f"{k}={v!r}" for k, v in algo.defaults().items())
        lines.append(f"  {algo.id}: {pairs}")
    lines += [
        "",
        "experiment keys: algorithm, benchmark, seeds (required); config={}, benchmark_params={},",
        "  bounds={lower,upper} (benchmark box), bits_per_var=16, init_seeds, label, output_dir",
        f"benchmarks: {', '.join(BENCHMARK_IDS)}",
        "environment: DUELIST_LOG=quiet|info|debug (default quiet)",
    ]
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="duelist", description="Duelist Algorithm experiments and baselines.",
                     epilog=_defaults_epilog(), formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0,
                        help="increase logging (-v info, -vv debug); overrides DUELIST_LOG")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    fmt_cls = argparse.ArgumentDefaultsHelpFormatter

    p = sub.add_parser("run", help="run an experiment (or every experiment of a compare config)",
                       formatter_class=fmt_cls)
    p.add_argument("-c", "--config", required=True, help="JSON config file")
    p.add_argument("-o", "--output", required=True, help="output directory")
    p.add_argument("--seeds", default=None, help="comma-separated seed list overriding the config's seeds")

    p = sub.add_parser("sweep", help="run a parameter sweep", formatter_class=fmt_cls)
    p.add_argument("-c", "--config", required=True, help="JSON sweep config file")
    p.add_argument("-o", "--output", required=True, help="output directory")

    p = sub.add_parser("compare", help="compare algorithms on one benchmark", formatter_class=fmt_cls)
    p.add_argument("-c", "--config", required=True, help="JSON compare config file")
    p.add_argument("-o", "--output", required=True, help="output directory")
    p.add_argument("--plot", action="store_true", help="also write comparison.svg")

    p = sub.add_parser("oracle", help="grid-search ground truth of a 2-D benchmark", formatter_class=fmt_cls)
    p.add_argument("-b", "--benchmark", required=True, choices=list(BENCHMARK_IDS), help="benchmark id")
    p.add_argument("--resolution", type=int, default=2001, help="grid points per axis")
    return parser


def _configure_logging(verbose: int) -> None:
    if verbose:
        level = logging.INFO if verbose == 1 else logging.DEBUG
    else:
        name = os.environ.get("DUELIST_LOG", "quiet").strip().lower() or "quiet"
        if name not in LOG_LEVELS:
            raise UsageError(f"DUELIST_LOG must be one of {', '.join(LOG_LEVELS)}, got {name!r}")
        level = LOG_LEVELS[name]
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    log.handlers[:] = [handler]
    log.setLevel(level)
    log.propagate = False


def _parse_seeds(text: str) -> tuple[int, ...]:
    try:
        seeds = tuple(int(s) for s in text.split(",") if s.strip())
    except ValueError:
        raise ConfigError(f"--seeds must be comma-separated integers, got {text!r}", key="seeds") from None
    if not seeds:
        raise ConfigError("--seeds must name at least one seed", key="seeds")
    return seeds


def _load(path: str, kinds: tuple[type, ...], command: str):
    spec = parse_config(path)
    if not isinstance(spec, kinds):
        raise ConfigError(f"'{command}' cannot use a config of kind {type(spec).__name__}", key="kind")
    return spec


def _summary_line(name: str, seed: int, result) -> str:
    return (f"{name} seed={seed} best_fitness={result.best_fitness:.6f} "
            f"iterations_to_best={result.generations_to_best}")


def _write_experiment(result, out: Path) -> None:
    spec = result.spec
    for (seed, _), run in zip(spec.runs(), result.runs):
        emit_trace_csv(run.trace, out / f"{spec.name}_seed{seed}.csv")
        print(_summary_line(spec.name, seed, run))


def cmd_run(args) -> int:
    spec = _load(args.config, (ExperimentSpec, ComparisonSpec), "run")
    experiments = spec.experiments if isinstance(spec, ComparisonSpec) else (spec,)
    if args.seeds is not None:
        seeds = _parse_seeds(args.seeds)
        experiments = tuple(dataclasses.replace(e, seeds=seeds, init_seeds=None) for e in experiments)
        for e in experiments:
            e.validate()
    out = Path(args.output)
    for e in experiments:
        _write_experiment(run_experiment(e), out)
    return 0


def cmd_sweep(args) -> int:
    spec: SweepSpec = _load(args.config, (SweepSpec,), "sweep")
    rows = sweep(spec)
    out = Path(args.output)
    emit_sweep_csv(rows, out / f"{spec.base.name}_{spec.parameter}_sweep.csv")
    print(f"{spec.parameter:>24} {'best_solution_median':>22} {'iteration_median':>17}")
    for row in rows:
        print(f"{row.parameter_value:>24g} {row.best_solution:>22.6f} {row.iterations:>17g}")
    return 0


def cmd_compare(args) -> int:
    spec: ComparisonSpec = _load(args.config, (ComparisonSpec,), "compare")
    out = Path(args.output)
    results = [run_experiment(e) for e in spec.experiments]
    for result in results:
        _write_experiment(result, out)
    bundle = bundle_results(results, spec.threshold)
    emit_comparison_csv(bundle, out / "comparison.csv")
    if spec.threshold is not None:
        for name in bundle.names:
            first = bundle.first_to_threshold[name]
            shown = "never" if first is None else f"{first:g}"
            print(f"{name} median_first_iteration_to_{fmt(spec.threshold)}={shown}")
    if args.plot:
        emit_plot(bundle, out / "comparison.svg", title=f"best fitness on {spec.experiments[0].benchmark}")
    return 0


def cmd_oracle(args) -> int:
    if args.resolution < 2:
        raise ConfigError(f"--resolution must be >= 2, got {args.resolution}", key="resolution")
    bench = get_benchmark(args.benchmark)
    domain = bench.domain()
    best, point = grid_oracle(bench.objective, domain, resolution=args.resolution)
    coords = ", ".join(f"{c:.6f}" for c in point)
    print(f"{args.benchmark} oracle max={best:.6f} argmax=({coords})")
    return 0


COMMANDS = {"run": cmd_run, "sweep": cmd_sweep, "compare": cmd_compare, "oracle": cmd_oracle}


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        _configure_logging(args.verbose)
        return COMMANDS[args.command](args)
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - every other failure is a runtime error
        log.debug("runtime failure", exc_info=True)
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
