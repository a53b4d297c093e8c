"""Multi-seed experiments, parameter sweeps and algorithm comparisons."""

from __future__ import annotations

import dataclasses
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from ..baselines import GaConfig, IcaConfig, PsoConfig, run_ga, run_ica, run_pso
from ..benchmarks import Benchmark, get_benchmark
from ..core import ConfigError, SearchDomain, check_positive_int, check_seed
from ..engine import EngineConfig, RunResult, run

log = logging.getLogger(__name__)

__all__ = [
    "ALGORITHMS",
    "ComparisonBundle",
    "ComparisonSpec",
    "ExperimentResult",
    "ExperimentSpec",
    "SweepRow",
    "SweepSpec",
    "compare",
    "run_experiment",
    "sweep",
]


@dataclass(frozen=True)
class Algorithm:
    id: str
    config_type: type
    runner: Callable[..., RunResult]

    @property
    def parameters(self) -> tuple[str, ...]:
        """Config fields settable from an experiment's config block."""
        return tuple(f.name for f in dataclasses.fields(self.config_type)
                     if f.name not in ("seed", "init_seed"))

    def defaults(self) -> dict[str, Any]:
        return {f.name: f.default for f in dataclasses.fields(self.config_type)
                if f.name not in ("seed", "init_seed")}


ALGORITHMS = {
    "da": Algorithm("da", EngineConfig, run),
    "ga": Algorithm("ga", GaConfig, run_ga),
    "pso": Algorithm("pso", PsoConfig, run_pso),
    "ica": Algorithm("ica", IcaConfig, run_ica),
}


def _prefixed(exc: ConfigError, prefix: str) -> ConfigError:
    key = f"{prefix}.{exc.key}" if exc.key else prefix
    return ConfigError(f"{key}: {exc}", key=key)


@dataclass(frozen=True)
class ExperimentSpec:
    """One algorithm on one benchmark, repeated over a list of seeds.

    ``init_seeds`` (same length as ``seeds``) pins the initial-population
    seed of each run independently of its operator seed; runs whose
    algorithms share a codec then start from identical populations.
    """

    algorithm: str
    benchmark: str
    seeds: tuple[int, ...]
    config: dict = field(default_factory=dict)
    benchmark_params: dict = field(default_factory=dict)
    lower: tuple[float, ...] | None = None
    upper: tuple[float, ...] | None = None
    bits_per_var: int = 16
    init_seeds: tuple[int, ...] | None = None
    label: str | None = None
    output_dir: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "seeds", tuple(self.seeds))
        if self.init_seeds is not None:
            object.__setattr__(self, "init_seeds", tuple(self.init_seeds))
        for name in ("lower", "upper"):
            value = getattr(self, name)
            if value is not None:
                object.__setattr__(self, name, tuple(float(v) for v in value))
        object.__setattr__(self, "config", dict(self.config))
        object.__setattr__(self, "benchmark_params", dict(self.benchmark_params))

    @property
    def name(self) -> str:
        return self.label or self.algorithm

    @property
    def algo(self) -> Algorithm:
        try:
            return ALGORITHMS[self.algorithm]
        except KeyError:
            raise ConfigError(f"unknown algorithm id {self.algorithm!r}; expected one of {tuple(ALGORITHMS)}",
                              key="algorithm") from None

    def validate(self) -> None:
        """Check everything a run would need; raises ``ConfigError`` with a key path."""
        algo = self.algo
        if not self.seeds:
            raise ConfigError("seeds must be a non-empty list", key="seeds")
        for s in self.seeds:
            check_seed(s, "seeds")
        if self.init_seeds is not None:
            if len(self.init_seeds) != len(self.seeds):
                raise ConfigError(f"init_seeds must match seeds in length ({len(self.seeds)}), "
                                  f"got {len(self.init_seeds)}", key="init_seeds")
            for s in self.init_seeds:
                check_seed(s, "init_seeds")
        unknown = sorted(set(self.config) - set(algo.parameters))
        if unknown:
            raise ConfigError(f"config.{unknown[0]}: unknown parameter for algorithm {self.algorithm!r}",
                              key=f"config.{unknown[0]}")
        check_positive_int(self.bits_per_var, "bits_per_var")
        self.problem()
        self.make_config(self.seeds[0])

    def problem(self) -> tuple[Benchmark, SearchDomain]:
        bench = get_benchmark(self.benchmark, **self.benchmark_params)
        try:
            domain = bench.domain(self.bits_per_var, self.lower, self.upper)
        except ConfigError as exc:
            raise _prefixed(exc, "domain") from None
        return bench, domain

    def make_config(self, seed: int, init_seed: int | None = None):
        try:
            return self.algo.config_type(**self.config, seed=seed, init_seed=init_seed)
        except ConfigError as exc:
            raise _prefixed(exc, "config") from None
        except TypeError as exc:
            raise ConfigError(f"config: {exc}", key="config") from None

    def runs(self):
        """``(seed, init_seed)`` per run, in seed-list order."""
        inits = self.init_seeds or (None,) * len(self.seeds)
        return list(zip(self.seeds, inits))


@dataclass(frozen=True)
class Summary:
    n_runs: int
    best_min: float
    best_median: float
    best_max: float
    iterations_min: int
    iterations_median: float
    iterations_max: int


@dataclass
class ExperimentResult:
    spec: ExperimentSpec
    runs: list[RunResult]

    def __len__(self):
        return len(self.runs)

    def __iter__(self):
        return iter(self.runs)

    def __getitem__(self, i):
        return self.runs[i]

    @property
    def summary(self) -> Summary:
        best = np.array([r.best_fitness for r in self.runs])
        its = np.array([r.generations_to_best for r in self.runs])
        return Summary(len(self.runs), float(best.min()), float(np.median(best)), float(best.max()),
                       int(its.min()), float(np.median(its)), int(its.max()))


def run_experiment(spec: ExperimentSpec) -> ExperimentResult:
    """One deterministic run per seed, returned in seed-list order."""
    spec.validate()
    bench, domain = spec.problem()
    results = []
    for seed, init_seed in spec.runs():
        config = spec.make_config(seed, init_seed)
        result = spec.algo.runner(config, bench.objective, domain)
        log.info("%s on %s seed %d: best %.6f at iteration %d", spec.name, spec.benchmark, seed,
                 result.best_fitness, result.generations_to_best)
        results.append(result)
    return ExperimentResult(spec, results)


@dataclass(frozen=True)
class SweepSpec:
    base: ExperimentSpec
    parameter: str
    values: tuple[float, ...]
    seeds: tuple[int, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        if self.seeds is not None:
            object.__setattr__(self, "seeds", tuple(self.seeds))

    def validate(self) -> None:
        if self.parameter not in self.base.algo.parameters:
            raise ConfigError(f"parameter: {self.parameter!r} is not a {self.base.algorithm} parameter",
                              key="parameter")
        if not self.values:
            raise ConfigError("values must be a non-empty list", key="values")
        for v in self.values:
            self.point(v).validate()

    def point(self, value) -> ExperimentSpec:
        config = dict(self.base.config)
        config[self.parameter] = value
        changes = {"config": config}
        if self.seeds is not None:
            changes.update(seeds=self.seeds, init_seeds=None)
        return dataclasses.replace(self.base, **changes)


@dataclass(frozen=True)
class SweepRow:
    parameter_value: float
    best_solution: float
    iterations: float


def sweep(spec: SweepSpec) -> list[SweepRow]:
    """Median best solution and median iterations-to-best per swept value, ascending."""
    spec.validate()
    rows = []
    for value in sorted(spec.values):
        summary = run_experiment(spec.point(value)).summary
        rows.append(SweepRow(value, summary.best_median, summary.iterations_median))
    return rows


@dataclass(frozen=True)
class ComparisonSpec:
    experiments: tuple[ExperimentSpec, ...]
    threshold: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "experiments", tuple(self.experiments))

    def validate(self) -> None:
        if not self.experiments:
            raise ConfigError("experiments must be a non-empty list", key="experiments")
        names = [e.name for e in self.experiments]
        if len(set(names)) != len(names):
            raise ConfigError(f"experiment labels must be unique, got {names}", key="experiments")
        for k, e in enumerate(self.experiments):
            try:
                e.validate()
            except ConfigError as exc:
                raise _prefixed(exc, f"experiments[{k}]") from None
        first = self.experiments[0]
        ref = (first.benchmark, first.benchmark_params, first.problem()[1].lower, first.problem()[1].upper)
        for k, e in enumerate(self.experiments[1:], start=1):
            if (e.benchmark, e.benchmark_params, e.problem()[1].lower, e.problem()[1].upper) != ref:
                raise ConfigError("all compared experiments must share one benchmark and domain",
                                  key=f"experiments[{k}].benchmark")
        if self.threshold is not None and not (isinstance(self.threshold, (int, float))
                                               and math.isfinite(self.threshold)):
            raise ConfigError(f"threshold must be a finite number, got {self.threshold!r}", key="threshold")


@dataclass
class ComparisonBundle:
    """Median best-fitness traces of several algorithms on a shared iteration axis.

    ``first_to_threshold[name]`` is the median first iteration at which a
    run reached ``threshold``, or ``None`` ("never") when the median run
    never did.
    """

    names: list[str]
    traces: dict[str, list[float]]
    threshold: float | None = None
    first_to_threshold: dict[str, float | None] = field(default_factory=dict)
    results: dict[str, ExperimentResult] = field(default_factory=dict, repr=False)

    @property
    def n_iterations(self) -> int:
        return max((len(t) for t in self.traces.values()), default=0)


def first_iteration_reaching(result: RunResult, threshold: float) -> float:
    for record in result.trace:
        if record.best_fitness >= threshold:
            return float(record.generation)
    return math.inf


def bundle_results(results: Sequence[ExperimentResult], threshold: float | None = None) -> ComparisonBundle:
    names = [r.spec.name for r in results]
    length = max(len(run.trace) for r in results for run in r.runs)
    traces, firsts = {}, {}
    for name, res in zip(names, results):
        # hold the last best value if runs differ in length
        mat = np.array([[run.trace[min(i, len(run.trace) - 1)].best_fitness for i in range(length)]
                        for run in res.runs])
        traces[name] = [float(v) for v in np.median(mat, axis=0)]
        if threshold is not None:
            med = float(np.median([first_iteration_reaching(run, threshold) for run in res.runs]))
            firsts[name] = None if math.isinf(med) else med
    return ComparisonBundle(names, traces, threshold, firsts, dict(zip(names, results)))


def compare(specs: ComparisonSpec | Sequence[ExperimentSpec], threshold: float | None = None
            ) -> ComparisonBundle:
    if not isinstance(specs, ComparisonSpec):
        specs = ComparisonSpec(tuple(specs), threshold)
    elif threshold is not None:
        specs = dataclasses.replace(specs, threshold=threshold)
    specs.validate()
    return bundle_results([run_experiment(s) for s in specs.experiments], specs.threshold)
