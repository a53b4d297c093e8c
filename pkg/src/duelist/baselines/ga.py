"""Binary-coded genetic algorithm sharing the duelist skillset codec.

Binary tournament selection, single-point crossover, per-bit mutation and
an elite carried over unchanged. The initial population is drawn exactly
like the duelist engine's, so both see the same individuals for a given
``init_seed``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import (
    ConfigError,
    Duelist,
    Evaluator,
    Objective,
    RandomStream,
    SearchDomain,
    check_positive_int,
    check_probability,
    check_seed,
    decode,
    decode_many,
    random_skillset,
)
from ..engine import INIT_STREAM, OPERATOR_STREAM, GenerationRecord, RunResult


@dataclass(frozen=True)
class GaConfig:
    population_size: int = 100
    max_generations: int = 200
    crossover_probability: float = 0.8
    mutation_probability: float = 0.5
    elitism_count: int = 2
    seed: int = 1
    init_seed: int | None = None

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        check_positive_int(self.population_size, "population_size")
        check_positive_int(self.max_generations, "max_generations")
        check_probability(self.crossover_probability, "crossover_probability")
        check_probability(self.mutation_probability, "mutation_probability")
        if (isinstance(self.elitism_count, bool) or not isinstance(self.elitism_count, int)
                or not 0 <= self.elitism_count <= self.population_size):
            raise ConfigError(
                f"elitism_count must be an integer in [0, population_size], got {self.elitism_count!r}",
                key="elitism_count")
        check_seed(self.seed, "seed")
        if self.init_seed is not None:
            check_seed(self.init_seed, "init_seed")


def tournament(fitness: np.ndarray, n: int, rng: RandomStream) -> np.ndarray:
    """Indices of ``n`` binary-tournament winners; a tie goes to the first contestant."""
    contestants = rng.integers(0, fitness.size, size=(n, 2))
    a, b = contestants[:, 0], contestants[:, 1]
    return np.where(fitness[a] >= fitness[b], a, b)


def single_point_crossover(parents_a: np.ndarray, parents_b: np.ndarray, probability: float,
                           rng: RandomStream) -> tuple[np.ndarray, np.ndarray]:
    """Row-wise crossover; cut points are uniform in ``[1, n_bits - 1]``."""
    n, n_bits = parents_a.shape
    do = rng.units(n) < probability
    if n_bits < 2:
        do[:] = False
        cuts = np.ones(n, dtype=np.int64)
    else:
        cuts = rng.integers(1, n_bits, size=n)
    # take the head from the own parent, tail from the other
    tail = (np.arange(n_bits)[None, :] >= cuts[:, None]) & do[:, None]
    return np.where(tail, parents_b, parents_a), np.where(tail, parents_a, parents_b)


def mutate(bits: np.ndarray, probability: float, rng: RandomStream) -> np.ndarray:
    mask = rng.units(bits.size).reshape(bits.shape) < probability
    return bits ^ mask.astype(np.uint8)


def run_ga(config: GaConfig, objective: Objective, domain: SearchDomain) -> RunResult:
    config.validate()
    init_seed = config.seed if config.init_seed is None else config.init_seed
    init_rng = RandomStream(init_seed, INIT_STREAM)
    rng = RandomStream(config.seed, OPERATOR_STREAM)
    evaluator = Evaluator(objective, domain)

    pop = np.stack([random_skillset(domain, init_rng) for _ in range(config.population_size)])
    fitness = evaluator.values(decode_many(pop, domain))
    best_bits, best_fit = pop[int(np.argmax(fitness))].copy(), float(fitness.max())

    n_children = config.population_size - config.elitism_count
    trace = []
    for generation in range(1, config.max_generations + 1):
        order = np.argsort(-fitness, kind="stable")
        elite = order[: config.elitism_count]
        if n_children:
            n_pairs = (n_children + 1) // 2
            parents = tournament(fitness, 2 * n_pairs, rng)
            child_a, child_b = single_point_crossover(pop[parents[:n_pairs]], pop[parents[n_pairs:]],
                                                      config.crossover_probability, rng)
            children = mutate(np.concatenate([child_a, child_b])[:n_children],
                              config.mutation_probability, rng)
            child_fit = evaluator.values(decode_many(children, domain))
            pop = np.concatenate([pop[elite], children])
            fitness = np.concatenate([fitness[elite], child_fit])
        else:
            pop, fitness = pop[elite], fitness[elite]

        i = int(np.argmax(fitness))
        if fitness[i] > best_fit:
            best_bits, best_fit = pop[i].copy(), float(fitness[i])
        trace.append(GenerationRecord(
            generation=generation,
            best_fitness=best_fit,
            mean_fitness=float(fitness.mean()),
            best_point=tuple(float(v) for v in decode(best_bits, domain)),
            evaluations=evaluator.count,
        ))

    return RunResult(
        algorithm="ga",
        best_fitness=best_fit,
        best_point=trace[-1].best_point,
        trace=trace,
        best_duelist=Duelist(best_bits, best_fit),
    )

