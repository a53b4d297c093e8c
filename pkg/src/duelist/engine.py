"""Duelist Algorithm.

One generation::

    select champions -> clone them -> shuffle non-champions + clones into pairs
    -> duel each pair -> losers learn, winners innovate -> re-evaluate changed
    duelists -> keep the best ``population_size`` of champions + duelers

Champions sit the generation out and only return for elimination, so the
best fitness can never drop from one generation to the next.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, fields
from typing import Sequence

import numpy as np

from .core import (
    Category,
    ConfigError,
    ContractViolation,
    Duelist,
    EvaluationError,
    Evaluator,
    Objective,
    RandomStream,
    SearchDomain,
    check_positive_int,
    check_probability,
    check_real,
    check_seed,
    decode,
    random_skillset,
)

log = logging.getLogger(__name__)

# independent draw sequences derived from one seed
INIT_STREAM = 0
OPERATOR_STREAM = 1


@dataclass(frozen=True)
class EngineConfig:
    population_size: int = 100
    max_generations: int = 200
    luck_coefficient: float = 0.0
    learning_probability: float = 0.5
    innovation_probability: float = 0.5
    champion_count: int = 5
    seed: int = 1
    # seed of the initial population only; None means ``seed``
    init_seed: int | None = None

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        for name in ("population_size", "max_generations", "champion_count"):
            check_positive_int(getattr(self, name), name)
        if self.champion_count >= self.population_size:
            raise ConfigError(
                f"champion_count ({self.champion_count}) must be smaller than "
                f"population_size ({self.population_size})", key="champion_count")
        check_probability(self.learning_probability, "learning_probability")
        check_probability(self.innovation_probability, "innovation_probability")
        check_real(self.luck_coefficient, "luck_coefficient", minimum=0.0)
        check_seed(self.seed, "seed")
        if self.init_seed is not None:
            check_seed(self.init_seed, "init_seed")


@dataclass(frozen=True)
class GenerationRecord:
    generation: int
    best_fitness: float
    mean_fitness: float
    best_point: tuple[float, ...]
    evaluations: int


@dataclass
class RunResult:
    """Outcome of one optimizer run.

    ``best_duelist`` is only set by the binary-coded algorithms (DA, GA);
    ``best_point``/``best_fitness`` are always set.
    """

    algorithm: str
    best_fitness: float
    best_point: tuple[float, ...]
    trace: list[GenerationRecord]
    best_duelist: Duelist | None = None

    @property
    def generations_to_best(self) -> int:
        """Generation number (1-based) of the first record reaching the final best."""
        return generations_to_best(self.trace)

    @property
    def evaluations(self) -> int:
        return self.trace[-1].evaluations if self.trace else 0


def generations_to_best(trace: Sequence[GenerationRecord]) -> int:
    if not trace:
        return 0
    final = trace[-1].best_fitness
    for record in trace:
        if record.best_fitness == final:
            return record.generation
    raise AssertionError("unreachable: final record matches itself")


def register(config: EngineConfig, domain: SearchDomain, rng: RandomStream) -> list[Duelist]:
    """Initial population of unevaluated duelists with uniform random skillsets."""
    return [Duelist(random_skillset(domain, rng)) for _ in range(config.population_size)]


def prequalify(population: list[Duelist], evaluator: Evaluator) -> list[Duelist]:
    """Evaluate every duelist; an ``EvaluationError`` carries the duelist index."""
    return evaluator.evaluate_many(population)


def _rank(fitness: Sequence[float]) -> np.ndarray:
    # stable sort: descending fitness, ties by lower index
    return np.argsort(-np.asarray(fitness, dtype=np.float64), kind="stable")


def select_champions(population: list[Duelist], champion_count: int
                     ) -> tuple[list[Duelist], list[Duelist]]:
    """Mark the ``champion_count`` fittest duelists as champions.

    Every other duelist is reset to ``UNRANKED``. Returns the champions in
    rank order and an exact, unranked copy (clone) of each.
    """
    if any(d.fitness is None for d in population):
        raise ContractViolation("select_champions needs every duelist evaluated")
    for d in population:
        d.category = Category.UNRANKED
    order = _rank([d.fitness for d in population])[:champion_count]
    champions = [population[i] for i in order]
    for c in champions:
        c.category = Category.CHAMPION
    clones = [c.copy(category=Category.UNRANKED, luck=0.0) for c in champions]
    return champions, clones


def schedule(n_duelers: int, rng: RandomStream) -> tuple[list[tuple[int, int]], int | None]:
    """Random pairing of ``n_duelers`` indices; with an odd count the last shuffled index gets a bye."""
    perm = rng.permutation(n_duelers).tolist()
    pairs = [(perm[k], perm[k + 1]) for k in range(0, n_duelers - 1, 2)]
    bye = perm[-1] if n_duelers % 2 else None
    return pairs, bye


def duel_outcomes(fitness_a, fitness_b, luck_coefficient: float, rng: RandomStream):
    """Vectorized duels between ``fitness_a[k]`` and ``fitness_b[k]``.

    Luck is ``fitness * (lc + u * lc)`` with ``u ~ U[0, 1)`` drawn for every
    side (all ``a`` draws first, then all ``b`` draws). The higher
    ``fitness + luck`` wins; exact ties take one coin draw each, in order.

    Returns
    -------
    a_wins : bool ndarray
    luck_a, luck_b : float ndarray
    """
    fitness_a = np.asarray(fitness_a, dtype=np.float64)
    fitness_b = np.asarray(fitness_b, dtype=np.float64)
    n = fitness_a.size
    lc = luck_coefficient
    u = rng.units(2 * n)
    luck_a = fitness_a * (lc + u[:n] * lc)
    luck_b = fitness_b * (lc + u[n:] * lc)
    total_a = fitness_a + luck_a
    total_b = fitness_b + luck_b
    a_wins = total_a > total_b
    ties = np.flatnonzero(total_a == total_b)
    if ties.size:
        a_wins[ties] = rng.units(ties.size) < 0.5
    return a_wins, luck_a, luck_b


def learn_bits(loser_bits, winner_bits, learning_probability: float, rng: RandomStream):
    """Per-bit copy from winner rows into loser rows; inputs are not modified."""
    loser_bits = np.asarray(loser_bits)
    winner_bits = np.asarray(winner_bits)
    if loser_bits.shape != winner_bits.shape:
        raise ContractViolation(
            f"skillset lengths differ: loser {loser_bits.shape}, winner {winner_bits.shape}")
    mask = rng.units(loser_bits.size).reshape(loser_bits.shape) < learning_probability
    return np.where(mask, winner_bits, loser_bits)


def innovate_bits(bits, innovation_probability: float, rng: RandomStream):
    """Per-bit flips; inputs are not modified."""
    bits = np.asarray(bits)
    mask = rng.units(bits.size).reshape(bits.shape) < innovation_probability
    return bits ^ mask.astype(np.uint8)


def duel(a: Duelist, b: Duelist, luck_coefficient: float, rng: RandomStream
         ) -> tuple[Duelist, Duelist]:
    """Fight ``a`` against ``b``; returns ``(winner, loser)``.

    Luck and category are written onto the two duelists in place.
    """
    if a.fitness is None or b.fitness is None:
        raise ContractViolation("both duelists need a fitness before a duel")
    a_wins, luck_a, luck_b = duel_outcomes([a.fitness], [b.fitness], luck_coefficient, rng)
    a.luck, b.luck = float(luck_a[0]), float(luck_b[0])
    winner, loser = (a, b) if a_wins[0] else (b, a)
    winner.category = Category.WINNER
    loser.category = Category.LOSER
    return winner, loser


def learn(loser: Duelist, winner: Duelist, learning_probability: float,
          rng: RandomStream) -> Duelist:
    """Copy of ``loser`` where each bit is taken from ``winner`` with the given probability."""
    bits = learn_bits(loser.skillset, winner.skillset, learning_probability, rng)
    return _with_bits(loser, bits)


def innovate(winner: Duelist, innovation_probability: float, rng: RandomStream) -> Duelist:
    """Copy of ``winner`` with each bit flipped with the given probability."""
    return _with_bits(winner, innovate_bits(winner.skillset, innovation_probability, rng))


def _with_bits(duelist: Duelist, bits: np.ndarray, changed: bool | None = None) -> Duelist:
    if changed is None:
        changed = bool((bits != duelist.skillset).any())
    return Duelist(bits, None if changed else duelist.fitness, duelist.luck, duelist.category)


def eliminate(merged: list[Duelist], target_size: int) -> list[Duelist]:
    """Keep the ``target_size`` fittest, ordered by fitness then original position."""
    if len(merged) < target_size:
        raise ContractViolation(f"cannot keep {target_size} duelists out of {len(merged)}")
    if any(d.fitness is None for d in merged):
        raise ContractViolation("eliminate needs every duelist evaluated")
    order = _rank([d.fitness for d in merged])[:target_size]
    return [merged[i] for i in order]


def _record(generation: int, population: list[Duelist], domain: SearchDomain,
            evaluations: int) -> GenerationRecord:
    fitness = [d.fitness for d in population]
    best = population[int(_rank(fitness)[0])]
    return GenerationRecord(
        generation=generation,
        best_fitness=float(best.fitness),
        mean_fitness=float(np.mean(fitness)),
        best_point=tuple(float(v) for v in decode(best.skillset, domain)),
        evaluations=evaluations,
    )


def improve(duelers: list[Duelist], pairs: list[tuple[int, int]], config: EngineConfig,
            rng: RandomStream) -> list[Duelist]:
    """Duel every scheduled pair, then let losers learn and winners innovate.

    All pairs are handled at once with the batched kernels. Losers copy from
    their winner as it fought, i.e. before the winner innovates. Changed
    duelists come back unevaluated; a bye keeps its duelist untouched.
    """
    improved = list(duelers)
    if not pairs:
        return improved
    idx = np.asarray(pairs)
    fitness = np.array([d.fitness for d in duelers])
    a_wins, luck_a, luck_b = duel_outcomes(fitness[idx[:, 0]], fitness[idx[:, 1]],
                                           config.luck_coefficient, rng)
    win = np.where(a_wins, idx[:, 0], idx[:, 1])
    lose = np.where(a_wins, idx[:, 1], idx[:, 0])
    for (i, j), la, lb in zip(pairs, luck_a, luck_b):
        duelers[i].luck, duelers[j].luck = float(la), float(lb)
    for w, l in zip(win, lose):
        duelers[w].category = Category.WINNER
        duelers[l].category = Category.LOSER

    bits = np.stack([d.skillset for d in duelers])
    learned = learn_bits(bits[lose], bits[win], config.learning_probability, rng)
    innovated = innovate_bits(bits[win], config.innovation_probability, rng)
    for rows, new in ((lose, learned), (win, innovated)):
        changed = (new != bits[rows]).any(axis=1)
        for k, row in enumerate(rows):
            improved[row] = _with_bits(duelers[row], new[k], bool(changed[k]))
    return improved


def step(population: list[Duelist], config: EngineConfig, evaluator: Evaluator,
         rng: RandomStream) -> list[Duelist]:
    """Advance an evaluated population by one generation."""
    champions, clones = select_champions(population, config.champion_count)
    duelers = [d for d in population if d.category is not Category.CHAMPION] + clones
    pairs, _bye = schedule(len(duelers), rng)
    improved = improve(duelers, pairs, config, rng)

    # post-qualification: only duelists whose skillset changed
    stale = [k for k, d in enumerate(improved) if d.fitness is None]
    try:
        fresh = evaluator.evaluate_many([improved[k] for k in stale])
    except EvaluationError as exc:
        exc.index = stale[exc.index]
        raise
    for k, d in zip(stale, fresh):
        improved[k] = d
    return eliminate(champions + improved, config.population_size)


def run(config: EngineConfig, objective: Objective, domain: SearchDomain) -> RunResult:
    """Run the Duelist Algorithm for ``config.max_generations`` generations.

    The initial population is drawn from stream ``INIT_STREAM`` of
    ``config.init_seed`` (or ``config.seed``); every operator draw comes from
    stream ``OPERATOR_STREAM`` of ``config.seed``.
    """
    config.validate()
    init_seed = config.seed if config.init_seed is None else config.init_seed
    init_rng = RandomStream(init_seed, INIT_STREAM)
    rng = RandomStream(config.seed, OPERATOR_STREAM)
    evaluator = Evaluator(objective, domain)

    population = prequalify(register(config, domain, init_rng), evaluator)
    trace = []
    for generation in range(1, config.max_generations + 1):
        try:
            population = step(population, config, evaluator, rng)
        except EvaluationError as exc:
            exc.generation = generation
            raise
        trace.append(_record(generation, population, domain, evaluator.count))
        log.debug("da gen %d best %.6f mean %.6f", generation, trace[-1].best_fitness,
                  trace[-1].mean_fitness)

    best = population[0]
    return RunResult(
        algorithm="da",
        best_fitness=float(best.fitness),
        best_point=trace[-1].best_point,
        trace=trace,
        best_duelist=best,
    )


def config_fields() -> tuple[str, ...]:
    return tuple(f.name for f in fields(EngineConfig))


def config_to_dict(config: EngineConfig) -> dict:
    return asdict(config)
