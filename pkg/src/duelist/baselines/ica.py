"""Imperialist competitive algorithm on real vectors.

Internally works with costs (``cost = -fitness``) like the original
formulation, so "lower is stronger" throughout this module.

Per decade, for every empire: assimilation, revolution, re-evaluation,
then an imperialist/colony swap if a colony became stronger. Afterwards one
round of imperialistic competition hands the weakest colony of the weakest
empire to an empire drawn by power-based roulette. An empire left with no
colonies collapses and its imperialist joins the winner as a colony.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..core import (
    ConfigError,
    Evaluator,
    Objective,
    RandomStream,
    SearchDomain,
    check_positive_int,
    check_probability,
    check_real,
    check_seed,
)
from ..engine import INIT_STREAM, OPERATOR_STREAM, GenerationRecord, RunResult


@dataclass(frozen=True)
class IcaConfig:
    country_count: int = 100
    initial_imperialists: int = 8
    decades: int = 200
    revolution_rate: float = 0.3
    assimilation_coefficient: float = 2.0
    assimilation_angle: float = 0.5
    zeta: float = 0.02
    damp_ratio: float = 0.99
    seed: int = 1
    init_seed: int | None = None

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        check_positive_int(self.country_count, "country_count")
        check_positive_int(self.initial_imperialists, "initial_imperialists")
        check_positive_int(self.decades, "decades")
        if self.initial_imperialists >= self.country_count:
            raise ConfigError(
                f"initial_imperialists ({self.initial_imperialists}) must be smaller than "
                f"country_count ({self.country_count})", key="initial_imperialists")
        check_probability(self.revolution_rate, "revolution_rate")
        check_real(self.assimilation_coefficient, "assimilation_coefficient", minimum=0.0)
        check_real(self.assimilation_angle, "assimilation_angle", minimum=0.0)
        check_real(self.zeta, "zeta")
        if not 0.0 < self.zeta < 1.0:
            raise ConfigError(f"zeta must lie in (0, 1), got {self.zeta}", key="zeta")
        check_real(self.damp_ratio, "damp_ratio")
        if not 0.0 < self.damp_ratio <= 1.0:
            raise ConfigError(f"damp_ratio must lie in (0, 1], got {self.damp_ratio}", key="damp_ratio")
        check_seed(self.seed, "seed")
        if self.init_seed is not None:
            check_seed(self.init_seed, "init_seed")


@dataclass
class Empire:
    imperialist: np.ndarray
    imperialist_cost: float
    colonies: np.ndarray  # (k, n_vars)
    colony_costs: np.ndarray = field(default_factory=lambda: np.empty(0))

    @property
    def size(self) -> int:
        return len(self.colony_costs)

    def total_cost(self, zeta: float) -> float:
        if self.size == 0:
            return self.imperialist_cost
        return self.imperialist_cost + zeta * float(self.colony_costs.mean())


def normalized_power(costs: np.ndarray) -> np.ndarray:
    """Share of power per empire from its cost; uniform when all costs are equal."""
    shifted = costs - costs.max()
    total = shifted.sum()
    if total == 0:
        return np.full(costs.size, 1.0 / costs.size)
    return np.abs(shifted / total)


def _allocate(power: np.ndarray, n_colonies: int) -> np.ndarray:
    # largest-remainder rounding, then make sure every empire starts with a colony
    raw = power * n_colonies
    counts = np.floor(raw).astype(int)
    rest = n_colonies - counts.sum()
    counts[np.argsort(-(raw - counts), kind="stable")[:rest]] += 1
    for i in np.flatnonzero(counts == 0):
        donor = int(np.argmax(counts))
        if counts[donor] > 1:
            counts[donor] -= 1
            counts[i] += 1
    return counts


def create_empires(positions: np.ndarray, costs: np.ndarray, n_imperialists: int,
                   rng: RandomStream) -> list[Empire]:
    order = np.argsort(costs, kind="stable")
    positions, costs = positions[order], costs[order]
    imp_pos, imp_cost = positions[:n_imperialists], costs[:n_imperialists]
    col_pos, col_cost = positions[n_imperialists:], costs[n_imperialists:]
    counts = _allocate(normalized_power(imp_cost), len(col_cost))
    perm = rng.permutation(len(col_cost))
    empires, start = [], 0
    for k in range(n_imperialists):
        idx = perm[start:start + counts[k]]
        start += counts[k]
        empires.append(Empire(imp_pos[k].copy(), float(imp_cost[k]), col_pos[idx].copy(), col_cost[idx].copy()))
    return empires


def assimilate(empire: Empire, beta: float, gamma: float, domain: SearchDomain,
               rng: RandomStream) -> None:
    """Move each colony towards its imperialist.

    The step length is ``U(0, beta * d)`` with ``d`` the colony's distance to
    the imperialist, and the direction deviates from the straight line by an
    angle drawn from ``U(-gamma, gamma)`` (in 1-D there is no deviation).
    """
    k, dim = empire.colonies.shape
    if k == 0:
        return
    delta = empire.imperialist - empire.colonies
    dist = np.linalg.norm(delta, axis=1)
    step = rng.units(k) * beta * dist
    angle = rng.uniform(-gamma, gamma, size=k)
    noise = rng.normal(size=(k, dim))
    with np.errstate(invalid="ignore", divide="ignore"):
        u = np.where(dist[:, None] > 0, delta / dist[:, None], 0.0)
    # random direction perpendicular to u
    w = noise - np.sum(noise * u, axis=1, keepdims=True) * u
    wn = np.linalg.norm(w, axis=1)
    w = np.where(wn[:, None] > 1e-12, w / np.where(wn > 1e-12, wn, 1.0)[:, None], 0.0)
    move = step[:, None] * (np.cos(angle)[:, None] * u + np.sin(angle)[:, None] * w)
    empire.colonies = domain.clip(empire.colonies + move)


def revolve(empire: Empire, rate: float, domain: SearchDomain, rng: RandomStream) -> None:
    """Each colony jumps to a fresh uniform position with probability ``rate``."""
    k, dim = empire.colonies.shape
    if k == 0:
        return
    hit = rng.units(k) < rate
    fresh = rng.uniform(domain.lower_array, domain.upper_array, size=(k, dim))
    empire.colonies[hit] = fresh[hit]


def possess(empire: Empire) -> None:
    """Swap the imperialist with its strongest colony if that colony is stronger."""
    if empire.size == 0:
        return
    j = int(np.argmin(empire.colony_costs))
    if empire.colony_costs[j] < empire.imperialist_cost:
        pos, cost = empire.colonies[j].copy(), float(empire.colony_costs[j])
        empire.colonies[j], empire.colony_costs[j] = empire.imperialist, empire.imperialist_cost
        empire.imperialist, empire.imperialist_cost = pos, cost


def imperialistic_competition(empires: list[Empire], zeta: float, rng: RandomStream) -> list[Empire]:
    """Move the weakest colony of the weakest empire to a roulette-chosen empire.

    With a single empire nothing happens and no random draws are made.
    """
    if len(empires) <= 1:
        return empires
    totals = np.array([e.total_cost(zeta) for e in empires])
    weakest = int(np.argmax(totals))
    power = normalized_power(totals)
    cumulative = np.cumsum(power)
    pick = int(np.searchsorted(cumulative, rng.next_unit() * cumulative[-1], side="right"))
    winner = min(pick, len(empires) - 1)
    if winner == weakest:
        return empires

    loser = empires[weakest]
    gainer = empires[winner]
    if loser.size:
        j = int(np.argmax(loser.colony_costs))
        gainer.colonies = np.vstack([gainer.colonies, loser.colonies[j]])
        gainer.colony_costs = np.append(gainer.colony_costs, loser.colony_costs[j])
        loser.colonies = np.delete(loser.colonies, j, axis=0)
        loser.colony_costs = np.delete(loser.colony_costs, j)
    if loser.size == 0:
        gainer.colonies = np.vstack([gainer.colonies, loser.imperialist])
        gainer.colony_costs = np.append(gainer.colony_costs, loser.imperialist_cost)
        empires = [e for k, e in enumerate(empires) if k != weakest]
    return empires


def country_count(empires: list[Empire]) -> int:
    return sum(1 + e.size for e in empires)


def run_ica(config: IcaConfig, objective: Objective, domain: SearchDomain) -> RunResult:
    config.validate()
    init_seed = config.seed if config.init_seed is None else config.init_seed
    init_rng = RandomStream(init_seed, INIT_STREAM)
    rng = RandomStream(config.seed, OPERATOR_STREAM)
    evaluator = Evaluator(objective, domain)

    positions = init_rng.uniform(domain.lower_array, domain.upper_array,
                                 size=(config.country_count, domain.n_vars))
    costs = -evaluator.values(positions)
    empires = create_empires(positions, costs, config.initial_imperialists, rng)
    best_i = int(np.argmin(costs))
    best_cost, best_pos = float(costs[best_i]), positions[best_i].copy()

    rate = config.revolution_rate
    trace = []
    for decade in range(1, config.decades + 1):
        for empire in empires:
            assimilate(empire, config.assimilation_coefficient, config.assimilation_angle, domain, rng)
            revolve(empire, rate, domain, rng)
            if empire.size:
                empire.colony_costs = -evaluator.values(empire.colonies)
            possess(empire)
        empires = imperialistic_competition(empires, config.zeta, rng)
        rate *= config.damp_ratio

        all_costs = np.concatenate([[e.imperialist_cost for e in empires]]
                                   + [e.colony_costs for e in empires])
        strongest = min(empires, key=lambda e: e.imperialist_cost)
        if strongest.imperialist_cost < best_cost:
            best_cost, best_pos = strongest.imperialist_cost, strongest.imperialist.copy()
        trace.append(GenerationRecord(
            generation=decade,
            best_fitness=-best_cost,
            mean_fitness=float(-all_costs.mean()),
            best_point=tuple(float(c) for c in best_pos),
            evaluations=evaluator.count,
        ))

    return RunResult(algorithm="ica", best_fitness=-best_cost,
                     best_point=tuple(float(c) for c in best_pos), trace=trace)
