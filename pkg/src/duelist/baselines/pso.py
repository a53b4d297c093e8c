"""Global-best particle swarm with a linearly decreasing inertia weight.

    v <- theta * v + c1 * r1 * (pbest - x) + c2 * r2 * (gbest - x)
    x <- clip(x + v)

``theta`` goes linearly from ``theta_start`` on the first iteration to
``theta_end`` on the last. Velocities are clamped per dimension to
``velocity_clamp_fraction`` times the box width. Initial velocities are
uniform within that clamp, or zero with ``initial_velocity="zero"``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import (
    ConfigError,
    Evaluator,
    Objective,
    RandomStream,
    SearchDomain,
    check_positive_int,
    check_real,
    check_seed,
)
from ..engine import INIT_STREAM, OPERATOR_STREAM, GenerationRecord, RunResult


@dataclass(frozen=True)
class PsoConfig:
    swarm_size: int = 100
    max_iterations: int = 200
    c1: float = 0.4
    c2: float = 0.6
    theta_start: float = 0.9
    theta_end: float = 0.5
    velocity_clamp_fraction: float = 0.2
    initial_velocity: str = "random"
    seed: int = 1
    init_seed: int | None = None

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        check_positive_int(self.swarm_size, "swarm_size")
        check_positive_int(self.max_iterations, "max_iterations")
        check_real(self.c1, "c1", minimum=0.0)
        check_real(self.c2, "c2", minimum=0.0)
        check_real(self.theta_start, "theta_start")
        check_real(self.theta_end, "theta_end")
        if not self.theta_start >= self.theta_end > 0:
            raise ConfigError(
                f"need theta_start >= theta_end > 0, got {self.theta_start} and {self.theta_end}",
                key="theta_end")
        check_real(self.velocity_clamp_fraction, "velocity_clamp_fraction")
        if self.velocity_clamp_fraction <= 0:
            raise ConfigError(f"velocity_clamp_fraction must be > 0, got {self.velocity_clamp_fraction}",
                              key="velocity_clamp_fraction")
        if self.initial_velocity not in ("random", "zero"):
            raise ConfigError(f"initial_velocity must be 'random' or 'zero', got {self.initial_velocity!r}",
                              key="initial_velocity")
        check_seed(self.seed, "seed")
        if self.init_seed is not None:
            check_seed(self.init_seed, "init_seed")


def inertia(iteration: int, config: PsoConfig) -> float:
    """Inertia weight for a 1-based iteration."""
    if config.max_iterations == 1:
        return config.theta_start
    t = (iteration - 1) / (config.max_iterations - 1)
    return config.theta_start + (config.theta_end - config.theta_start) * t


def run_pso(config: PsoConfig, objective: Objective, domain: SearchDomain,
            initial_positions: np.ndarray | None = None) -> RunResult:
    """Run the swarm; ``initial_positions`` (swarm_size, n_vars) overrides the random start."""
    config.validate()
    init_seed = config.seed if config.init_seed is None else config.init_seed
    init_rng = RandomStream(init_seed, INIT_STREAM)
    rng = RandomStream(config.seed, OPERATOR_STREAM)
    evaluator = Evaluator(objective, domain)
    lo, hi = domain.lower_array, domain.upper_array
    n, dim = config.swarm_size, domain.n_vars

    if initial_positions is None:
        x = init_rng.uniform(lo, hi, size=(n, dim))
    else:
        x = domain.clip(np.array(initial_positions, dtype=np.float64))
        if x.shape != (n, dim):
            raise ConfigError(f"initial_positions must have shape {(n, dim)}, got {x.shape}",
                              key="initial_positions")
    vmax = config.velocity_clamp_fraction * (hi - lo)
    if config.initial_velocity == "zero":
        v = np.zeros((n, dim))
    else:
        v = init_rng.uniform(-vmax, vmax, size=(n, dim))

    fx = evaluator.values(x)
    pbest, pbest_f = x.copy(), fx.copy()
    g = int(np.argmax(pbest_f))
    gbest, gbest_f = pbest[g].copy(), float(pbest_f[g])

    trace = []
    for iteration in range(1, config.max_iterations + 1):
        theta = inertia(iteration, config)
        r1 = rng.units(n * dim).reshape(n, dim)
        r2 = rng.units(n * dim).reshape(n, dim)
        v = theta * v + config.c1 * r1 * (pbest - x) + config.c2 * r2 * (gbest - x)
        v = np.clip(v, -vmax, vmax)
        x = np.clip(x + v, lo, hi)
        fx = evaluator.values(x)

        better = fx > pbest_f
        pbest[better], pbest_f[better] = x[better], fx[better]
        g = int(np.argmax(pbest_f))
        if pbest_f[g] > gbest_f:
            gbest, gbest_f = pbest[g].copy(), float(pbest_f[g])
        trace.append(GenerationRecord(
            generation=iteration,
            best_fitness=gbest_f,
            mean_fitness=float(fx.mean()),
            best_point=tuple(float(c) for c in gbest),
            evaluations=evaluator.count,
        ))

    return RunResult(algorithm="pso", best_fitness=gbest_f, best_point=tuple(float(c) for c in gbest),
                     trace=trace)
