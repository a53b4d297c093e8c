"""Duelist Algorithm: a population metaheuristic over binary skillsets.

Includes the optimizer itself, GA/PSO/ICA baselines, benchmark objectives
with a grid oracle, and a harness for multi-seed experiments, sweeps and
comparisons.
"""

from .benchmarks import Benchmark, ShiftedSphereSpec, get_benchmark, grid_oracle
from .core import (
    Category,
    ConfigError,
    ContractViolation,
    Duelist,
    EvaluationError,
    RandomStream,
    SearchDomain,
    decode,
    encode,
)
from .engine import EngineConfig, GenerationRecord, RunResult, run

__version__ = "0.1.0"

__all__ = [
    "Benchmark",
    "Category",
    "ConfigError",
    "ContractViolation",
    "Duelist",
    "EngineConfig",
    "EvaluationError",
    "GenerationRecord",
    "RandomStream",
    "RunResult",
    "SearchDomain",
    "ShiftedSphereSpec",
    "__version__",
    "decode",
    "encode",
    "get_benchmark",
    "grid_oracle",
    "run",
]
