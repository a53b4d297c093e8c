"""Reference optimizers compared against the duelist algorithm."""

from .ga import GaConfig, run_ga
from .ica import IcaConfig, run_ica
from .pso import PsoConfig, run_pso

__all__ = ["GaConfig", "IcaConfig", "PsoConfig", "run_ga", "run_ica", "run_pso"]
