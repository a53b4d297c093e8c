"""Experiment orchestration and result emission."""

from .experiment import (
    ALGORITHMS,
    ComparisonBundle,
    ComparisonSpec,
    ExperimentResult,
    ExperimentSpec,
    SweepRow,
    SweepSpec,
    bundle_results,
    compare,
    run_experiment,
    sweep,
)
from .output import (
    emit_comparison_csv,
    emit_plot,
    emit_sweep_csv,
    emit_trace_csv,
    read_trace_csv,
)

__all__ = [
    "ALGORITHMS",
    "ComparisonBundle",
    "ComparisonSpec",
    "ExperimentResult",
    "ExperimentSpec",
    "SweepRow",
    "SweepSpec",
    "bundle_results",
    "compare",
    "emit_comparison_csv",
    "emit_plot",
    "emit_sweep_csv",
    "emit_trace_csv",
    "read_trace_csv",
    "run_experiment",
    "sweep",
]
