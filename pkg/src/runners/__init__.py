from .experiment import ExperimentConfig, ExperimentRunner, expand_sweep, run_experiment, run_sweep
from .report import MetricsReport, ReportEntry, emit_report

__all__ = [
    "ExperimentConfig",
    "ExperimentRunner",
    "MetricsReport",
    "ReportEntry",
    "emit_report",
    "expand_sweep",
    "run_experiment",
    "run_sweep",
]
