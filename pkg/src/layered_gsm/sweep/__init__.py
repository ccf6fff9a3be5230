"""Sweeps, fits and the validation suite built on the solver."""

from layered_gsm.sweep.results import SweepPoint, SweepResult, TimingReport
from layered_gsm.sweep.runner import (
    Evaluation,
    FitResult,
    ForwardModel,
    run_fit,
    run_sweep,
    write_sweep,
)
from layered_gsm.sweep.validation import (
    CHECKS,
    CheckResult,
    ErrorMap,
    ValidationReport,
    ValidationSelection,
    error_map,
    run_validate,
)
from layered_gsm.sweep.worker_pool import WorkerPool

__all__ = [
    "CHECKS",
    "CheckResult",
    "ErrorMap",
    "Evaluation",
    "FitResult",
    "ForwardModel",
    "SweepPoint",
    "SweepResult",
    "TimingReport",
    "ValidationReport",
    "ValidationSelection",
    "WorkerPool",
    "error_map",
    "run_fit",
    "run_sweep",
    "run_validate",
    "write_sweep",
]
