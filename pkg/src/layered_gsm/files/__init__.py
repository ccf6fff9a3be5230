"""File formats and run configuration.

GSM files, JSON run documents, result tables and the interaction-matrix
cache.
"""

from layered_gsm.files.cache import WMatrixCache
from layered_gsm.files.config import (
    NAMED_STACKS,
    FitConfig,
    FitMethod,
    FreeParameter,
    GsmSource,
    OutputFormat,
    SweepConfig,
    SyntheticSource,
    apply_parameter,
    load_fit_config,
    load_sweep_config,
    parse_stack,
)
from layered_gsm.files.gsmio import (
    GsmFile,
    SyntheticGsmSpec,
    SyntheticKind,
    horn_preset,
    read_gsm,
    synthesize_file,
    synthesize_gsm,
    write_gsm,
)
from layered_gsm.files.writers import read_observed, write_csv, write_touchstone

__all__ = [
    "NAMED_STACKS",
    "FitConfig",
    "FitMethod",
    "FreeParameter",
    "GsmFile",
    "GsmSource",
    "OutputFormat",
    "SweepConfig",
    "SyntheticGsmSpec",
    "SyntheticKind",
    "SyntheticSource",
    "WMatrixCache",
    "apply_parameter",
    "horn_preset",
    "load_fit_config",
    "load_sweep_config",
    "parse_stack",
    "read_gsm",
    "read_observed",
    "synthesize_file",
    "synthesize_gsm",
    "write_csv",
    "write_gsm",
    "write_touchstone",
]
