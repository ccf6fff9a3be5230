"""Numerical core: wave functions, layered-medium reflection and GSM solve."""

from layered_gsm.solver.exceptions import (
    ChecksumError,
    DimensionMismatchError,
    FrequencyNotFoundError,
    IllConditionedError,
    LayeredGsmError,
    LegendreOverflowError,
    SchemaError,
    SingularityError,
    SpecialFunctionDomainError,
    SynthesisError,
    ValidationError,
)
from layered_gsm.solver.fresnel import interface_gamma, kz, rho_stack
from layered_gsm.solver.interaction import (
    OrderStudy,
    SolveMode,
    SolveOptions,
    gamma_composite,
    reflection_order_study,
    solve_outgoing,
)
from layered_gsm.solver.models import (
    ContourOrientation,
    ContourSpec,
    GsmBlocks,
    Layer,
    LayerStack,
    Parity,
    Polarization,
    SvwfBasis,
    SvwfIndex,
    Termination,
)
from layered_gsm.solver.options import ComputeOptions
from layered_gsm.solver.wmatrix import (
    WMatrix,
    assemble_w,
    kappa_rule,
    lmax_rule,
    truncation,
)

__all__ = [
    "ChecksumError",
    "ComputeOptions",
    "ContourOrientation",
    "ContourSpec",
    "DimensionMismatchError",
    "FrequencyNotFoundError",
    "GsmBlocks",
    "IllConditionedError",
    "Layer",
    "LayerStack",
    "LayeredGsmError",
    "LegendreOverflowError",
    "OrderStudy",
    "Parity",
    "Polarization",
    "SchemaError",
    "SingularityError",
    "SolveMode",
    "SolveOptions",
    "SpecialFunctionDomainError",
    "SvwfBasis",
    "SvwfIndex",
    "SynthesisError",
    "Termination",
    "ValidationError",
    "WMatrix",
    "assemble_w",
    "gamma_composite",
    "interface_gamma",
    "kappa_rule",
    "kz",
    "lmax_rule",
    "reflection_order_study",
    "rho_stack",
    "solve_outgoing",
    "truncation",
]
