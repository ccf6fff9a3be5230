"""Shared fixtures: a small basis, its interaction matrices and GSMs."""

import numpy as np
import pytest

from layered_gsm.files.gsmio import (
    SyntheticGsmSpec,
    SyntheticKind,
    synthesize_gsm,
)
from layered_gsm.solver.consts import C0
from layered_gsm.solver.models import (
    ContourSpec,
    GsmBlocks,
    Layer,
    LayerStack,
    SvwfBasis,
    Termination,
)
from layered_gsm.solver.wmatrix import WMatrix, assemble_w, kappa_rule

FREQUENCY = 3.5e9
OMEGA = 2 * np.pi * FREQUENCY
K = OMEGA / C0
R_MIN = 0.146
Z_FAR = -0.2
SMALL_L = 8


@pytest.fixture(scope="session")
def small_basis() -> SvwfBasis:
    """Canonical basis small enough for dense checks."""
    return SvwfBasis.canonical(SMALL_L)


@pytest.fixture(scope="session")
def small_contour() -> ContourSpec:
    """Contour from the truncation rule for the small basis."""
    return ContourSpec(kappa=kappa_rule(SMALL_L, K * R_MIN, 0.55))


@pytest.fixture(scope="session")
def pec_w(small_basis: SvwfBasis, small_contour: ContourSpec) -> WMatrix:
    """Interaction matrix of a PEC plane 200 mm below the antenna."""
    stack = LayerStack(Z_FAR, termination=Termination.PEC)
    return assemble_w(small_basis, stack, K, OMEGA, small_contour)


@pytest.fixture(scope="session")
def ground_w(small_basis: SvwfBasis, small_contour: ContourSpec) -> WMatrix:
    """Interaction matrix of a moist-soil half-space."""
    stack = LayerStack(Z_FAR, termination=Layer(eps_r=12.0, sigma=0.05))
    return assemble_w(small_basis, stack, K, OMEGA, small_contour)


@pytest.fixture(scope="session")
def passive_gsm(small_basis: SvwfBasis, pec_w: WMatrix) -> GsmBlocks:
    """Two-port random GSM whose feedback loop contracts against pec_w."""
    spec = SyntheticGsmSpec(
        kind=SyntheticKind.RANDOM_PASSIVE,
        seed=11,
        port_labels=("A", "B"),
    )
    return synthesize_gsm(spec, small_basis, FREQUENCY, w=pec_w)
