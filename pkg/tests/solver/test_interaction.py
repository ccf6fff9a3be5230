"""Tests for the composite response of an antenna above a medium."""

import logging

import numpy as np
import pytest

from layered_gsm.files.gsmio import (
    SyntheticGsmSpec,
    SyntheticKind,
    synthesize_gsm,
)
from layered_gsm.solver.exceptions import IllConditionedError, ValidationError
from layered_gsm.solver.interaction import (
    SolveMode,
    SolveOptions,
    db,
    feedback_operator,
    gamma_composite,
    reflection_order_study,
    solve_outgoing,
    spectral_radius,
)
from layered_gsm.solver.models import (
    ContourSpec,
    GsmBlocks,
    LayerStack,
    Parity,
    Polarization,
    SvwfBasis,
    SvwfIndex,
    Termination,
)
from layered_gsm.solver.wmatrix import WMatrix, assemble_w
from tests.conftest import FREQUENCY, K, OMEGA, Z_FAR

SERIES_TOLERANCE = 1e-6
KAPPA_SENSITIVITY = 1e-4
EXCITED = SvwfIndex(Polarization.TM, Parity.EVEN, 0, 1)


def radiator(
    basis: SvwfBasis,
    *,
    kind: SyntheticKind = SyntheticKind.SINGLE_MODE_RADIATOR,
    amplitude: complex = 1.0,
    port_reflection: complex = 0.0,
    scattering: dict[tuple[int, int], complex] | None = None,
) -> GsmBlocks:
    """Single-port GSM radiating EXCITED."""
    spec = SyntheticGsmSpec(
        kind=kind,
        excited=EXCITED,
        amplitude=amplitude,
        port_reflection=port_reflection,
        scattering=scattering or {},
    )
    return synthesize_gsm(spec, basis, FREQUENCY)


def diagonal_w(basis: SvwfBasis, diagonal: np.ndarray) -> WMatrix:
    """Interaction matrix with the given diagonal."""
    return WMatrix.from_dense(np.diag(diagonal), basis, FREQUENCY, "diag")


def dense_composite(gsm: GsmBlocks, w: WMatrix) -> np.ndarray:
    """Composite response from explicit dense algebra."""
    dense = w.dense()
    identity = np.eye(gsm.basis.size)
    bracket = identity - 0.5 * (gsm.s_block - identity) @ dense
    feedback = np.linalg.solve(bracket, gsm.t_block)
    return gsm.gamma + 0.5 * gsm.r_block @ dense @ feedback


def test_vacuum_leaves_port_reflection_unchanged(
    passive_gsm: GsmBlocks, small_basis: SvwfBasis
) -> None:
    """Test Gamma_c = Gamma exactly when W = 0."""
    zero = diagonal_w(small_basis, np.zeros(small_basis.size))
    assert np.array_equal(gamma_composite(passive_gsm, zero), passive_gsm.gamma)


def test_single_mode_radiator_closed_form(
    small_basis: SvwfBasis, pec_w: WMatrix
) -> None:
    """Test Gamma_c = Gamma + a^2 W_nn / 2 when S is the identity."""
    amplitude = 0.8 - 0.3j
    gsm = radiator(small_basis, amplitude=amplitude, port_reflection=0.1)
    position = small_basis.position(EXCITED)
    expected = 0.1 + 0.5 * amplitude**2 * pec_w.dense()[position, position]
    composite = gamma_composite(gsm, pec_w)
    assert composite.shape == (1, 1)
    assert complex(composite[0, 0]) == pytest.approx(expected, rel=1e-12)


def test_direct_solve_matches_dense_algebra(
    passive_gsm: GsmBlocks, pec_w: WMatrix
) -> None:
    """Test the block-wise solve against a dense linear solve."""
    expected = dense_composite(passive_gsm, pec_w)
    actual = gamma_composite(passive_gsm, pec_w)
    assert np.allclose(actual, expected, rtol=1e-10, atol=1e-14)


def test_diagonal_scatterer_matches_dense_algebra(
    small_basis: SvwfBasis, ground_w: WMatrix
) -> None:
    """Test a non-trivial S against the dense solve."""
    gsm = radiator(
        small_basis,
        kind=SyntheticKind.DIAGONAL_SCATTERER,
        scattering={(2, 1): 0.4 + 0.2j, (1, 2): -0.3},
    )
    assert np.allclose(
        gamma_composite(gsm, ground_w),
        dense_composite(gsm, ground_w),
        rtol=1e-10,
        atol=1e-14,
    )


def test_first_order_is_single_reflection(
    passive_gsm: GsmBlocks, pec_w: WMatrix
) -> None:
    """Test the one-term series Gamma + R W T / 2."""
    expected = passive_gsm.gamma + 0.5 * passive_gsm.r_block @ (
        pec_w.dense() @ passive_gsm.t_block
    )
    actual = gamma_composite(passive_gsm, pec_w, SolveOptions.neumann(1))
    assert np.allclose(actual, expected, rtol=1e-12, atol=1e-15)


def test_neumann_series_converges_to_direct(
    passive_gsm: GsmBlocks, pec_w: WMatrix
) -> None:
    """Test that a long series reproduces the direct solve."""
    assert spectral_radius(passive_gsm, pec_w) <= 0.5 + 1e-9
    direct = gamma_composite(passive_gsm, pec_w, SolveOptions.direct())
    series = gamma_composite(passive_gsm, pec_w, SolveOptions.neumann(40))
    assert np.max(np.abs(series - direct)) <= SERIES_TOLERANCE


def test_order_study(passive_gsm: GsmBlocks, pec_w: WMatrix) -> None:
    """Test the per-order deviations against the direct solve."""
    study = reflection_order_study(passive_gsm, pec_w, [4, 1, 2, 30])
    assert study.orders == (1, 2, 4, 30)
    deviations = [study.max_abs_deviation[n] for n in study.orders]
    assert deviations[-1] < deviations[0]
    assert deviations[-1] <= SERIES_TOLERANCE
    assert np.allclose(study.direct, gamma_composite(passive_gsm, pec_w))
    assert np.allclose(
        study.composites[2],
        gamma_composite(passive_gsm, pec_w, SolveOptions.neumann(2)),
    )
    assert study.max_db_deviation[30] < study.max_db_deviation[1]
    with pytest.raises(ValidationError, match="Orders"):
        _ = reflection_order_study(passive_gsm, pec_w, [0, 3])
    with pytest.raises(ValidationError, match="Orders"):
        _ = reflection_order_study(passive_gsm, pec_w, [])


def test_solve_outgoing_is_consistent(
    passive_gsm: GsmBlocks, pec_w: WMatrix
) -> None:
    """Test that the port output equals Gamma_c applied to the excitation."""
    v = np.array([1.0, -0.5j])
    waves = solve_outgoing(passive_gsm, pec_w, v)
    assert np.allclose(waves.port_out, gamma_composite(passive_gsm, pec_w) @ v)
    assert np.allclose(waves.reflected, pec_w.matvec(waves.outgoing))
    loop = feedback_operator(passive_gsm, pec_w)
    assert np.allclose(
        waves.outgoing - loop @ waves.outgoing, passive_gsm.t_block @ v
    )
    with pytest.raises(ValidationError, match="Excitation has shape"):
        _ = solve_outgoing(passive_gsm, pec_w, np.ones(3))
    with pytest.raises(ValidationError, match="non-finite"):
        _ = solve_outgoing(passive_gsm, pec_w, np.array([np.nan, 0.0]))


def test_basis_and_frequency_mismatch(
    passive_gsm: GsmBlocks, small_basis: SvwfBasis
) -> None:
    """Test that GSM and W must share basis and frequency."""
    other_basis = SvwfBasis.canonical(small_basis.l_max - 1)
    w_small = diagonal_w(other_basis, np.ones(other_basis.size))
    with pytest.raises(ValidationError, match="different bases"):
        _ = gamma_composite(passive_gsm, w_small)
    shifted = WMatrix.from_dense(
        np.eye(small_basis.size), small_basis, 1.1 * FREQUENCY, "shifted"
    )
    with pytest.raises(ValidationError, match="does not match"):
        _ = gamma_composite(passive_gsm, shifted)


def test_ill_conditioned_bracket(small_basis: SvwfBasis) -> None:
    """Test the condition floor on a nearly singular bracket."""
    gsm = radiator(
        small_basis,
        kind=SyntheticKind.DIAGONAL_SCATTERER,
        scattering={
            (tau, degree): 2.0 for tau in (1, 2) for degree in range(1, 5)
        },
    )
    diagonal = np.ones(small_basis.size)
    diagonal[0] = 2.0 * (1.0 - 1e-14)
    w = diagonal_w(small_basis, diagonal)
    with pytest.raises(IllConditionedError, match="ill-conditioned") as info:
        _ = gamma_composite(gsm, w)
    assert info.value.rcond < info.value.floor
    relaxed = gamma_composite(gsm, w, SolveOptions.direct(rcond_floor=0.0))
    assert np.all(np.isfinite(relaxed))


def test_non_contracting_series_warns(
    small_basis: SvwfBasis, caplog: pytest.LogCaptureFixture
) -> None:
    """Test the warning when the loop operator amplifies."""
    gsm = radiator(
        small_basis,
        kind=SyntheticKind.DIAGONAL_SCATTERER,
        scattering={(2, 1): 2.0},
    )
    w = diagonal_w(small_basis, np.full(small_basis.size, 3.0))
    with caplog.at_level(
        logging.WARNING, logger="layered_gsm.solver.interaction"
    ):
        _ = gamma_composite(gsm, w, SolveOptions.neumann(5))
    assert "not contracting" in caplog.text


def test_basis_ordering_does_not_change_response(
    passive_gsm: GsmBlocks, pec_w: WMatrix, small_basis: SvwfBasis
) -> None:
    """Test Gamma_c under a consistent reordering of GSM and W."""
    order = np.random.default_rng(5).permutation(small_basis.size)
    shuffled = SvwfBasis(
        small_basis.l_max, tuple(small_basis.indices[p] for p in order)
    )
    reference = gamma_composite(passive_gsm, pec_w)
    reordered = gamma_composite(
        passive_gsm.permuted(shuffled), pec_w.permuted(shuffled)
    )
    assert np.allclose(reordered, reference, rtol=1e-12, atol=1e-15)


def test_contour_truncation_sensitivity(
    passive_gsm: GsmBlocks,
    pec_w: WMatrix,
    small_contour: ContourSpec,
    small_basis: SvwfBasis,
) -> None:
    """Test that a 50 % longer evanescent segment barely moves Gamma_c."""
    longer = ContourSpec(
        kappa=1.5 * small_contour.kappa, iota=small_contour.iota
    )
    stack = LayerStack(Z_FAR, termination=Termination.PEC)
    w_long = assemble_w(small_basis, stack, K, OMEGA, longer)
    reference = gamma_composite(passive_gsm, pec_w)
    extended = gamma_composite(passive_gsm, w_long)
    assert np.max(np.abs(extended - reference)) <= KAPPA_SENSITIVITY


def test_solve_options() -> None:
    """Test option validation and labels."""
    assert SolveOptions().mode is SolveMode.DIRECT
    assert SolveOptions.direct().label == "direct"
    assert SolveOptions.neumann(3).label == "neumann(3)"
    with pytest.raises(ValidationError, match="Neumann order"):
        _ = SolveOptions.neumann(0)
    with pytest.raises(ValidationError, match="rcond floor"):
        _ = SolveOptions.direct(rcond_floor=1.0)


def test_db() -> None:
    """Test 20 log10 |x| including a zero entry."""
    values = db(np.array([1.0, 0.1j, 0.0]))
    assert values[:2] == pytest.approx([0.0, -20.0])
    assert values[2] == -np.inf
