"""Tests for the brute-force field validators."""

import numpy as np
import pytest

from layered_gsm.solver.models import (
    ContourSpec,
    Layer,
    LayerStack,
    Parity,
    Polarization,
    SvwfBasis,
    SvwfIndex,
)
from layered_gsm.solver.oracle import (
    check_pec_boundary,
    check_pec_image,
    check_reflected_field,
    check_transform_identity,
    plane_grid,
    reflected_field_direct,
    shell_points,
)
from layered_gsm.solver.wmatrix import WMatrix
from tests.conftest import K, OMEGA, Z_FAR

TRANSFORM_TOLERANCE = 1e-6
PEC_IMAGE_TOLERANCE = 1e-3
REFLECTED_FIELD_TOLERANCE = 1e-4
SAMPLE_COUNT = 20


@pytest.fixture
def points() -> np.ndarray:
    """Sample points with k r in [1, 2]."""
    return shell_points(SAMPLE_COUNT, K, 1.0, 2.0, seed=4)


def test_shell_points_radii() -> None:
    """Test the sampled radii and the determinism of the seed."""
    sample = shell_points(50, 2.0, 1.0, 3.0, seed=1)
    radii = 2.0 * np.linalg.norm(sample, axis=1)
    assert sample.shape == (50, 3)
    assert np.all((radii >= 1.0) & (radii <= 3.0))
    assert np.array_equal(sample, shell_points(50, 2.0, 1.0, 3.0, seed=1))


def test_plane_grid() -> None:
    """Test the grid height and extent."""
    grid = plane_grid(-0.1, 0.05, 3)
    assert grid.shape == (9, 3)
    assert np.all(grid[:, 2] == -0.1)
    assert np.max(np.abs(grid[:, :2])) == pytest.approx(0.05)


@pytest.mark.parametrize("n", SvwfBasis.canonical(2).indices)
def test_transform_identity(n: SvwfIndex, points: np.ndarray) -> None:
    """Test every l <= 2 SVWF against its plane-wave spectrum."""
    assert check_transform_identity(n, K, points) <= TRANSFORM_TOLERANCE


def test_pec_image(pec_w: WMatrix, points: np.ndarray) -> None:
    """Test the reflected expansion against the mirror image at 200 mm."""
    assert check_pec_image(Z_FAR, K, pec_w, points) <= PEC_IMAGE_TOLERANCE


def test_pec_image_detects_wrong_height(
    pec_w: WMatrix, points: np.ndarray
) -> None:
    """Test that an image at another height does not match."""
    assert check_pec_image(1.2 * Z_FAR, K, pec_w, points) > 0.1


def test_pec_boundary_without_reflection(
    small_basis: SvwfBasis, points: np.ndarray
) -> None:
    """Test that W = 0 leaves the full outgoing tangential field."""
    zero = WMatrix.from_dense(
        np.zeros((small_basis.size, small_basis.size)),
        small_basis,
        OMEGA / (2 * np.pi),
        "zero",
    )
    grid = plane_grid(Z_FAR, 0.05, 3)
    residual = check_pec_boundary(small_basis, Z_FAR, K, zero, grid)
    assert residual == pytest.approx(1.0)


def test_reflected_field(
    small_basis: SvwfBasis,
    small_contour: ContourSpec,
    points: np.ndarray,
) -> None:
    """Test the expansion against direct integration above eps_r = 4."""
    stack = LayerStack(Z_FAR, termination=Layer(eps_r=4.0))
    for n in (
        SvwfIndex(Polarization.TE, Parity.EVEN, 1, 1),
        SvwfIndex(Polarization.TM, Parity.EVEN, 0, 1),
    ):
        error = check_reflected_field(
            n, stack, K, OMEGA, points, small_basis, small_contour
        )
        assert error <= REFLECTED_FIELD_TOLERANCE


def test_direct_reflection_vanishes_in_vacuum(
    small_contour: ContourSpec, points: np.ndarray
) -> None:
    """Test that the direct integral of an unreflected spectrum is zero."""
    n = SvwfIndex(Polarization.TE, Parity.ODD, 1, 2)
    field = reflected_field_direct(
        n, LayerStack(Z_FAR), K, OMEGA, points, small_contour, beta_order=16
    )
    assert np.all(field == 0)
