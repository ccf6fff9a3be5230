"""Tests for the solver data models."""

import numpy as np
import pytest

from layered_gsm.solver.consts import EPS0
from layered_gsm.solver.exceptions import ValidationError
from layered_gsm.solver.models import (
    VACUUM,
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

OMEGA = 2 * np.pi * 1e9


def test_layer_validation() -> None:
    """Test the material parameter checks."""
    with pytest.raises(ValidationError, match="eps_r"):
        _ = Layer(eps_r=0.5)
    with pytest.raises(ValidationError, match="sigma"):
        _ = Layer(sigma=-1.0)
    with pytest.raises(ValidationError, match="mu_r"):
        _ = Layer(mu_r=0.0)
    with pytest.raises(ValidationError, match="thickness"):
        _ = Layer(thickness=0.0)


def test_complex_permittivity() -> None:
    """Test eps = eps_r eps0 - j sigma / omega."""
    layer = Layer(eps_r=4.0, sigma=0.1)
    assert layer.permittivity(OMEGA) == pytest.approx(
        complex(4.0 * EPS0, -0.1 / OMEGA)
    )


def test_stack_validation() -> None:
    """Test the geometry checks of a stack."""
    with pytest.raises(ValidationError, match="z_interface"):
        _ = LayerStack(0.0)
    with pytest.raises(ValidationError, match="needs a thickness"):
        _ = LayerStack(-0.1, layers=(Layer(eps_r=2.0),))
    with pytest.raises(ValidationError, match="takes no thickness"):
        _ = LayerStack(-0.1, termination=Layer(thickness=0.1))
    with pytest.raises(ValidationError, match="takes no thickness"):
        _ = LayerStack(-0.1, top=Layer(thickness=0.1))


def test_stack_media_and_plain_data() -> None:
    """Test the media order and the serialisable view."""
    slab = Layer(eps_r=3.0, thickness=0.01)
    stack = LayerStack(-0.1, layers=[slab], termination=Termination.PEC)
    assert stack.media == (VACUUM, slab, Termination.PEC)
    assert stack.interface_count == 2
    data = stack.as_dict()
    assert data["termination"] == "pec"
    assert data["layers"] == [slab.as_dict()]


def test_contour_validation() -> None:
    """Test the truncation and quadrature checks."""
    with pytest.raises(ValidationError, match="exceed 1"):
        _ = ContourSpec(kappa=1.0)
    with pytest.raises(ValidationError, match="at least 2"):
        _ = ContourSpec(kappa=1.2, quad_order_evanescent=1)
    contour = ContourSpec(
        kappa=1.3, orientation=ContourOrientation.FLIPPED_EVANESCENT
    )
    doubled = contour.doubled()
    assert doubled.quad_order_evanescent == 2 * contour.quad_order_evanescent
    assert doubled.orientation is contour.orientation
    assert contour.as_dict()["orientation"] == "flipped_evanescent"


def test_index_label_and_position() -> None:
    """Test labels and basis lookups."""
    n = SvwfIndex(Polarization.TM, Parity.ODD, 2, 3)
    assert n.label == "TM o m=2 l=3"
    basis = SvwfBasis.canonical(3)
    assert basis.indices[basis.position(n)] == n
    with pytest.raises(ValidationError, match="not in the basis"):
        _ = SvwfBasis.canonical(2).position(n)
    with pytest.raises(ValidationError, match="l_max"):
        _ = SvwfBasis.canonical(0)


def test_permutation_between_bases() -> None:
    """Test that the permutation maps one ordering onto another."""
    canonical = SvwfBasis.canonical(2)
    shuffled = SvwfBasis(2, tuple(reversed(canonical.indices)))
    order = shuffled.permutation_from(canonical)
    assert [canonical.indices[p] for p in order] == list(shuffled.indices)
    with pytest.raises(ValidationError, match="different l_max"):
        _ = shuffled.permutation_from(SvwfBasis.canonical(3))


def test_gsm_block_shapes() -> None:
    """Test the dimension checks of the GSM blocks."""
    basis = SvwfBasis.canonical(1)
    j = basis.size
    blocks = {
        "gamma": np.zeros((1, 1)),
        "r_block": np.zeros((1, j)),
        "t_block": np.zeros((j, 1)),
        "s_block": np.eye(j),
    }
    gsm = GsmBlocks(
        **blocks, frequency=1e9, basis=basis, port_labels=("P1",)
    )
    assert gsm.port_count == 1
    assert gsm.s_block.dtype == np.complex128
    with pytest.raises(ValidationError, match="r_block has shape"):
        _ = GsmBlocks(
            **(blocks | {"r_block": np.zeros((2, j))}),
            frequency=1e9,
            basis=basis,
            port_labels=("P1",),
        )
    with pytest.raises(ValidationError, match="non-finite"):
        _ = GsmBlocks(
            **(blocks | {"gamma": np.full((1, 1), np.inf)}),
            frequency=1e9,
            basis=basis,
            port_labels=("P1",),
        )
    with pytest.raises(ValidationError, match="Frequency"):
        _ = GsmBlocks(**blocks, frequency=0.0, basis=basis, port_labels=["P1"])


def test_gsm_permutation_round_trip() -> None:
    """Test that permuting there and back restores the blocks."""
    basis = SvwfBasis.canonical(2)
    rng = np.random.default_rng(0)
    j = basis.size
    gsm = GsmBlocks(
        gamma=np.eye(1),
        r_block=rng.normal(size=(1, j)),
        t_block=rng.normal(size=(j, 1)),
        s_block=rng.normal(size=(j, j)),
        frequency=1e9,
        basis=basis,
        port_labels=("P1",),
    )
    shuffled = SvwfBasis(2, tuple(reversed(basis.indices)))
    back = gsm.permuted(shuffled).permuted(basis)
    assert np.array_equal(back.s_block, gsm.s_block)
    assert np.array_equal(back.t_block, gsm.t_block)
