"""Tests for multilayer plane-wave reflection."""

import numpy as np
import pytest

from layered_gsm.solver.consts import EPS0, MU0
from layered_gsm.solver.fresnel import (
    interface_gamma,
    kz,
    rho_stack,
    wavenumber,
)
from layered_gsm.solver.models import Layer, LayerStack, Termination

FREQUENCY = 3.5e9
OMEGA = 2 * np.pi * FREQUENCY
Z_INTERFACE = -0.2
TRANSMISSION_LINE_RTOL = 1e-10
RANDOM_STACK_RTOL = 1e-12
SPECTRAL_SAMPLES = np.array([-0.95, -0.6, -0.1, 0.4j, 1.3j, 3.0j])

HALF_SPACE = LayerStack(Z_INTERFACE, termination=Layer(eps_r=4.0))
SLAB_ON_PEC = LayerStack(
    Z_INTERFACE,
    layers=(Layer(eps_r=4.0, sigma=0.02, thickness=0.013),),
    termination=Termination.PEC,
)
THREE_LAYERS = LayerStack(
    Z_INTERFACE,
    layers=(
        Layer(eps_r=2.5, sigma=0.001, thickness=0.03),
        Layer(eps_r=6.0, sigma=0.05, mu_r=1.5, thickness=0.021),
    ),
    termination=Layer(eps_r=12.0, sigma=0.3),
)


def impedance(i: int, layer: Layer, u: np.ndarray, k1: complex) -> np.ndarray:
    """Transverse wave impedance of ``layer`` for polarization ``i``."""
    k_z = kz(layer, u, OMEGA, k1)
    if i == 1:
        return OMEGA * layer.mu_r * MU0 / k_z
    return k_z / (OMEGA * layer.permittivity(OMEGA))


def transmission_line_reflection(
    i: int, stack: LayerStack, u: np.ndarray
) -> np.ndarray:
    """Reflection from the input impedance of a cascade of line sections."""
    k1 = wavenumber(stack.top, OMEGA)
    if stack.termination is Termination.PEC:
        load = np.zeros(u.shape, dtype=np.complex128)
    else:
        assert isinstance(stack.termination, Layer)
        load = impedance(i, stack.termination, u, k1)
    for layer in reversed(stack.layers):
        assert layer.thickness is not None
        z_line = impedance(i, layer, u, k1)
        tangent = np.tan(kz(layer, u, OMEGA, k1) * layer.thickness)
        load = z_line * (load + 1j * z_line * tangent) / (
            z_line + 1j * load * tangent
        )
    z_top = impedance(i, stack.top, u, k1)
    sign = 1.0 if i == 1 else -1.0
    return sign * (load - z_top) / (load + z_top)


def test_normal_incidence_half_space() -> None:
    """Test -1/3 (TE) and +1/3 (TM) at normal incidence on eps_r = 4."""
    assert complex(rho_stack(1, HALF_SPACE, -1.0, OMEGA)) == pytest.approx(
        -1.0 / 3.0
    )
    assert complex(rho_stack(2, HALF_SPACE, -1.0, OMEGA)) == pytest.approx(
        1.0 / 3.0
    )


def test_ideal_conductors() -> None:
    """Test the PEC and PMC reflection coefficients."""
    u = SPECTRAL_SAMPLES
    pec = LayerStack(Z_INTERFACE, termination=Termination.PEC)
    pmc = LayerStack(Z_INTERFACE, termination=Termination.PMC)
    assert np.allclose(rho_stack(1, pec, u, OMEGA), -1.0)
    assert np.allclose(rho_stack(2, pec, u, OMEGA), 1.0)
    assert np.allclose(rho_stack(1, pmc, u, OMEGA), 1.0)
    assert np.allclose(rho_stack(2, pmc, u, OMEGA), -1.0)


def test_identical_media_reflect_nothing() -> None:
    """Test that a vacuum stack gives exactly zero."""
    vacuum = LayerStack(Z_INTERFACE)
    for i in (1, 2):
        assert np.all(rho_stack(i, vacuum, SPECTRAL_SAMPLES, OMEGA) == 0)


@pytest.mark.parametrize("stack", [HALF_SPACE, SLAB_ON_PEC, THREE_LAYERS])
@pytest.mark.parametrize("i", [1, 2])
def test_matches_transmission_line_model(stack: LayerStack, i: int) -> None:
    """Test the recursion against cascaded line input impedances."""
    expected = transmission_line_reflection(i, stack, SPECTRAL_SAMPLES)
    actual = rho_stack(i, stack, SPECTRAL_SAMPLES, OMEGA)
    assert np.allclose(
        actual, expected, rtol=TRANSMISSION_LINE_RTOL, atol=1e-14
    )


def test_passive_media_do_not_amplify() -> None:
    """Test |rho| <= 1 on the propagating segment of a lossy stack."""
    u = np.linspace(-1.0, -0.01, 50)
    for i in (1, 2):
        assert np.all(np.abs(rho_stack(i, THREE_LAYERS, u, OMEGA)) <= 1.0)


def test_longitudinal_wavenumber_branch() -> None:
    """Test Im kz <= 0 and kz = -j k t on the evanescent axis in vacuum."""
    k1 = wavenumber(Layer(), OMEGA)
    assert k1 == pytest.approx(OMEGA * np.sqrt(MU0 * EPS0))
    assert complex(kz(Layer(), 2.0j, OMEGA, k1)) == pytest.approx(-2.0j * k1)
    lossy = kz(Layer(eps_r=81.0, sigma=10.0), SPECTRAL_SAMPLES, OMEGA, k1)
    assert np.all(lossy.imag <= 0)


def test_interface_gamma_arguments() -> None:
    """Test the checks on polarization and interface index."""
    assert interface_gamma(1, THREE_LAYERS, 3, -0.5, OMEGA).shape == ()
    with pytest.raises(ValueError, match="Polarization index"):
        _ = interface_gamma(3, HALF_SPACE, 1, -0.5, OMEGA)
    with pytest.raises(ValueError, match="Interface index"):
        _ = interface_gamma(1, HALF_SPACE, 2, -0.5, OMEGA)


def random_stack(rng: np.random.Generator) -> LayerStack:
    """Stack of one to five slabs over a lossy half-space or a PEC."""
    layers = tuple(
        Layer(
            eps_r=rng.uniform(1.0, 20.0),
            sigma=rng.uniform(0.0, 1.0),
            mu_r=rng.uniform(1.0, 2.0),
            thickness=rng.uniform(0.001, 0.05),
        )
        for _ in range(rng.integers(1, 6))
    )
    termination: Layer | Termination = Termination.PEC
    if rng.uniform() < 0.5:
        termination = Layer(
            eps_r=rng.uniform(1.0, 80.0), sigma=rng.uniform(0.0, 5.0)
        )
    return LayerStack(Z_INTERFACE, layers=layers, termination=termination)


def contour_samples(rng: np.random.Generator, count: int) -> np.ndarray:
    """Random points on both segments of the integration contour."""
    propagating = rng.uniform(-1.0, 0.0, count // 2).astype(np.complex128)
    evanescent = 1j * rng.uniform(0.0, 3.0, count - count // 2)
    return np.concatenate([propagating, evanescent])


def test_random_stacks_match_transmission_line_model() -> None:
    """Test 100 random stacks at 100 contour points each."""
    rng = np.random.default_rng(2024)
    for _ in range(100):
        stack = random_stack(rng)
        u = contour_samples(rng, 100)
        for i in (1, 2):
            expected = transmission_line_reflection(i, stack, u)
            actual = rho_stack(i, stack, u, OMEGA)
            error = np.max(np.abs(actual - expected)) / np.max(
                np.abs(expected)
            )
            assert error <= RANDOM_STACK_RTOL, stack
