"""Plane-wave reflection from a planar layered medium.

Impedances follow ``Z_1 = omega mu / k_z`` (TE) and ``Z_2 = k_z / (omega eps)``
(TM). Interface coefficients are formed from the impedance ratio
``Z^{n+1} / Z^n`` kept as a numerator/denominator pair, which covers the ideal
conductor terminations and highly conducting layers without overflow.
"""

import logging

import numpy as np
import numpy.typing as npt

from layered_gsm.solver.consts import EPS0, SINGULAR_DENOMINATOR
from layered_gsm.solver.exceptions import SingularityError, ValidationError
from layered_gsm.solver.models import Layer, LayerStack, Termination
from layered_gsm.solver.specfun import branch_sqrt

logger = logging.getLogger(__name__)

ComplexArray = npt.NDArray[np.complex128]


def wavenumber(layer: Layer, omega: float) -> complex:
    """Medium wavenumber ``omega sqrt(mu eps)`` with ``Im <= 0``."""
    return complex(branch_sqrt(layer.wavenumber_squared(omega)))


def kz(
    layer: Layer,
    u: complex | ComplexArray,
    omega: float,
    k1: complex,
) -> ComplexArray:
    """Longitudinal wavenumber ``sqrt(k_n^2 - k_1^2 (1 - u^2))``.

    The root is taken on the ``Im <= 0`` branch with ``Re >= 0`` when it is
    exactly real.
    """
    arg = np.asarray(u, dtype=np.complex128)
    sin_squared = 1.0 - arg * arg
    return branch_sqrt(layer.wavenumber_squared(omega) - k1 * k1 * sin_squared)


def _relative_permittivity(layer: Layer, omega: float) -> complex:
    return layer.permittivity(omega) / EPS0


def _impedance_ratio(
    i: int,
    upper: Layer,
    lower: Layer | Termination,
    u: ComplexArray,
    omega: float,
    k1: complex,
) -> tuple[ComplexArray, ComplexArray]:
    """Return ``(num, den)`` with ``num / den = Z_i^{lower} / Z_i^{upper}``."""
    ones = np.ones(u.shape, dtype=np.complex128)
    if lower is Termination.PEC:
        return np.zeros_like(ones), ones
    if lower is Termination.PMC:
        return ones, np.zeros_like(ones)
    if not isinstance(lower, Layer):
        err = f"Unsupported medium {lower!r}"
        raise ValidationError(err)
    kz_upper = kz(upper, u, omega, k1)
    kz_lower = kz(lower, u, omega, k1)
    if i == 1:
        return lower.mu_r * kz_upper, upper.mu_r * kz_lower
    return (
        _relative_permittivity(upper, omega) * kz_lower,
        _relative_permittivity(lower, omega) * kz_upper,
    )


def _check_polarization(i: int) -> None:
    if i not in (1, 2):
        err = f"Polarization index must be 1 (TE) or 2 (TM), got {i}"
        raise ValueError(err)


def interface_gamma(
    i: int,
    stack: LayerStack,
    n: int,
    u: complex | ComplexArray,
    omega: float,
) -> ComplexArray:
    """Reflection coefficient of interface ``n`` (1-based, top to bottom).

    ``Gamma_i^n = (-1)^{i+1} (Z^{n+1} - Z^n) / (Z^{n+1} + Z^n)``. A PEC below
    the interface acts as ``Z = 0`` and a PMC as ``Z = inf``; identical media
    on both sides give exactly zero.

    Raises
    ------
        ValueError: If ``i`` or ``n`` is out of range.
        SingularityError: If the impedance sum vanishes.

    """
    _check_polarization(i)
    if not 1 <= n <= stack.interface_count:
        err = (
            f"Interface index must be in [1, {stack.interface_count}], "
            f"got {n}"
        )
        raise ValueError(err)
    arg = np.asarray(u, dtype=np.complex128)
    media = stack.media
    upper = media[n - 1]
    lower = media[n]
    if not isinstance(upper, Layer):
        err = "Only the last medium may be an ideal conductor"
        raise ValidationError(err)
    if lower == upper:
        return np.zeros(arg.shape, dtype=np.complex128)

    k1 = wavenumber(stack.top, omega)
    num, den = _impedance_ratio(i, upper, lower, arg, omega, k1)
    total = num + den
    singular = np.abs(total) < SINGULAR_DENOMINATOR
    if np.any(singular):
        raise SingularityError(
            complex(arg[singular].flat[0]) if arg.ndim else complex(arg),
            f"impedance sum vanishes at interface {n}",
        )
    sign = 1.0 if i == 1 else -1.0
    return sign * (num - den) / total


def rho_stack(
    i: int,
    stack: LayerStack,
    u: complex | ComplexArray,
    omega: float,
) -> ComplexArray:
    """Composite reflection coefficient ``rho_i^1(u)`` seen from the top medium.

    Evaluated by the backward recursion from the deepest interface::

        rho^N = Gamma^N
        rho^n = (Gamma^n + rho^{n+1} E) / (1 + Gamma^n rho^{n+1} E)

    with ``E = exp(-2j k_{z,n+1} h_{n+1})``.

    Args:
    ----
        i: Polarization, 1 (TE) or 2 (TM).
        stack: Layered medium below the antenna.
        u: Spectral variable ``cos(alpha)``, scalar or array.
        omega: Angular frequency in rad/s.

    Returns:
    -------
        Array with the shape of ``u``.

    Raises:
    ------
        SingularityError: If an impedance sum or a recursion denominator
            vanishes.

    """
    _check_polarization(i)
    arg = np.asarray(u, dtype=np.complex128)
    k1 = wavenumber(stack.top, omega)
    count = stack.interface_count
    rho = interface_gamma(i, stack, count, arg, omega)
    for n in range(count - 1, 0, -1):
        layer = stack.layers[n - 1]
        thickness = layer.thickness if layer.thickness is not None else 0.0
        phase = np.exp(-2j * kz(layer, arg, omega, k1) * thickness)
        gamma = interface_gamma(i, stack, n, arg, omega)
        delayed = rho * phase
        denominator = 1.0 + gamma * delayed
        singular = np.abs(denominator) < SINGULAR_DENOMINATOR
        if np.any(singular):
            raise SingularityError(
                complex(arg[singular].flat[0]) if arg.ndim else complex(arg),
                f"recursion denominator vanishes at interface {n}",
            )
        rho = (gamma + delayed) / denominator
    logger.debug(
        "Reflection coefficient i=%d through %d interface(s) at %d node(s)",
        i,
        count,
        arg.size,
    )
    return rho
