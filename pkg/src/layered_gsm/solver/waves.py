"""Spherical and planar vector wave functions and their transform factors.

Plane waves use the unit vectors of the direction ``gamma(alpha, beta)``::

    alpha_hat = ( u cos b,  u sin b, -s)
    beta_hat  = (  -sin b,    cos b,  0)
    gamma_hat = ( s cos b,  s sin b,  u)

with ``u = cos(alpha)`` and ``s = sin(alpha)`` continued to complex ``u``.
Regular and outgoing SVWFs are built so that the plane-wave expansion
``u_n(r) = sum_i int B_ni(u) A_ni(beta) phi_i(gamma, r) dgamma`` holds with
no extra factors.
"""

import enum
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from layered_gsm.solver.exceptions import SpecialFunctionDomainError
from layered_gsm.solver.models import (
    Parity,
    Polarization,
    SvwfBasis,
    SvwfIndex,
)
from layered_gsm.solver.specfun import (
    AngularFunctions,
    RadialKind,
    angular_functions,
    branch_sqrt,
    legendre_table,
    spherical_bessel,
)

ComplexArray = npt.NDArray[np.complex128]
FloatArray = npt.NDArray[np.float64]

_INV_4PI = 1.0 / (4.0 * np.pi)


class Segment(enum.Enum):
    """Contour segment a spectral direction lies on."""

    PROPAGATING = "propagating"
    EVANESCENT = "evanescent"


@dataclass(frozen=True)
class PlaneWaveDirection:
    """Spectral direction ``(u = cos alpha, beta)``.

    Attributes
    ----------
        u: ``cos(alpha)``; real in ``[-1, 1]`` for propagating directions.
        beta: Azimuth in rad.
        segment: Contour segment the direction belongs to.

    """

    u: complex
    beta: float
    segment: Segment = Segment.PROPAGATING

    @property
    def sin_alpha(self) -> complex:
        """``sqrt(1 - u^2)`` on the ``Im <= 0`` branch."""
        return complex(branch_sqrt(1.0 - self.u * self.u))

    def reflected(self) -> "PlaneWaveDirection":
        """Mirror image about a horizontal plane (``u -> -u``)."""
        return PlaneWaveDirection(-self.u, self.beta, self.segment)

    def unit_vectors(self) -> tuple[ComplexArray, ComplexArray, ComplexArray]:
        """Return ``(alpha_hat, beta_hat, gamma_hat)``."""
        return direction_vectors(np.complex128(self.u), np.float64(self.beta))


def direction_vectors(
    u: complex | ComplexArray,
    beta: float | FloatArray,
) -> tuple[ComplexArray, ComplexArray, ComplexArray]:
    """Unit vectors of the directions ``(u, beta)``, each of shape ``(..., 3)``.

    ``u`` and ``beta`` are broadcast against each other.
    """
    u_arr, beta_arr = np.broadcast_arrays(
        np.asarray(u, dtype=np.complex128), np.asarray(beta, dtype=np.float64)
    )
    s = branch_sqrt(1.0 - u_arr * u_arr)
    cb = np.cos(beta_arr)
    sb = np.sin(beta_arr)
    alpha_hat = np.stack([u_arr * cb, u_arr * sb, -s], axis=-1)
    beta_hat = np.stack([-sb, cb, np.zeros_like(cb)], axis=-1).astype(
        np.complex128
    )
    gamma_hat = np.stack([s * cb, s * sb, u_arr], axis=-1)
    return alpha_hat, beta_hat, gamma_hat


def svwf_basis(l_max: int) -> SvwfBasis:
    """Canonically ordered basis up to degree ``l_max``."""
    return SvwfBasis.canonical(l_max)


def b_coefficient(
    n: SvwfIndex,
    i: int,
    table: AngularFunctions,
    *,
    dagger: bool = False,
) -> ComplexArray:
    """Return ``B_ni(u) = j^l [delta_{tau i} j Delta - delta_{tau ibar} pi]``.

    ``u`` is the argument ``table`` was built at. With ``dagger`` every
    explicit ``j`` is replaced by ``-j``.
    """
    _check_polarization(i)
    unit = -1j if dagger else 1j
    prefactor = unit**n.l
    if n.tau == i:
        return prefactor * unit * table.delta[n.l, n.m]
    return -prefactor * table.pi_fn[n.l, n.m]


def b_coefficients(
    basis: SvwfBasis,
    i: int,
    table: AngularFunctions,
    *,
    dagger: bool = False,
) -> ComplexArray:
    """``B_ni`` for every basis index, shape ``(j, *u.shape)``."""
    return np.stack(
        [b_coefficient(n, i, table, dagger=dagger) for n in basis.indices]
    )


def a_factor(n: SvwfIndex, i: int, beta: float | FloatArray) -> FloatArray:
    """Azimuthal factor ``A_ni(beta)``.

    Co-polar (``i = tau``): ``cos(m beta)`` for even, ``sin(m beta)`` for odd.
    Cross-polar: ``sin(m beta)`` for even, ``-cos(m beta)`` for odd.
    """
    _check_polarization(i)
    angle = n.m * np.asarray(beta, dtype=np.float64)
    if n.tau == i:
        return np.cos(angle) if n.sigma is Parity.EVEN else np.sin(angle)
    return np.sin(angle) if n.sigma is Parity.EVEN else -np.cos(angle)


def azimuthal_integral(n: SvwfIndex, n2: SvwfIndex, i: int) -> float:
    """Exact ``int_0^{2 pi} A_ni A_{n2 i} d beta``.

    Zero unless ``m = m2``. Equal parities give ``pi (1 +- delta_{m0})``
    depending on whether both factors are cosines or sines; opposite
    parities (only possible for ``m >= 1``) pair a cosine with a cosine or a
    sine with a sine and give ``-pi (-1)^{i + tau + sigma}``.
    """
    _check_polarization(i)
    if n.m != n2.m:
        return 0.0
    m = n.m
    cosine_first = (n.tau == i) == (n.sigma is Parity.EVEN)
    cosine_second = (n2.tau == i) == (n2.sigma is Parity.EVEN)
    if cosine_first != cosine_second:
        return 0.0
    if n.sigma == n2.sigma:
        if cosine_first:
            return np.pi * (2.0 if m == 0 else 1.0)
        return 0.0 if m == 0 else np.pi
    return -np.pi * (-1.0) ** (i + int(n.tau) + int(n.sigma))


def normalization(m: int) -> float:
    """Spectral norm ``sum_i int |B_ni A_ni|^2 d gamma = pi (1 + delta_m0)``."""
    return np.pi * (2.0 if m == 0 else 1.0)


def eval_pvwf(
    i: int,
    direction: PlaneWaveDirection,
    k: complex,
    r: FloatArray,
) -> ComplexArray:
    """Plane vector wave ``phi_i`` at point(s) ``r`` of shape ``(..., 3)``.

    ``phi_1 = (j / 4 pi) beta_hat e^{-j k gamma.r}`` (TE) and
    ``phi_2 = -(1 / 4 pi) alpha_hat e^{-j k gamma.r}`` (TM).
    """
    _check_polarization(i)
    points = np.asarray(r, dtype=np.float64)
    alpha_hat, beta_hat, gamma_hat = direction.unit_vectors()
    phase = np.exp(-1j * k * (points @ gamma_hat))
    if i == Polarization.TE:
        polar = 1j * _INV_4PI * beta_hat
    else:
        polar = -_INV_4PI * alpha_hat
    return phase[..., np.newaxis] * polar


@dataclass(frozen=True)
class _PointFrame:
    """Spherical coordinates and local unit vectors of a point set."""

    radius: FloatArray
    u: FloatArray
    phi: FloatArray
    r_hat: FloatArray
    theta_hat: FloatArray
    phi_hat: FloatArray

    @classmethod
    def of(cls, points: FloatArray) -> "_PointFrame":
        radius = np.linalg.norm(points, axis=-1)
        safe = np.where(radius > 0, radius, 1.0)
        u = np.clip(np.where(radius > 0, points[..., 2] / safe, 1.0), -1, 1)
        phi = np.arctan2(points[..., 1], points[..., 0])
        sin_t = np.sqrt(1.0 - u * u)
        cp = np.cos(phi)
        sp = np.sin(phi)
        r_hat = np.stack([sin_t * cp, sin_t * sp, u], axis=-1)
        theta_hat = np.stack([u * cp, u * sp, -sin_t], axis=-1)
        phi_hat = np.stack([-sp, cp, np.zeros_like(phi)], axis=-1)
        return cls(radius, u, phi, r_hat, theta_hat, phi_hat)


def _radial_factors(
    p: RadialKind,
    l_max: int,
    x: FloatArray,
) -> tuple[ComplexArray, ComplexArray, ComplexArray]:
    """Return ``z_l(x)``, ``z_l(x)/x`` and ``(x z_l)'/x`` for ``l <= l_max``.

    At ``x = 0`` the regular limits ``delta_{l1}/3`` and ``2 delta_{l1}/3``
    are used.
    """
    at_origin = x == 0
    if p is RadialKind.OUTGOING and np.any(at_origin):
        err = "Outgoing SVWFs are singular at the origin"
        raise SpecialFunctionDomainError(err)
    z = spherical_bessel(p, l_max, x)
    dz = spherical_bessel(p, l_max, x, derivative=True)
    safe = np.where(at_origin, 1.0, x)
    over_x = z / safe
    riccati = dz + over_x
    if np.any(at_origin):
        origin_ratio = np.zeros(l_max + 1)
        origin_ratio[1] = 1.0 / 3.0
        origin_ratio = origin_ratio.reshape((-1,) + (1,) * x.ndim)
        over_x = np.where(at_origin, origin_ratio, over_x)
        riccati = np.where(at_origin, 2.0 * origin_ratio, riccati)
    return z, over_x, riccati


def _svwf_from_frame(  # noqa: PLR0913
    n: SvwfIndex,
    frame: _PointFrame,
    legendre_values: ComplexArray,
    angular: AngularFunctions,
    z: ComplexArray,
    over_x: ComplexArray,
    riccati: ComplexArray,
) -> ComplexArray:
    delta = angular.delta[n.l, n.m]
    pi_fn = angular.pi_fn[n.l, n.m]
    co = a_factor(n, n.tau, frame.phi)
    cross = a_factor(n, 3 - n.tau, frame.phi)
    if n.tau == Polarization.TE:
        theta_part = pi_fn * cross
        phi_part = -delta * co
        field = z[n.l][..., None] * (
            theta_part[..., None] * frame.theta_hat
            + phi_part[..., None] * frame.phi_hat
        )
        return np.asarray(field, dtype=np.complex128)
    degree = np.sqrt(n.l * (n.l + 1))
    radial_part = degree * over_x[n.l] * legendre_values[n.l, n.m] * co
    tangential = riccati[n.l][..., None] * (
        (delta * co)[..., None] * frame.theta_hat
        + (pi_fn * cross)[..., None] * frame.phi_hat
    )
    return np.asarray(
        radial_part[..., None] * frame.r_hat + tangential, dtype=np.complex128
    )


def eval_svwf(
    p: RadialKind,
    n: SvwfIndex,
    k: float,
    r: FloatArray,
) -> ComplexArray:
    """Evaluate the SVWF ``u_n^(p)`` at point(s) ``r`` of shape ``(..., 3)``.

    With ``Y = P~_l^m(cos theta) {cos, sin}(m phi)`` and ``L = sqrt(l(l+1))``::

        TE: -z_l(kr) [Delta A_tau phi_hat - pi A_taubar theta_hat]
        TM: L z_l(kr)/(kr) Y r_hat
            + (x z_l)'/x [Delta A_tau theta_hat + pi A_taubar phi_hat]

    so that ``TM = (1/k) curl TE``.

    Raises
    ------
        SpecialFunctionDomainError: For outgoing waves at the origin.

    """
    points = np.asarray(r, dtype=np.float64)
    frame = _PointFrame.of(points)
    table = legendre_table(frame.u.astype(np.complex128), n.l)
    angular = angular_functions(table)
    z, over_x, riccati = _radial_factors(p, n.l, k * frame.radius)
    return _svwf_from_frame(
        n, frame, table.values, angular, z, over_x, riccati
    )


def eval_svwf_basis(
    p: RadialKind,
    basis: SvwfBasis,
    k: float,
    r: FloatArray,
) -> ComplexArray:
    """Evaluate every basis SVWF at ``r``; shape ``(j, ..., 3)``."""
    points = np.asarray(r, dtype=np.float64)
    frame = _PointFrame.of(points)
    table = legendre_table(frame.u.astype(np.complex128), basis.l_max)
    angular = angular_functions(table)
    z, over_x, riccati = _radial_factors(p, basis.l_max, k * frame.radius)
    return np.stack(
        [
            _svwf_from_frame(
                n, frame, table.values, angular, z, over_x, riccati
            )
            for n in basis.indices
        ]
    )


def _check_polarization(i: int) -> None:
    if i not in (Polarization.TE, Polarization.TM):
        err = f"Plane-wave polarization must be 1 or 2, got {i}"
        raise ValueError(err)


def eval_pvwf_grid(
    i: int,
    u: complex | ComplexArray,
    beta: float | FloatArray,
    k: complex,
    r: FloatArray,
) -> ComplexArray:
    """``phi_i`` for every direction ``(u, beta)`` and point ``r``.

    Directions have the broadcast shape ``D`` of ``u`` and ``beta``; points
    have shape ``(..., 3)``. The result has shape ``(*D, ..., 3)``.
    """
    _check_polarization(i)
    points = np.asarray(r, dtype=np.float64)
    alpha_hat, beta_hat, gamma_hat = direction_vectors(u, beta)
    direction_shape = gamma_hat.shape[:-1]
    flat_points = points.reshape(-1, 3)
    phase = np.exp(-1j * k * (gamma_hat @ flat_points.T))
    if i == Polarization.TE:
        polar = 1j * _INV_4PI * beta_hat
    else:
        polar = -_INV_4PI * alpha_hat
    field = phase[..., None] * polar[..., None, :]
    return field.reshape(*direction_shape, *points.shape[:-1], 3)
