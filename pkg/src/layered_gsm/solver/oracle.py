"""Brute-force validators for the wave conventions and the interaction matrix.

Each check returns a relative error normalised by the largest reference
magnitude over the sample points, so near-zero totals at individual points
never dominate the result.
"""

import logging
from collections.abc import Iterable

import numpy as np
import numpy.typing as npt

from layered_gsm.solver.fresnel import rho_stack
from layered_gsm.solver.models import (
    ContourSpec,
    LayerStack,
    Polarization,
    SvwfBasis,
    SvwfIndex,
)
from layered_gsm.solver.specfun import (
    RadialKind,
    angular_functions,
    gauss_legendre,
    legendre_table,
)
from layered_gsm.solver.waves import (
    a_factor,
    b_coefficient,
    eval_pvwf_grid,
    eval_svwf,
    eval_svwf_basis,
)
from layered_gsm.solver.wmatrix import WMatrix, assemble_w, contour_nodes

logger = logging.getLogger(__name__)

ComplexArray = npt.NDArray[np.complex128]
FloatArray = npt.NDArray[np.float64]

_POLARIZATIONS = (Polarization.TE, Polarization.TM)
_MIRROR = np.array([1.0, 1.0, -1.0])


def _relative(difference: ComplexArray, reference: ComplexArray) -> float:
    """``max |difference| / max |reference|`` over the vector samples."""
    error = float(np.max(np.linalg.norm(difference, axis=-1)))
    scale = float(np.max(np.linalg.norm(reference, axis=-1)))
    if scale == 0.0:
        return error
    return error / scale


def shell_points(
    count: int,
    k: float,
    inner: float,
    outer: float,
    seed: int = 0,
) -> FloatArray:
    """Random points with ``k |r|`` uniform in ``[inner, outer]``."""
    rng = np.random.default_rng(seed)
    directions = rng.normal(size=(count, 3))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    radii = rng.uniform(inner, outer, size=count) / k
    return directions * radii[:, None]


def plane_grid(z: float, lateral_radius: float, per_side: int) -> FloatArray:
    """Square grid of points on the plane at height ``z``."""
    axis = np.linspace(-lateral_radius, lateral_radius, per_side)
    x, y = np.meshgrid(axis, axis, indexing="ij")
    return np.stack([x.ravel(), y.ravel(), np.full(x.size, z)], axis=-1)


def check_transform_identity(
    n: SvwfIndex,
    k: float,
    points: FloatArray,
    quad: tuple[int, int] = (64, 64),
) -> float:
    """Regular SVWF against its propagating plane-wave spectrum.

    ``u_n(r) = sum_i int B_ni A_ni phi_i d gamma`` is integrated over the
    full sphere of directions with Gauss-Legendre in ``alpha`` and the
    trapezoidal rule in ``beta``.

    Args:
    ----
        n: SVWF index.
        k: Wavenumber in rad/m.
        points: Sample points, shape ``(p, 3)``.
        quad: Number of ``alpha`` and ``beta`` nodes.

    Returns:
    -------
        Maximum error relative to the largest direct field magnitude.

    """
    n_alpha, n_beta = quad
    x, w_x = gauss_legendre(n_alpha)
    alpha = 0.5 * np.pi * (x + 1.0)
    weight_alpha = 0.5 * np.pi * w_x * np.sin(alpha)
    beta = 2.0 * np.pi * np.arange(n_beta) / n_beta
    weight_beta = 2.0 * np.pi / n_beta

    u = np.cos(alpha).astype(np.complex128)
    angular = angular_functions(legendre_table(u, max(n.l, 1)))
    sample = np.asarray(points, dtype=np.float64)
    spectral = np.zeros((*sample.shape[:-1], 3), dtype=np.complex128)
    for i in _POLARIZATIONS:
        coeff = b_coefficient(n, i, angular)[:, None] * a_factor(n, i, beta)
        weights = coeff * weight_alpha[:, None] * weight_beta
        waves = eval_pvwf_grid(i, u[:, None], beta[None, :], k, sample)
        spectral += np.einsum("ab,ab...->...", weights, waves)

    direct = eval_svwf(RadialKind.REGULAR, n, k, sample)
    error = _relative(spectral - direct, direct)
    logger.debug("Transform identity %s: %.3e", n.label, error)
    return error


def _reflected_expansion(
    w: WMatrix,
    sources: Iterable[SvwfIndex],
    k: float,
    points: FloatArray,
) -> dict[SvwfIndex, ComplexArray]:
    """``sum_n' W[n, n'] u_n'^(1)(r)`` for each source ``n``."""
    regular = eval_svwf_basis(RadialKind.REGULAR, w.basis, k, points)
    groups = w.basis.m_groups
    fields: dict[SvwfIndex, ComplexArray] = {}
    for n in sources:
        positions = groups[n.m]
        row = int(np.flatnonzero(positions == w.basis.position(n))[0])
        coefficients = w.blocks[n.m][row]
        fields[n] = np.tensordot(coefficients, regular[positions], axes=1)
    return fields


def _default_sources(basis: SvwfBasis) -> tuple[SvwfIndex, ...]:
    return tuple(n for n in basis.indices if n.l == 1)


def check_pec_boundary(  # noqa: PLR0913
    basis: SvwfBasis,
    z_interface: float,
    k: float,
    w: WMatrix,
    sample_points: FloatArray,
    sources: Iterable[SvwfIndex] | None = None,
) -> float:
    """Tangential field residual on a PEC plane.

    For each source the total field ``u_n^(4) + sum_n' W[n, n'] u_n'^(1)``
    is sampled on ``z = z_interface``. The result is the largest ratio of
    total to outgoing tangential magnitude over the sources, each taken as
    a maximum over the sample points.
    """
    chosen = tuple(sources) if sources is not None else _default_sources(basis)
    points = np.asarray(sample_points, dtype=np.float64).copy()
    points[..., 2] = z_interface
    reflected = _reflected_expansion(w, chosen, k, points)
    residual = 0.0
    for n in chosen:
        outgoing = eval_svwf(RadialKind.OUTGOING, n, k, points)
        total = outgoing + reflected[n]
        ratio = _relative(total[..., :2], outgoing[..., :2])
        logger.debug("PEC boundary residual %s: %.3e", n.label, ratio)
        residual = max(residual, ratio)
    return residual


def check_pec_image(
    z_interface: float,
    k: float,
    w: WMatrix,
    points: FloatArray,
    sources: Iterable[SvwfIndex] | None = None,
) -> float:
    """Reflected expansion against the mirror image of the source.

    Above a PEC plane at ``z_I`` the reflected field is
    ``-P E(M r)`` with ``M`` the mirror about the plane and
    ``P = diag(1, 1, -1)``.
    """
    chosen = (
        tuple(sources) if sources is not None else _default_sources(w.basis)
    )
    sample = np.asarray(points, dtype=np.float64)
    mirrored = sample * _MIRROR
    mirrored[..., 2] += 2.0 * z_interface
    reflected = _reflected_expansion(w, chosen, k, sample)
    error = 0.0
    for n in chosen:
        image = -_MIRROR * eval_svwf(RadialKind.OUTGOING, n, k, mirrored)
        error = max(error, _relative(reflected[n] - image, image))
    logger.debug("PEC image error over %d source(s): %.3e", len(chosen), error)
    return error


def reflected_field_direct(  # noqa: PLR0913
    n: SvwfIndex,
    stack: LayerStack,
    k: float,
    omega: float,
    points: FloatArray,
    contour: ContourSpec,
    beta_order: int = 64,
) -> ComplexArray:
    """Reflected field of ``u_n^(4)`` by direct spectral integration.

    Every downgoing plane wave of the spectrum
    ``u_n^(4) = 2 sum_i int_C B_ni A_ni phi_i d gamma`` is reflected with
    ``rho_i exp(-2j k z_I u)`` into the mirrored direction ``u -> -u``.
    """
    nodes, weights = contour_nodes(contour)
    beta = 2.0 * np.pi * np.arange(beta_order) / beta_order
    weight_beta = 2.0 * np.pi / beta_order
    angular = angular_functions(legendre_table(nodes, max(n.l, 1)))
    phase = np.exp(-2j * k * stack.z_interface * nodes)
    sample = np.asarray(points, dtype=np.float64)
    field = np.zeros((*sample.shape[:-1], 3), dtype=np.complex128)
    for i in _POLARIZATIONS:
        spectrum = (
            2.0
            * b_coefficient(n, i, angular)
            * rho_stack(i, stack, nodes, omega)
            * phase
            * weights
        )
        coeff = spectrum[:, None] * a_factor(n, i, beta)[None, :] * weight_beta
        waves = eval_pvwf_grid(i, -nodes[:, None], beta[None, :], k, sample)
        field += np.einsum("ab,ab...->...", coeff, waves)
    return field


def check_reflected_field(  # noqa: PLR0913
    n: SvwfIndex,
    stack: LayerStack,
    k: float,
    omega: float,
    points: FloatArray,
    basis: SvwfBasis,
    contour: ContourSpec,
    w: WMatrix | None = None,
) -> float:
    """Interaction-matrix expansion against direct spectral integration.

    The direct side uses the same contour with doubled quadrature orders.
    """
    matrix = w or assemble_w(basis, stack, k, omega, contour)
    sample = np.asarray(points, dtype=np.float64)
    expanded = _reflected_expansion(matrix, (n,), k, sample)[n]
    direct = reflected_field_direct(
        n, stack, k, omega, sample, contour.doubled()
    )
    error = _relative(expanded - direct, direct)
    logger.debug("Reflected field %s: %.3e", n.label, error)
    return error
