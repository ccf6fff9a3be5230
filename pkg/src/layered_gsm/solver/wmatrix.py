"""Interaction matrix mapping outgoing to reflected regular SVWF amplitudes.

For indices sharing the azimuthal order ``m``::

    W[n, n'] = (2 / N_m) sum_i (-1)^{a'} I^i[n, n']
               int_C du B_ni(u) rho_i(u) exp(-2j k z_I u) B+_{n'i}(u)

with ``a' = l' + m' + tau' + i + 1``, the azimuthal integral ``I`` and
``N_m = pi (1 + delta_m0)``. Entries with ``m != m'`` vanish and are never
formed; the matrix is stored as one dense block per ``m``.

The contour runs from ``u = -1`` to ``0`` on the real axis and then from ``0``
to ``j kappa`` along the imaginary axis, with Gauss-Legendre quadrature on
each segment.
"""

import logging
import math
import time
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import numpy.typing as npt

from layered_gsm.solver.consts import (
    KAPPA_FLOOR,
    KAPPA_RULE_MAX_LMAX,
    LEGENDRE_OVERFLOW_CAP,
)
from layered_gsm.solver.exceptions import ValidationError
from layered_gsm.solver.fingerprint import (
    FingerprintProvider,
    Sha256FingerprintProvider,
    configuration_payload,
)
from layered_gsm.solver.fresnel import rho_stack, wavenumber
from layered_gsm.solver.models import (
    ContourOrientation,
    ContourSpec,
    LayerStack,
    Polarization,
    SvwfBasis,
)
from layered_gsm.solver.options import ComputeOptions
from layered_gsm.solver.specfun import (
    angular_functions,
    gauss_legendre,
    legendre_table,
)
from layered_gsm.solver.waves import (
    azimuthal_integral,
    b_coefficients,
    normalization,
)

logger = logging.getLogger(__name__)

ComplexArray = npt.NDArray[np.complex128]
FloatArray = npt.NDArray[np.float64]

_POLARIZATIONS = (Polarization.TE, Polarization.TM)
_WAVENUMBER_RTOL = 1e-9


def lmax_rule(kr_min: float) -> int:
    """Degree truncation ``ceil(kR + 2 (kR)^(1/3) + 3)``.

    Raises
    ------
        ValueError: If ``kr_min`` is not positive.

    """
    if not (math.isfinite(kr_min) and kr_min > 0):
        err = f"kR_min must be positive, got {kr_min}"
        raise ValueError(err)
    return math.ceil(kr_min + 2.0 * kr_min ** (1.0 / 3.0) + 3.0)


def kappa_rule(l_max: int, kr_min: float, iota: float) -> float:
    """Evanescent truncation ``(iota L + 1) / kR + 0.03 kR``, floored above 1.

    The rule is calibrated for ``l_max <= 20``; larger degrees are accepted
    with a warning.

    Raises
    ------
        ValueError: If ``l_max < 1`` or ``kr_min`` is not positive.

    """
    if l_max < 1:
        err = f"l_max must be at least 1, got {l_max}"
        raise ValueError(err)
    if not (math.isfinite(kr_min) and kr_min > 0):
        err = f"kR_min must be positive, got {kr_min}"
        raise ValueError(err)
    if l_max > KAPPA_RULE_MAX_LMAX:
        logger.warning(
            "Truncation rule used with l_max=%d above its calibrated range "
            "(<= %d)",
            l_max,
            KAPPA_RULE_MAX_LMAX,
        )
    kappa = (iota * l_max + 1.0) / kr_min + 0.03 * kr_min
    return max(kappa, KAPPA_FLOOR)


def truncation(
    k: float,
    r_min: float,
    options: ComputeOptions | None = None,
) -> tuple[SvwfBasis, ContourSpec]:
    """Basis and contour for an antenna of minimum sphere radius ``r_min``.

    Explicit ``l_max`` and ``kappa`` in ``options`` override the rules.
    """
    opts = options or ComputeOptions()
    kr_min = k * r_min
    l_max = opts.l_max if opts.l_max is not None else lmax_rule(kr_min)
    kappa = (
        opts.kappa
        if opts.kappa is not None
        else kappa_rule(l_max, kr_min, opts.iota)
    )
    contour = ContourSpec(
        kappa=kappa,
        iota=opts.iota,
        quad_order_evanescent=opts.quad_order_evanescent,
        quad_order_propagating=opts.quad_order_propagating,
        orientation=opts.orientation,
    )
    return SvwfBasis.canonical(l_max), contour


def contour_nodes(contour: ContourSpec) -> tuple[ComplexArray, ComplexArray]:
    """Quadrature nodes ``u`` and complex weights ``du`` along the contour.

    Propagating nodes come first (``u`` in ``(-1, 0)``), followed by the
    evanescent nodes ``u = j t`` with ``t`` in ``(0, kappa)``.
    """
    x_p, w_p = gauss_legendre(contour.quad_order_propagating)
    x_e, w_e = gauss_legendre(contour.quad_order_evanescent)
    u_prop = 0.5 * (x_p - 1.0)
    weight_prop = 0.5 * w_p
    t = 0.5 * contour.kappa * (x_e + 1.0)
    u_evan = 1j * t
    weight_evan = 0.5j * contour.kappa * w_e
    if contour.orientation is ContourOrientation.FLIPPED_EVANESCENT:
        weight_evan = -weight_evan
    elif contour.orientation is ContourOrientation.REVERSED:
        weight_prop = -weight_prop
        weight_evan = -weight_evan
    nodes = np.concatenate([u_prop.astype(np.complex128), u_evan])
    weights = np.concatenate([weight_prop.astype(np.complex128), weight_evan])
    return nodes, weights


@dataclass(frozen=True, eq=False)
class _ContourTables:
    """Stack-independent factors of the interaction integrand."""

    nodes: ComplexArray
    weights: ComplexArray
    # Per polarization: (-1)^{a'} B+ and B at the nodes, shape (j, nodes).
    b: dict[int, ComplexArray]
    signed_b_dagger: dict[int, ComplexArray]
    # Per (m, polarization): azimuthal integrals over the m-block.
    azimuthal: dict[tuple[int, int], FloatArray]


@lru_cache(maxsize=16)
def _contour_tables(
    basis: SvwfBasis,
    contour: ContourSpec,
    overflow_cap: float,
) -> _ContourTables:
    nodes, weights = contour_nodes(contour)
    angular = angular_functions(
        legendre_table(nodes, basis.l_max, overflow_cap=overflow_cap)
    )
    b: dict[int, ComplexArray] = {}
    signed: dict[int, ComplexArray] = {}
    for i in _POLARIZATIONS:
        b[i] = b_coefficients(basis, i, angular)
        signs = np.asarray(
            [(-1.0) ** (n.l + n.m + n.tau + i + 1) for n in basis.indices]
        )
        signed[i] = signs[:, None] * b_coefficients(
            basis, i, angular, dagger=True
        )
    azimuthal: dict[tuple[int, int], FloatArray] = {}
    for m, positions in basis.m_groups.items():
        members = [basis.indices[p] for p in positions]
        for i in _POLARIZATIONS:
            azimuthal[m, i] = np.asarray(
                [
                    [azimuthal_integral(n, n2, i) for n2 in members]
                    for n in members
                ]
            )
    logger.debug(
        "Contour tables for l_max=%d at %d node(s)", basis.l_max, nodes.size
    )
    return _ContourTables(nodes, weights, b, signed, azimuthal)


@dataclass(frozen=True, eq=False)
class WMatrix:
    """Block-diagonal interaction matrix.

    Attributes
    ----------
        basis: SVWF basis of rows and columns.
        blocks: Dense block per azimuthal order ``m`` over the positions
            ``basis.m_groups[m]``.
        frequency: Frequency in Hz.
        fingerprint: Identifies the (stack, frequency, basis, contour)
            configuration the matrix was assembled for.

    """

    basis: SvwfBasis
    blocks: dict[int, ComplexArray]
    frequency: float
    fingerprint: str

    def __post_init__(self) -> None:
        """Check every block against the basis grouping."""
        groups = self.basis.m_groups
        if set(self.blocks) != set(groups):
            err = "Interaction matrix blocks do not match the basis orders"
            raise ValidationError(err)
        for m, block in self.blocks.items():
            size = groups[m].size
            if block.shape != (size, size):
                err = (
                    f"Block m={m} has shape {block.shape}, "
                    f"expected {(size, size)}"
                )
                raise ValidationError(err)

    @property
    def size(self) -> int:
        """Number of rows ``j``."""
        return self.basis.size

    @property
    def nonzero_count(self) -> int:
        """Number of stored entries; grows linearly with ``l_max``."""
        return sum(block.size for block in self.blocks.values())

    def dense(self) -> ComplexArray:
        """Full ``j x j`` matrix in basis order."""
        matrix = np.zeros((self.size, self.size), dtype=np.complex128)
        for m, positions in self.basis.m_groups.items():
            matrix[np.ix_(positions, positions)] = self.blocks[m]
        return matrix

    def matvec(self, vector: ComplexArray) -> ComplexArray:
        """Block-wise ``W @ vector`` for a vector or a ``j x k`` matrix."""
        values = np.asarray(vector, dtype=np.complex128)
        result = np.zeros_like(values)
        for m, positions in self.basis.m_groups.items():
            result[positions] = self.blocks[m] @ values[positions]
        return result

    def right_product(self, matrix: ComplexArray) -> ComplexArray:
        """Block-wise ``matrix @ W`` for a ``k x j`` matrix."""
        values = np.asarray(matrix, dtype=np.complex128)
        result = np.zeros_like(values)
        for m, positions in self.basis.m_groups.items():
            result[:, positions] = values[:, positions] @ self.blocks[m]
        return result

    @classmethod
    def from_dense(
        cls,
        matrix: ComplexArray,
        basis: SvwfBasis,
        frequency: float,
        fingerprint: str,
    ) -> "WMatrix":
        """Split a dense matrix into its ``m`` blocks.

        Entries coupling different orders are dropped.
        """
        dense = np.asarray(matrix, dtype=np.complex128)
        if dense.shape != (basis.size, basis.size):
            err = (
                f"Dense matrix has shape {dense.shape}, "
                f"expected {(basis.size, basis.size)}"
            )
            raise ValidationError(err)
        blocks = {
            m: dense[np.ix_(positions, positions)].copy()
            for m, positions in basis.m_groups.items()
        }
        return cls(basis, blocks, frequency, fingerprint)

    def permuted(self, basis: SvwfBasis) -> "WMatrix":
        """Re-express the matrix in a reordered basis."""
        order = basis.permutation_from(self.basis)
        dense = self.dense()[np.ix_(order, order)]
        return WMatrix.from_dense(
            dense, basis, self.frequency, self.fingerprint
        )


def _full_product(left: ComplexArray, right: ComplexArray) -> ComplexArray:
    return left @ right.T


def _upper_product(left: ComplexArray, right: ComplexArray) -> ComplexArray:
    """``left @ right.T`` on and above the diagonal; zero below it."""
    count = left.shape[0]
    upper = np.zeros((count, count), dtype=np.complex128)
    for row in range(count):
        upper[row, row:] = right[row:] @ left[row]
    return upper


def assemble_w(  # noqa: PLR0913
    basis: SvwfBasis,
    stack: LayerStack,
    k: float,
    omega: float,
    contour: ContourSpec,
    *,
    mirror: bool = True,
    overflow_cap: float | None = None,
    fingerprint_provider: FingerprintProvider | None = None,
) -> WMatrix:
    """Assemble the interaction matrix for one stack and frequency.

    Args:
    ----
        basis: SVWF basis of rows and columns.
        stack: Layered medium below the antenna.
        k: Wavenumber of the top medium in rad/m.
        omega: Angular frequency in rad/s.
        contour: Truncated contour and quadrature orders.
        mirror: Integrate only the upper triangle of each block and copy
            it onto the lower one. Disabling it integrates every entry.
        overflow_cap: Legendre overflow guard; library default when None.
        fingerprint_provider: Provider used to fingerprint the result.

    Returns:
    -------
        The assembled matrix.

    Raises:
    ------
        ValidationError: If ``k`` does not match the top medium at ``omega``.
        SingularityError: If a quadrature node hits a reflection singularity.

    """
    expected = wavenumber(stack.top, omega)
    if not np.isclose(k, expected, rtol=_WAVENUMBER_RTOL, atol=0.0):
        err = (
            f"Wavenumber {k} does not match the top medium at "
            f"omega={omega} (expected {expected})"
        )
        raise ValidationError(err)

    start = time.perf_counter()
    cap = LEGENDRE_OVERFLOW_CAP if overflow_cap is None else overflow_cap
    tables = _contour_tables(basis, contour, cap)
    phase = np.exp(-2j * k * stack.z_interface * tables.nodes)
    weighted = {
        i: rho_stack(i, stack, tables.nodes, omega) * phase * tables.weights
        for i in _POLARIZATIONS
    }

    product = _upper_product if mirror else _full_product
    blocks: dict[int, ComplexArray] = {}
    for m, positions in basis.m_groups.items():
        block = np.zeros((positions.size, positions.size), dtype=np.complex128)
        for i in _POLARIZATIONS:
            left = tables.b[i][positions] * weighted[i]
            right = tables.signed_b_dagger[i][positions]
            block += tables.azimuthal[m, i] * product(left, right)
        block *= 2.0 / normalization(m)
        if mirror:
            block += np.triu(block, 1).T
        blocks[m] = block

    frequency = omega / (2.0 * np.pi)
    provider = fingerprint_provider or Sha256FingerprintProvider()
    fingerprint = provider.fingerprint(
        configuration_payload(stack, frequency, basis, contour)
    )
    elapsed = (time.perf_counter() - start) * 1e3
    logger.info(
        "Interaction matrix l_max=%d (%d blocks) assembled in %.2f ms",
        basis.l_max,
        len(blocks),
        elapsed,
    )
    return WMatrix(basis, blocks, frequency, fingerprint)
