"""Scalar special functions behind every wave-function evaluation.

The normalized associated Legendre functions are unit-norm on ``[-1, 1]`` and
carry the Condon-Shortley phase. Internally they are evaluated through the
reduced polynomials ``Q_l^m = P_l^m / s^m`` with ``s = sqrt(1 - u^2)``; the
reduced form keeps the angular functions finite at ``u = +-1`` without any
special casing and extends unchanged to complex arguments.
"""

import enum
import logging
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt
from numpy.polynomial import legendre
from scipy import special

from layered_gsm.solver.consts import (
    LEGENDRE_OVERFLOW_CAP,
    MAX_LEGENDRE_DEGREE,
    MAX_QUADRATURE_ORDER,
)
from layered_gsm.solver.exceptions import (
    LegendreOverflowError,
    SpecialFunctionDomainError,
)

logger = logging.getLogger(__name__)

ComplexArray = npt.NDArray[np.complex128]
FloatArray = npt.NDArray[np.float64]


class RadialKind(enum.Enum):
    """Radial function selector, numbered like the SVWF superscript p."""

    REGULAR = 1
    OUTGOING = 4


def branch_sqrt(z: complex | ComplexArray) -> ComplexArray:
    """Square root with ``Im <= 0``, so that ``sqrt(-1) = -j``.

    The principal root is negated wherever its imaginary part is positive.
    An exactly real result keeps ``Re >= 0``.
    """
    root = np.sqrt(np.asarray(z, dtype=np.complex128))
    return np.where(root.imag > 0, -root, root)


@dataclass(frozen=True)
class LegendreTable:
    """Normalized associated Legendre functions at one or more arguments.

    Arrays are indexed ``[l, m, ...]`` with the trailing axes following the
    shape of ``u``. Entries with ``m > l`` are zero and not part of the table.

    Attributes
    ----------
        l_max: Largest degree in the table.
        u: Argument(s) of the table.
        values: ``P~_l^m(u)``.
        derivatives: ``dP~_l^m/du``; infinite for ``m = 1`` where
            ``1 - u^2 = 0``.
        reduced: ``Q_l^m(u) = P~_l^m(u) / s^m``.
        reduced_derivatives: ``dQ_l^m/du``.
        s: ``sqrt(1 - u^2)`` on the ``Im <= 0`` branch.

    """

    l_max: int
    u: ComplexArray
    values: ComplexArray
    derivatives: ComplexArray
    reduced: ComplexArray
    reduced_derivatives: ComplexArray
    s: ComplexArray

    @property
    def size(self) -> int:
        """Number of ``(l, m)`` entries per value kind."""
        return (self.l_max + 1) * (self.l_max + 2) // 2

    def value(self, l: int, m: int) -> ComplexArray:  # noqa: E741
        """Return ``P~_l^m`` at the table argument(s)."""
        _check_degree_order(l, m, self.l_max)
        return self.values[l, m]

    def derivative(self, l: int, m: int) -> ComplexArray:  # noqa: E741
        """Return ``dP~_l^m/du`` at the table argument(s)."""
        _check_degree_order(l, m, self.l_max)
        return self.derivatives[l, m]


@dataclass(frozen=True)
class AngularFunctions:
    """Auxiliary angular functions ``Delta_l^m`` and ``pi_l^m``.

    Arrays are indexed ``[l, m, ...]`` like :class:`LegendreTable`; the
    ``l = 0`` row and ``m > l`` entries are zero.
    """

    l_max: int
    u: ComplexArray
    delta: ComplexArray
    pi_fn: ComplexArray


def _check_degree_order(l: int, m: int, l_max: int) -> None:  # noqa: E741
    if not 0 <= m <= l <= l_max:
        err = f"Invalid degree/order (l={l}, m={m}) for l_max={l_max}"
        raise ValueError(err)


def _guard(
    magnitude: FloatArray,
    l: int,  # noqa: E741
    m: int,
    u: ComplexArray,
    cap: float,
) -> None:
    bad = ~(magnitude <= cap)
    if np.any(bad):
        first = complex(u[bad].flat[0]) if u.ndim else complex(u)
        raise LegendreOverflowError(l, m, first)


def legendre_table(
    u: complex | ComplexArray,
    l_max: int,
    *,
    overflow_cap: float = LEGENDRE_OVERFLOW_CAP,
) -> LegendreTable:
    """Evaluate ``P~_l^m(u)`` and its derivative for ``0 <= m <= l <= l_max``.

    Args:
    ----
        u: Argument, scalar or array, real or complex.
        l_max: Largest degree, ``1 <= l_max <= 64``.
        overflow_cap: Largest magnitude tolerated in any intermediate value.

    Returns:
    -------
        The populated table.

    Raises:
    ------
        ValueError: If ``l_max`` is out of range, ``u`` is not finite, or a
            real ``u`` lies outside ``[-1, 1]``.
        LegendreOverflowError: If an intermediate exceeds ``overflow_cap``.

    """
    if not 1 <= l_max <= MAX_LEGENDRE_DEGREE:
        err = f"l_max must be in [1, {MAX_LEGENDRE_DEGREE}], got {l_max}"
        raise ValueError(err)
    arg = np.asarray(u, dtype=np.complex128)
    if not np.all(np.isfinite(arg)):
        err = "Legendre argument must be finite"
        raise ValueError(err)
    is_real = arg.imag == 0
    if np.any(is_real & (np.abs(arg.real) > 1.0)):
        err = "Real Legendre argument must satisfy |u| <= 1"
        raise ValueError(err)

    s = branch_sqrt(1.0 - arg * arg)
    shape = (l_max + 1, l_max + 1, *arg.shape)
    q = np.zeros(shape, dtype=np.complex128)
    dq = np.zeros(shape, dtype=np.complex128)

    diagonal = np.full(arg.shape, 1.0 / np.sqrt(2.0), dtype=np.complex128)
    for m in range(l_max + 1):
        if m > 0:
            diagonal = -np.sqrt((2 * m + 1) / (2 * m)) * diagonal
        q[m, m] = diagonal
        if m == l_max:
            break
        q[m + 1, m] = np.sqrt(2 * m + 3) * arg * diagonal
        dq[m + 1, m] = np.sqrt(2 * m + 3) * diagonal
        for l in range(m + 2, l_max + 1):  # noqa: E741
            a = np.sqrt((4 * l * l - 1) / (l * l - m * m))
            b = np.sqrt(((l - 1) ** 2 - m * m) / (4 * (l - 1) ** 2 - 1))
            q[l, m] = a * (arg * q[l - 1, m] - b * q[l - 2, m])
            dq[l, m] = a * (
                q[l - 1, m] + arg * dq[l - 1, m] - b * dq[l - 2, m]
            )
            _guard(np.abs(q[l, m]), l, m, arg, overflow_cap)

    powers = [np.ones(arg.shape, dtype=np.complex128)]
    for _ in range(l_max + 1):
        powers.append(powers[-1] * s)

    values = np.zeros(shape, dtype=np.complex128)
    derivatives = np.zeros(shape, dtype=np.complex128)
    at_pole = s == 0
    for m in range(l_max + 1):
        magnitude = np.abs(powers[m])
        for l in range(m, l_max + 1):  # noqa: E741
            values[l, m] = powers[m] * q[l, m]
            _guard(np.abs(q[l, m]) * magnitude, l, m, arg, overflow_cap)
            derivative = powers[m] * dq[l, m]
            if m == 1:
                with np.errstate(divide="ignore", invalid="ignore"):
                    derivative = derivative - arg * q[l, m] / s
                derivative = np.where(at_pole, np.inf + 0j, derivative)
            elif m >= 2:
                derivative = derivative - m * arg * powers[m - 2] * q[l, m]
            derivatives[l, m] = derivative

    logger.debug("Legendre table l_max=%d over %d argument(s)", l_max, arg.size)
    return LegendreTable(
        l_max=l_max,
        u=arg,
        values=values,
        derivatives=derivatives,
        reduced=q,
        reduced_derivatives=dq,
        s=s,
    )


def angular_functions(table: LegendreTable) -> AngularFunctions:
    """Compute ``Delta_l^m`` and ``pi_l^m`` from a Legendre table.

    ``Delta = -(s/L) dP~/du`` and ``pi = -m P~ / (L s)`` with
    ``L = sqrt(l(l+1))``. Both are formed from the reduced polynomials, which
    yields the finite limits at ``u = +-1`` directly (nonzero only for
    ``m = 1``).
    """
    l_max = table.l_max
    u = table.u
    s = table.s
    powers = [np.ones(u.shape, dtype=np.complex128)]
    for _ in range(l_max + 1):
        powers.append(powers[-1] * s)

    delta = np.zeros_like(table.values)
    pi_fn = np.zeros_like(table.values)
    for l in range(1, l_max + 1):  # noqa: E741
        norm = 1.0 / np.sqrt(l * (l + 1))
        delta[l, 0] = -norm * powers[1] * table.reduced_derivatives[l, 0]
        for m in range(1, l + 1):
            q = table.reduced[l, m]
            dq = table.reduced_derivatives[l, m]
            pi_fn[l, m] = -norm * m * powers[m - 1] * q
            delta[l, m] = norm * (
                m * u * powers[m - 1] * q - powers[m + 1] * dq
            )
    return AngularFunctions(l_max=l_max, u=u, delta=delta, pi_fn=pi_fn)


def spherical_bessel(
    kind: RadialKind,
    l_max: int,
    x: complex | ComplexArray,
    *,
    derivative: bool = False,
) -> ComplexArray:
    """Spherical Bessel ``j_l`` or outgoing Hankel ``h_l^(2) = j_l - j y_l``.

    Args:
    ----
        kind: ``REGULAR`` for ``j_l``, ``OUTGOING`` for ``h_l^(2)``.
        l_max: Largest order; values are returned for ``l = 0..l_max``.
        x: Argument, scalar or array.
        derivative: Return the derivative with respect to ``x`` instead.

    Returns:
    -------
        Array of shape ``(l_max + 1, *x.shape)``.

    Raises:
    ------
        SpecialFunctionDomainError: For the outgoing kind at ``x = 0``.

    """
    arg = np.asarray(x, dtype=np.complex128)
    orders = np.arange(l_max + 1).reshape((l_max + 1,) + (1,) * arg.ndim)
    regular = special.spherical_jn(orders, arg, derivative=derivative)
    if kind is RadialKind.REGULAR:
        return np.asarray(regular, dtype=np.complex128)
    if np.any(arg == 0):
        err = "Outgoing spherical Hankel function is singular at x = 0"
        raise SpecialFunctionDomainError(err)
    irregular = special.spherical_yn(orders, arg, derivative=derivative)
    return np.asarray(regular - 1j * irregular, dtype=np.complex128)


def gauss_legendre(order: int) -> tuple[FloatArray, FloatArray]:
    """Gauss-Legendre nodes and weights on ``[-1, 1]``."""
    if not 1 <= order <= MAX_QUADRATURE_ORDER:
        err = f"Quadrature order must be in [1, {MAX_QUADRATURE_ORDER}]"
        raise ValueError(err)
    nodes, weights = legendre.leggauss(order)
    return np.asarray(nodes), np.asarray(weights)
