"""Composite port response of an antenna above a layered medium.

With the free-space GSM blocks ``[Gamma, R; T, S]`` and the interaction
matrix ``W`` the composite port matrix is::

    Gamma_c = Gamma + 1/2 R W [1 - 1/2 (S - 1) W]^-1 T

The bracket is either solved as a linear system or expanded in its Neumann
series, whose ``p``-th term is the ``(p+1)``-th antenna-ground reflection.
"""

import enum
import logging
import time
from collections.abc import Iterable
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
import numpy.typing as npt
from scipy import linalg

from layered_gsm.solver.consts import DEFAULT_RCOND_FLOOR
from layered_gsm.solver.exceptions import IllConditionedError, ValidationError
from layered_gsm.solver.models import GsmBlocks
from layered_gsm.solver.wmatrix import WMatrix

logger = logging.getLogger(__name__)

ComplexArray = npt.NDArray[np.complex128]

_FREQUENCY_RTOL = 1e-9


class SolveMode(enum.Enum):
    """How the feedback bracket is applied."""

    DIRECT = "direct"
    NEUMANN = "neumann"


@dataclass(frozen=True)
class SolveOptions:
    """Options for the feedback solve.

    Attributes
    ----------
        mode: Direct linear solve or truncated Neumann series.
            Defaults to DIRECT.
        order: Number of Neumann terms; ignored in direct mode.
            Defaults to 1.
        rcond_floor: Smallest acceptable reciprocal 1-norm condition
            estimate of the bracket in direct mode. Defaults to 1e-12.

    """

    mode: SolveMode = SolveMode.DIRECT
    order: int = 1
    rcond_floor: float = DEFAULT_RCOND_FLOOR

    def __post_init__(self) -> None:
        """Validate the series order and the condition floor."""
        if self.order < 1:
            err = f"Neumann order must be at least 1, got {self.order}"
            raise ValidationError(err)
        if not 0.0 <= self.rcond_floor < 1.0:
            err = f"rcond floor must be in [0, 1), got {self.rcond_floor}"
            raise ValidationError(err)

    @classmethod
    def direct(
        cls, rcond_floor: float = DEFAULT_RCOND_FLOOR
    ) -> "SolveOptions":
        """Direct solve with the given condition floor."""
        return cls(SolveMode.DIRECT, 1, rcond_floor)

    @classmethod
    def neumann(cls, order: int) -> "SolveOptions":
        """Neumann series truncated after ``order`` terms."""
        return cls(SolveMode.NEUMANN, order)

    @property
    def label(self) -> str:
        """Short description used in reports."""
        if self.mode is SolveMode.DIRECT:
            return "direct"
        return f"neumann({self.order})"


class OutgoingWaves(NamedTuple):
    """Amplitudes produced by a port excitation above the medium."""

    outgoing: ComplexArray
    reflected: ComplexArray
    port_out: ComplexArray


def _check_compatible(gsm: GsmBlocks, w: WMatrix) -> None:
    if gsm.basis != w.basis:
        err = (
            "GSM and interaction matrix use different bases "
            f"(l_max {gsm.basis.l_max} vs {w.basis.l_max} or reordered)"
        )
        raise ValidationError(err)
    if not np.isclose(gsm.frequency, w.frequency, rtol=_FREQUENCY_RTOL):
        err = (
            f"GSM frequency {gsm.frequency:.9g} Hz does not match the "
            f"interaction matrix frequency {w.frequency:.9g} Hz"
        )
        raise ValidationError(err)


def feedback_operator(gsm: GsmBlocks, w: WMatrix) -> ComplexArray:
    """The loop operator ``K = 1/2 (S - 1) W``."""
    _check_compatible(gsm, w)
    scattering = gsm.s_block - np.eye(gsm.basis.size, dtype=np.complex128)
    return 0.5 * w.right_product(scattering)


def spectral_radius(gsm: GsmBlocks, w: WMatrix) -> float:
    """Largest eigenvalue magnitude of the loop operator."""
    eigenvalues = linalg.eigvals(feedback_operator(gsm, w))
    return float(np.max(np.abs(eigenvalues)))


def _direct_solve(
    loop: ComplexArray,
    rhs: ComplexArray,
    rcond_floor: float,
) -> ComplexArray:
    bracket = np.eye(loop.shape[0], dtype=np.complex128) - loop
    lu, piv = linalg.lu_factor(bracket, check_finite=False)
    (gecon,) = linalg.get_lapack_funcs(("gecon",), (lu,))
    anorm = float(np.linalg.norm(bracket, 1))
    rcond, info = gecon(lu, anorm, norm="1")
    if info != 0 or not rcond >= rcond_floor:
        raise IllConditionedError(float(rcond), rcond_floor)
    logger.debug("Feedback bracket rcond=%.3e", rcond)
    return linalg.lu_solve((lu, piv), rhs, check_finite=False)


def _neumann_solve(
    loop: ComplexArray,
    rhs: ComplexArray,
    order: int,
) -> ComplexArray:
    term = rhs
    total = rhs.copy()
    previous_norm = float(np.linalg.norm(term))
    growth = 0.0
    for _ in range(1, order):
        term = loop @ term
        total += term
        norm = float(np.linalg.norm(term))
        growth = norm / previous_norm if previous_norm > 0 else 0.0
        previous_norm = norm
    if growth >= 1.0:
        logger.warning(
            "Neumann series with %d terms is not contracting "
            "(last term ratio %.3f)",
            order,
            growth,
        )
    return total


def _apply_bracket(
    gsm: GsmBlocks,
    w: WMatrix,
    rhs: ComplexArray,
    opts: SolveOptions,
) -> ComplexArray:
    loop = feedback_operator(gsm, w)
    if opts.mode is SolveMode.DIRECT:
        return _direct_solve(loop, rhs, opts.rcond_floor)
    return _neumann_solve(loop, rhs, opts.order)


def gamma_composite(
    gsm: GsmBlocks,
    w: WMatrix,
    opts: SolveOptions | None = None,
) -> ComplexArray:
    """Port S-parameter matrix of the antenna above the medium.

    Args:
    ----
        gsm: Free-space GSM of the antenna.
        w: Interaction matrix in the same basis and at the same frequency.
        opts: Solve mode; direct by default.

    Returns:
    -------
        The ``e x e`` composite matrix.

    Raises:
    ------
        ValidationError: If the basis or frequency of ``gsm`` and ``w``
            differ.
        IllConditionedError: If the direct-mode bracket estimate falls below
            the condition floor.

    """
    options = opts or SolveOptions()
    start = time.perf_counter()
    feedback = _apply_bracket(gsm, w, gsm.t_block, options)
    composite = gsm.gamma + 0.5 * gsm.r_block @ w.matvec(feedback)
    logger.info(
        "Composite response (%s, e=%d, j=%d) solved in %.2f ms",
        options.label,
        gsm.port_count,
        gsm.basis.size,
        (time.perf_counter() - start) * 1e3,
    )
    return composite


def solve_outgoing(
    gsm: GsmBlocks,
    w: WMatrix,
    v: ComplexArray,
    opts: SolveOptions | None = None,
) -> OutgoingWaves:
    """Wave amplitudes for the port excitation ``v``.

    ``f = [1 - 1/2 (S - 1) W]^-1 T v`` is the outgoing spherical spectrum,
    ``a = W f`` the reflected regular spectrum and ``Gamma v + 1/2 R a`` the
    wave leaving the ports.
    """
    options = opts or SolveOptions()
    excitation = np.asarray(v, dtype=np.complex128)
    if excitation.shape != (gsm.port_count,):
        err = (
            f"Excitation has shape {excitation.shape}, "
            f"expected ({gsm.port_count},)"
        )
        raise ValidationError(err)
    if not np.all(np.isfinite(excitation)):
        err = "Excitation contains non-finite entries"
        raise ValidationError(err)
    outgoing = _apply_bracket(gsm, w, gsm.t_block @ excitation, options)
    reflected = w.matvec(outgoing)
    port_out = gsm.gamma @ excitation + 0.5 * gsm.r_block @ reflected
    return OutgoingWaves(outgoing, reflected, port_out)


def db(values: ComplexArray) -> npt.NDArray[np.float64]:
    """``20 log10 |values|``."""
    with np.errstate(divide="ignore"):
        return 20.0 * np.log10(np.abs(values))


def _db_gap(
    composite: ComplexArray,
    reference_db: npt.NDArray[np.float64],
) -> float:
    gap = np.abs(db(composite) - reference_db)
    finite = np.isfinite(gap)
    return float(np.max(gap[finite])) if np.any(finite) else 0.0


@dataclass(frozen=True)
class OrderStudy:
    """Composite responses per reflection order against the direct solve.

    Attributes
    ----------
        orders: Requested Neumann orders, ascending.
        composites: Composite matrix per order.
        direct: Composite matrix from the direct solve.
        max_abs_deviation: ``max |Gamma_c(N) - Gamma_c(direct)|`` per order.
        max_db_deviation: Largest magnitude gap in dB per order.

    """

    orders: tuple[int, ...]
    composites: dict[int, ComplexArray] = field(repr=False)
    direct: ComplexArray = field(repr=False)
    max_abs_deviation: dict[int, float]
    max_db_deviation: dict[int, float]


def reflection_order_study(
    gsm: GsmBlocks,
    w: WMatrix,
    orders: Iterable[int],
    *,
    rcond_floor: float = DEFAULT_RCOND_FLOOR,
) -> OrderStudy:
    """Compare truncated reflection series against the direct solve.

    The series is summed once up to the largest requested order and sampled
    at each requested order on the way.
    """
    wanted = tuple(sorted(set(orders)))
    if not wanted or wanted[0] < 1:
        err = "Orders must be a non-empty set of integers >= 1"
        raise ValidationError(err)

    loop = feedback_operator(gsm, w)
    direct_feedback = _direct_solve(loop, gsm.t_block, rcond_floor)
    direct = gsm.gamma + 0.5 * gsm.r_block @ w.matvec(direct_feedback)
    direct_db = db(direct)

    composites: dict[int, ComplexArray] = {}
    abs_dev: dict[int, float] = {}
    db_dev: dict[int, float] = {}
    term = gsm.t_block
    total = term.copy()
    for order in range(1, wanted[-1] + 1):
        if order > 1:
            term = loop @ term
            total = total + term
        if order in wanted:
            composite = gsm.gamma + 0.5 * gsm.r_block @ w.matvec(total)
            composites[order] = composite
            abs_dev[order] = float(np.max(np.abs(composite - direct)))
            db_dev[order] = _db_gap(composite, direct_db)
            logger.debug(
                "Order %d: max |dGamma|=%.3e, max dB gap=%.3f",
                order,
                abs_dev[order],
                db_dev[order],
            )
    return OrderStudy(wanted, composites, direct, abs_dev, db_dev)
