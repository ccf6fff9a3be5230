"""Integration contour for the spectral reflection integral."""

import enum
from dataclasses import dataclass

from layered_gsm.solver.consts import DEFAULT_IOTA, DEFAULT_QUAD_ORDER
from layered_gsm.solver.exceptions import ValidationError


class ContourOrientation(enum.Enum):
    """Traversal of the two contour segments.

    ``STANDARD`` runs ``u`` from -1 to 0 on the real axis and then from 0 to
    ``j kappa`` on the imaginary axis. The other members exist as negative
    controls for the validation oracles.
    """

    STANDARD = "standard"
    FLIPPED_EVANESCENT = "flipped_evanescent"
    REVERSED = "reversed"


@dataclass(frozen=True)
class ContourSpec:
    """Truncated contour in ``u = cos(alpha)`` with per-segment quadrature.

    Attributes
    ----------
        kappa: Truncation point on the imaginary axis, must exceed 1.
        iota: Accuracy parameter the truncation point was derived from.
        quad_order_evanescent: Gauss-Legendre order on ``u = j t``,
            ``t`` in ``[0, kappa]``.
        quad_order_propagating: Gauss-Legendre order on ``u`` in ``[-1, 0]``.
        orientation: Segment traversal; only ``STANDARD`` is physical.

    """

    kappa: float
    iota: float = DEFAULT_IOTA
    quad_order_evanescent: int = DEFAULT_QUAD_ORDER
    quad_order_propagating: int = DEFAULT_QUAD_ORDER
    orientation: ContourOrientation = ContourOrientation.STANDARD

    def __post_init__(self) -> None:
        """Validate the contour parameters."""
        if not self.kappa > 1.0:
            err = f"Contour truncation must exceed 1, got {self.kappa}"
            raise ValidationError(err)
        if min(self.quad_order_evanescent, self.quad_order_propagating) < 2:
            err = "Quadrature orders must be at least 2"
            raise ValidationError(err)

    def doubled(self) -> "ContourSpec":
        """Same contour with both quadrature orders doubled."""
        return ContourSpec(
            kappa=self.kappa,
            iota=self.iota,
            quad_order_evanescent=2 * self.quad_order_evanescent,
            quad_order_propagating=2 * self.quad_order_propagating,
            orientation=self.orientation,
        )

    def as_dict(self) -> dict[str, object]:
        """Plain-data view used for fingerprints and reports."""
        return {
            "kappa": self.kappa,
            "iota": self.iota,
            "quad_order_evanescent": self.quad_order_evanescent,
            "quad_order_propagating": self.quad_order_propagating,
            "orientation": self.orientation.value,
        }
