"""Base classes for all layered-gsm exceptions."""

from collections.abc import Sequence
from typing import final


class LayeredGsmError(Exception):
    """Base class for all layered-gsm exceptions."""


class ValidationError(LayeredGsmError):
    """Raised when a record or a combination of inputs is inconsistent."""

    default_message: str = "Invalid input"


class SpecialFunctionDomainError(LayeredGsmError):
    """Raised when a special function is evaluated outside its domain."""

    default_message: str = "Argument outside the function domain"


class ChecksumError(LayeredGsmError):
    """Raised when a GSM payload is truncated or corrupted."""

    default_message: str = "GSM payload checksum mismatch"


@final
class DimensionMismatchError(LayeredGsmError):
    """Raised when an intact GSM payload does not fit its declared shape."""

    def __init__(self, values: int, expected: int) -> None:
        """Initialize the dimension error.

        Args:
        ----
            values: Complex values held by the payload
            expected: Values implied by the header's ports, degree and
                frequencies

        """
        self.values = values
        self.expected = expected
        super().__init__(
            f"Payload holds {values} values, dimensions need {expected}"
        )


class SynthesisError(LayeredGsmError):
    """Raised when a synthetic GSM cannot satisfy its constraints."""

    default_message: str = "Synthetic GSM generation failed"


@final
class LegendreOverflowError(LayeredGsmError):
    """Raised when a Legendre recurrence exceeds the magnitude cap."""

    def __init__(self, l: int, m: int, u: complex) -> None:  # noqa: E741
        """Initialize the overflow error.

        Args:
        ----
            l: Degree at which the cap was exceeded
            m: Order at which the cap was exceeded
            u: Argument of the table

        """
        self.l = l
        self.m = m
        self.u = u
        super().__init__(
            f"Legendre recurrence overflow at l={l}, m={m}, u={u}"
        )


@final
class SingularityError(LayeredGsmError):
    """Raised when a reflection coefficient hits a vanishing denominator."""

    def __init__(self, u: complex, detail: str = "") -> None:
        """Initialize the singularity error.

        Args:
        ----
            u: Spectral variable cos(alpha) at which the singularity occurred
            detail: Optional description of the singular quantity

        """
        self.u = u
        message = f"Singular reflection coefficient at u={u}"
        if detail:
            message += f" ({detail})"
        super().__init__(message)


@final
class IllConditionedError(LayeredGsmError):
    """Raised when the feedback bracket is too ill-conditioned to solve."""

    def __init__(self, rcond: float, floor: float) -> None:
        """Initialize the conditioning error.

        Args:
        ----
            rcond: Estimated reciprocal 1-norm condition number
            floor: Configured floor that the estimate fell below

        """
        self.rcond = rcond
        self.floor = floor
        super().__init__(
            f"Feedback bracket ill-conditioned: rcond={rcond:.3e} "
            f"below floor {floor:.3e}"
        )


@final
class SchemaError(LayeredGsmError):
    """Raised when a document violates its schema."""

    def __init__(self, path: str, reason: str) -> None:
        """Initialize the schema error.

        Args:
        ----
            path: Dotted path of the offending field
            reason: What is wrong with it

        """
        self.path = path
        self.reason = reason
        super().__init__(f"{path}: {reason}")


@final
class FrequencyNotFoundError(LayeredGsmError):
    """Raised when a requested frequency is absent from a GSM file."""

    def __init__(self, requested: float, available: Sequence[float]) -> None:
        """Initialize the frequency error.

        Args:
        ----
            requested: Requested frequency in Hz
            available: Frequencies present in the file, in Hz

        """
        self.requested = requested
        self.available = tuple(available)
        listing = ", ".join(f"{f:.6g}" for f in self.available)
        super().__init__(
            f"Frequency {requested:.6g} Hz not in GSM file; "
            f"available: [{listing}]"
        )
