"""Result records shared by the sweep runner and the result writers."""

from dataclasses import dataclass, field

import numpy as np
import numpy.typing as npt

ComplexArray = npt.NDArray[np.complex128]


@dataclass(frozen=True, eq=False)
class SweepPoint:
    """Composite port response at one sweep point.

    Attributes
    ----------
        index: Position of the point in the sweep order.
        parameters: Value of each swept stack parameter.
        frequency: Frequency in Hz.
        composite: Composite ``e x e`` port matrix.
        port_labels: Port names.
        fingerprint: Interaction-matrix configuration fingerprint.
        w_seconds: Time spent obtaining the interaction matrix.
        solve_seconds: Time spent in the feedback solve.
        cache_hit: Whether the interaction matrix came from the cache.

    """

    index: int
    parameters: dict[str, float]
    frequency: float
    composite: ComplexArray = field(repr=False)
    port_labels: tuple[str, ...]
    fingerprint: str = ""
    w_seconds: float = 0.0
    solve_seconds: float = 0.0
    cache_hit: bool = False


@dataclass(frozen=True)
class TimingReport:
    """Wall-clock split between matrix assembly and feedback solves."""

    points: int
    assembled: int
    cache_hits: int
    w_seconds: float
    solve_seconds: float
    total_seconds: float

    def summary(self) -> str:
        """One-line human-readable summary."""
        return (
            f"{self.points} point(s): {self.assembled} matrix assembly(ies), "
            f"{self.cache_hits} cache hit(s), W {self.w_seconds:.3f} s, "
            f"solve {self.solve_seconds:.3f} s, "
            f"total {self.total_seconds:.3f} s"
        )


@dataclass(frozen=True)
class SweepResult:
    """All sweep points in sweep order plus the timing report."""

    points: tuple[SweepPoint, ...]
    timing: TimingReport
    axes: tuple[str, ...] = ()
