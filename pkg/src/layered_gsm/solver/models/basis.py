"""Spherical vector wave function indexing.

An index ``n = (tau, sigma, m, l)`` selects the polarization type (TE/TM),
the azimuthal parity (even/odd), the azimuthal order and the degree. The
canonical ordering iterates ``l = 1..L_max``, ``m = 0..l``, the parities
allowed for ``m`` and finally ``tau``. Odd functions with ``m = 0`` vanish
identically and are not part of the basis.
"""

import enum
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import numpy.typing as npt

from layered_gsm.solver.consts import MAX_LEGENDRE_DEGREE
from layered_gsm.solver.exceptions import ValidationError


class Polarization(enum.IntEnum):
    """SVWF polarization type ``tau``."""

    TE = 1
    TM = 2


class Parity(enum.IntEnum):
    """Azimuthal parity ``sigma``; even uses cos(m beta), odd sin(m beta)."""

    EVEN = 0
    ODD = 1


@dataclass(frozen=True, order=True)
class SvwfIndex:
    """Multi-index ``(tau, sigma, m, l)`` of a real-harmonic SVWF."""

    tau: Polarization
    sigma: Parity
    m: int
    l: int  # noqa: E741

    def __post_init__(self) -> None:
        """Validate and normalise the index fields."""
        object.__setattr__(self, "tau", Polarization(self.tau))
        object.__setattr__(self, "sigma", Parity(self.sigma))
        if self.l < 1 or not 0 <= self.m <= self.l:
            err = f"Invalid SVWF degree/order l={self.l}, m={self.m}"
            raise ValidationError(err)
        if self.m == 0 and self.sigma is Parity.ODD:
            err = "Odd parity with m=0 is a null function"
            raise ValidationError(err)

    @property
    def label(self) -> str:
        """Short human-readable label, e.g. ``TE e m=1 l=2``."""
        parity = "e" if self.sigma is Parity.EVEN else "o"
        return f"{self.tau.name} {parity} m={self.m} l={self.l}"


def canonical_indices(l_max: int) -> tuple[SvwfIndex, ...]:
    """All basis indices up to ``l_max`` in canonical order."""
    indices: list[SvwfIndex] = []
    for l in range(1, l_max + 1):  # noqa: E741
        for m in range(l + 1):
            parities = (Parity.EVEN,) if m == 0 else (Parity.EVEN, Parity.ODD)
            indices.extend(
                SvwfIndex(tau, sigma, m, l)
                for sigma in parities
                for tau in Polarization
            )
    return tuple(indices)


@dataclass(frozen=True)
class SvwfBasis:
    """Ordered SVWF basis truncated at degree ``l_max``.

    The default ordering is canonical; any permutation of the canonical set
    is accepted so that basis-ordering invariance can be exercised.
    """

    l_max: int
    indices: tuple[SvwfIndex, ...] = field(default=())

    def __post_init__(self) -> None:
        """Fill in the canonical ordering and validate the index set."""
        if not 1 <= self.l_max <= MAX_LEGENDRE_DEGREE:
            err = f"l_max must be in [1, {MAX_LEGENDRE_DEGREE}]"
            raise ValidationError(err)
        canonical = canonical_indices(self.l_max)
        if not self.indices:
            object.__setattr__(self, "indices", canonical)
        elif sorted(self.indices) != sorted(canonical):
            err = "Basis indices must be a permutation of the canonical set"
            raise ValidationError(err)

    @classmethod
    def canonical(cls, l_max: int) -> "SvwfBasis":
        """Build the canonically ordered basis."""
        return cls(l_max)

    @property
    def size(self) -> int:
        """Number of SVWFs ``j = 2 L_max (L_max + 2)``."""
        return len(self.indices)

    def __len__(self) -> int:
        """Return the basis size."""
        return self.size

    @cached_property
    def _positions(self) -> dict[SvwfIndex, int]:
        return {index: pos for pos, index in enumerate(self.indices)}

    def position(self, index: SvwfIndex) -> int:
        """Linear position of ``index`` in this basis."""
        try:
            return self._positions[index]
        except KeyError as e:
            err = f"{index.label} is not in the basis (l_max={self.l_max})"
            raise ValidationError(err) from e

    @cached_property
    def m_groups(self) -> dict[int, npt.NDArray[np.intp]]:
        """Positions sharing each azimuthal order, in basis order."""
        groups: dict[int, list[int]] = {}
        for pos, index in enumerate(self.indices):
            groups.setdefault(index.m, []).append(pos)
        return {
            m: np.asarray(groups[m], dtype=np.intp) for m in sorted(groups)
        }

    def permutation_from(self, other: "SvwfBasis") -> npt.NDArray[np.intp]:
        """Positions in ``other`` of each index of this basis."""
        if other.l_max != self.l_max:
            err = "Bases with different l_max cannot be permuted"
            raise ValidationError(err)
        return np.asarray(
            [other.position(index) for index in self.indices], dtype=np.intp
        )
