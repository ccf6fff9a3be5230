"""Generalized scattering matrix of an antenna at one frequency."""

from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from layered_gsm.solver.exceptions import ValidationError
from layered_gsm.solver.models.basis import SvwfBasis


@dataclass(frozen=True, eq=False)
class GsmBlocks:
    """Blocks ``[gamma, R; T, S]`` relating port and spherical-wave amplitudes.

    Attributes
    ----------
        gamma: Port reflection matrix, ``e x e``.
        r_block: Receiving block, ``e x j``.
        t_block: Transmitting block, ``j x e``.
        s_block: Scattering block, ``j x j``.
        frequency: Frequency in Hz.
        basis: SVWF basis the spherical blocks are expressed in.
        port_labels: One mode name per port.

    """

    gamma: npt.NDArray[np.complex128]
    r_block: npt.NDArray[np.complex128]
    t_block: npt.NDArray[np.complex128]
    s_block: npt.NDArray[np.complex128]
    frequency: float
    basis: SvwfBasis
    port_labels: tuple[str, ...]

    def __post_init__(self) -> None:
        """Coerce the blocks to complex arrays and check their dimensions."""
        for name in ("gamma", "r_block", "t_block", "s_block"):
            block = np.asarray(getattr(self, name), dtype=np.complex128)
            if not np.all(np.isfinite(block)):
                err = f"GSM block {name} contains non-finite entries"
                raise ValidationError(err)
            object.__setattr__(self, name, block)
        object.__setattr__(self, "port_labels", tuple(self.port_labels))
        e = len(self.port_labels)
        j = self.basis.size
        expected = {
            "gamma": (e, e),
            "r_block": (e, j),
            "t_block": (j, e),
            "s_block": (j, j),
        }
        for name, shape in expected.items():
            actual = getattr(self, name).shape
            if actual != shape:
                err = (
                    f"GSM block {name} has shape {actual}, expected {shape} "
                    f"for e={e}, j={j}"
                )
                raise ValidationError(err)
        if not (np.isfinite(self.frequency) and self.frequency > 0):
            err = f"Frequency must be positive, got {self.frequency}"
            raise ValidationError(err)

    @property
    def port_count(self) -> int:
        """Number of feed ports ``e``."""
        return len(self.port_labels)

    def permuted(self, basis: SvwfBasis) -> "GsmBlocks":
        """Re-express the spherical blocks in a reordered basis."""
        order = basis.permutation_from(self.basis)
        return GsmBlocks(
            gamma=self.gamma,
            r_block=self.r_block[:, order],
            t_block=self.t_block[order, :],
            s_block=self.s_block[np.ix_(order, order)],
            frequency=self.frequency,
            basis=basis,
            port_labels=self.port_labels,
        )
