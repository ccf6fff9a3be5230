"""Planar layered medium below the antenna."""

import enum
from dataclasses import dataclass, field

import numpy as np

from layered_gsm.solver.consts import EPS0, MU0
from layered_gsm.solver.exceptions import ValidationError


class Termination(enum.Enum):
    """Ideal conductor terminations of a stack."""

    PEC = "pec"
    PMC = "pmc"


@dataclass(frozen=True)
class Layer:
    """Homogeneous isotropic medium.

    Attributes
    ----------
        eps_r: Relative permittivity, at least 1.
        sigma: Conductivity in S/m, non-negative.
        mu_r: Relative permeability, positive.
        thickness: Thickness in m; ``None`` for a half-space.

    """

    eps_r: float = 1.0
    sigma: float = 0.0
    mu_r: float = 1.0
    thickness: float | None = None

    def __post_init__(self) -> None:
        """Validate the material parameters."""
        if not (np.isfinite(self.eps_r) and self.eps_r >= 1.0):
            err = f"eps_r must be finite and >= 1, got {self.eps_r}"
            raise ValidationError(err)
        if not (np.isfinite(self.sigma) and self.sigma >= 0.0):
            err = f"sigma must be finite and >= 0, got {self.sigma}"
            raise ValidationError(err)
        if not (np.isfinite(self.mu_r) and self.mu_r > 0.0):
            err = f"mu_r must be finite and > 0, got {self.mu_r}"
            raise ValidationError(err)
        if self.thickness is not None and not (
            np.isfinite(self.thickness) and self.thickness > 0.0
        ):
            err = f"thickness must be finite and > 0, got {self.thickness}"
            raise ValidationError(err)

    def permittivity(self, omega: float) -> complex:
        """Complex permittivity ``eps_r eps0 - j sigma / omega``."""
        return complex(self.eps_r * EPS0, -self.sigma / omega)

    def permeability(self) -> float:
        """Absolute permeability."""
        return self.mu_r * MU0

    def wavenumber_squared(self, omega: float) -> complex:
        """Square of the medium wavenumber ``omega^2 mu eps``."""
        return omega * omega * self.permeability() * self.permittivity(omega)

    def as_dict(self) -> dict[str, float | None]:
        """Plain-data view used for fingerprints and configs."""
        return {
            "eps_r": self.eps_r,
            "sigma": self.sigma,
            "mu_r": self.mu_r,
            "thickness": self.thickness,
        }


VACUUM = Layer()


@dataclass(frozen=True)
class LayerStack:
    """Top medium, interior layers and termination below ``z = z_I``.

    Attributes
    ----------
        z_interface: Height of the top interface in antenna coordinates, m.
            Must be negative.
        layers: Interior layers from top to bottom, each with a thickness.
        termination: Half-space medium, or an ideal conductor.
        top: Medium containing the antenna; vacuum by default.

    """

    z_interface: float
    layers: tuple[Layer, ...] = ()
    termination: Layer | Termination = field(default=VACUUM)
    top: Layer = field(default=VACUUM)

    def __post_init__(self) -> None:
        """Validate the stack geometry."""
        object.__setattr__(self, "layers", tuple(self.layers))
        if not (np.isfinite(self.z_interface) and self.z_interface < 0.0):
            err = f"z_interface must be negative, got {self.z_interface}"
            raise ValidationError(err)
        if self.top.thickness is not None:
            err = "Top medium is a half-space and takes no thickness"
            raise ValidationError(err)
        for position, layer in enumerate(self.layers):
            if layer.thickness is None:
                err = f"Interior layer {position} needs a thickness"
                raise ValidationError(err)
        if (
            isinstance(self.termination, Layer)
            and self.termination.thickness is not None
        ):
            err = "Terminating half-space takes no thickness"
            raise ValidationError(err)

    @property
    def media(self) -> tuple[Layer | Termination, ...]:
        """Media from the top half-space down to the termination."""
        return (self.top, *self.layers, self.termination)

    @property
    def interface_count(self) -> int:
        """Number of interfaces between consecutive media."""
        return len(self.layers) + 1

    def as_dict(self) -> dict[str, object]:
        """Plain-data view used for fingerprints and configs."""
        termination: object
        if isinstance(self.termination, Termination):
            termination = self.termination.value
        else:
            termination = self.termination.as_dict()
        return {
            "z_interface": self.z_interface,
            "top": self.top.as_dict(),
            "layers": [layer.as_dict() for layer in self.layers],
            "termination": termination,
        }
