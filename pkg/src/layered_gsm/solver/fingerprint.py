"""Fingerprints tying cached results to the configuration that produced them."""

from __future__ import annotations

import abc
import hashlib
import json
from typing import TYPE_CHECKING

from typing_extensions import override

if TYPE_CHECKING:
    from layered_gsm.solver.models import ContourSpec, LayerStack, SvwfBasis

__all__ = [
    "FingerprintProvider",
    "Sha256FingerprintProvider",
    "configuration_payload",
]

FINGERPRINT_LENGTH = 32


class FingerprintProvider(abc.ABC):
    """Abstract base class defining the contract for fingerprint generation.

    Implementations turn a plain-data description of a computation into a
    short string. Two descriptions map to the same fingerprint exactly when
    the computation would produce the same numbers.
    """

    @abc.abstractmethod
    def fingerprint(self, payload: dict[str, object]) -> str:
        """Generate a fingerprint for the given payload.

        Args:
        ----
            payload: JSON-serialisable description of the computation.

        Returns:
        -------
            A string identifying the payload.

        Raises:
        ------
            ValueError: If the payload cannot be serialised.

        """
        raise NotImplementedError


class Sha256FingerprintProvider(FingerprintProvider):
    """Hashes the canonical JSON form of the payload with SHA-256.

    Keys are sorted and floats are written with ``repr`` precision, so
    payloads that compare equal always hash equal.
    """

    @override
    def fingerprint(self, payload: dict[str, object]) -> str:
        try:
            text = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        except (TypeError, ValueError) as e:
            error_msg = f"Failed to fingerprint payload: {e}"
            raise ValueError(error_msg) from e
        return hashlib.sha256(text.encode("utf-8")).hexdigest()[
            :FINGERPRINT_LENGTH
        ]


def configuration_payload(
    stack: LayerStack,
    frequency: float,
    basis: SvwfBasis,
    contour: ContourSpec,
) -> dict[str, object]:
    """Plain-data description of one interaction-matrix computation."""
    canonical = basis.indices == type(basis).canonical(basis.l_max).indices
    return {
        "stack": stack.as_dict(),
        "frequency": float(frequency),
        "l_max": basis.l_max,
        "ordering": "canonical"
        if canonical
        else [
            [int(n.tau), int(n.sigma), n.m, n.l] for n in basis.indices
        ],
        "contour": contour.as_dict(),
    }
