"""Options object for the forward computation."""

from dataclasses import dataclass
from pathlib import Path

from layered_gsm.solver.consts import (
    DEFAULT_IOTA,
    DEFAULT_QUAD_ORDER,
    LEGENDRE_OVERFLOW_CAP,
)
from layered_gsm.solver.fingerprint import (
    FingerprintProvider,
    Sha256FingerprintProvider,
)
from layered_gsm.solver.models import ContourOrientation


@dataclass
class ComputeOptions:
    """Options for configuring how interaction matrices are built and reused.

    Attributes
    ----------
        l_max: Degree truncation of the SVWF basis. When None, the degree is
            derived from ``k R_min`` with the circumscribing-sphere rule.
            Defaults to None.
        kappa: Truncation point of the evanescent contour segment. When None,
            it is derived from ``l_max``, ``k R_min`` and ``iota``.
            Defaults to None.
        iota: Accuracy parameter of the truncation rule. Defaults to 0.55.
        quad_order_evanescent: Gauss-Legendre points on the evanescent
            segment. Defaults to 33.
        quad_order_propagating: Gauss-Legendre points on the propagating
            segment. Defaults to 33.
        orientation: Contour traversal. Anything but STANDARD is only useful
            as a negative control. Defaults to STANDARD.
        overflow_cap: Largest magnitude tolerated inside the Legendre
            recurrences. Defaults to 1e280.
        cache_dir: Directory of the on-disk interaction-matrix cache. When
            None, only the in-memory cache is used. Defaults to None.
        cache_entries: Interaction matrices the in-memory cache holds
            before evicting the least recently used. Defaults to 64.
        num_workers: Number of sweep points evaluated concurrently.
            Defaults to 4.
        fingerprint_provider: Class that fingerprints configurations for the
            caches. Defaults to Sha256FingerprintProvider.

    """

    l_max: int | None = None
    kappa: float | None = None
    iota: float = DEFAULT_IOTA
    quad_order_evanescent: int = DEFAULT_QUAD_ORDER
    quad_order_propagating: int = DEFAULT_QUAD_ORDER
    orientation: ContourOrientation = ContourOrientation.STANDARD
    overflow_cap: float = LEGENDRE_OVERFLOW_CAP
    cache_dir: Path | None = None
    cache_entries: int = 64
    num_workers: int = 4
    fingerprint_provider: type[FingerprintProvider] = Sha256FingerprintProvider
