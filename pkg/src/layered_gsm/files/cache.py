"""Interaction-matrix cache keyed by configuration fingerprint.

Entries live in a bounded least-recently-used memory map and, when a
directory is configured, on disk as brotli-compressed ``.npz`` archives.
A disk entry that cannot be decoded is treated as a miss.
"""

import io
import logging
import os
import threading
from collections import OrderedDict
from pathlib import Path

import brotli
import numpy as np

from layered_gsm.solver.exceptions import ValidationError
from layered_gsm.solver.models import SvwfBasis
from layered_gsm.solver.wmatrix import WMatrix

logger = logging.getLogger(__name__)

CACHE_SUFFIX = ".wmat.br"
DEFAULT_QUALITY = 5
DEFAULT_MAX_ENTRIES = 64


class WMatrixCache:
    """Two-level cache of assembled interaction matrices."""

    def __init__(
        self,
        directory: Path | None = None,
        quality: int = DEFAULT_QUALITY,
        max_entries: int = DEFAULT_MAX_ENTRIES,
    ) -> None:
        """Initialize the cache.

        Args:
        ----
            directory: On-disk location; memory only when None.
            quality: Brotli quality level (0 to 11).
            max_entries: Matrices kept in memory; the least recently used
                one is evicted first.

        """
        if max_entries < 1:
            err = f"max_entries must be positive, got {max_entries}"
            raise ValidationError(err)
        self.directory: Path | None = directory
        self.quality: int = quality
        self.hits: int = 0
        self.misses: int = 0
        self.max_entries: int = max_entries
        self._memory: OrderedDict[str, WMatrix] = OrderedDict()
        self._lock: threading.Lock = threading.Lock()
        if directory is not None:
            directory.mkdir(parents=True, exist_ok=True)

    def __len__(self) -> int:
        """Number of matrices held in memory."""
        return len(self._memory)

    def _path(self, fingerprint: str) -> Path | None:
        if self.directory is None:
            return None
        return self.directory / f"{fingerprint}{CACHE_SUFFIX}"

    def get(self, fingerprint: str, basis: SvwfBasis) -> WMatrix | None:
        """Cached matrix for ``fingerprint``, or None on a miss."""
        with self._lock:
            cached = self._memory.get(fingerprint)
            if cached is not None:
                self._memory.move_to_end(fingerprint)
        if cached is None:
            cached = self._load(fingerprint, basis)
            if cached is not None:
                self._remember(fingerprint, cached)
        with self._lock:
            if cached is None:
                self.misses += 1
            else:
                self.hits += 1
        return cached

    def put(self, matrix: WMatrix, fingerprint: str | None = None) -> None:
        """Store ``matrix`` under ``fingerprint`` or its own fingerprint."""
        key = fingerprint or matrix.fingerprint
        self._remember(key, matrix)
        path = self._path(key)
        if path is None:
            return
        buffer = io.BytesIO()
        arrays = {f"m{m}": block for m, block in matrix.blocks.items()}
        np.savez(
            buffer,
            frequency=np.float64(matrix.frequency),
            l_max=np.int64(matrix.basis.l_max),
            **arrays,
        )
        payload = brotli.compress(buffer.getvalue(), quality=self.quality)
        partial = path.with_name(path.name + ".partial")
        _ = partial.write_bytes(payload)
        os.replace(partial, path)
        logger.debug(
            "Cached interaction matrix %s (%d bytes)",
            key,
            len(payload),
        )

    def _remember(self, key: str, matrix: WMatrix) -> None:
        with self._lock:
            self._memory[key] = matrix
            self._memory.move_to_end(key)
            while len(self._memory) > self.max_entries:
                evicted, _ = self._memory.popitem(last=False)
                logger.debug("Evicted interaction matrix %s", evicted)

    def _load(self, fingerprint: str, basis: SvwfBasis) -> WMatrix | None:
        path = self._path(fingerprint)
        if path is None or not path.exists():
            return None
        try:
            raw = brotli.decompress(path.read_bytes())
            with np.load(io.BytesIO(raw), allow_pickle=False) as archive:
                if int(archive["l_max"]) != basis.l_max:
                    logger.warning(
                        "Cache entry %s has l_max=%d, expected %d; ignoring",
                        fingerprint,
                        int(archive["l_max"]),
                        basis.l_max,
                    )
                    return None
                blocks = {
                    m: np.asarray(archive[f"m{m}"], dtype=np.complex128)
                    for m in basis.m_groups
                }
                frequency = float(archive["frequency"])
            return WMatrix(basis, blocks, frequency, fingerprint)
        except (brotli.error, OSError, KeyError, ValueError) as e:
            logger.warning(
                "Discarding unreadable cache entry %s: %s", path.name, e
            )
            return None
