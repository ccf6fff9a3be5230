"""GSM file format and synthetic antenna GSMs.

A GSM file is a single line of JSON describing the contents, a newline, and a
binary payload of little-endian ``complex128`` values. For each frequency the
payload holds ``Gamma (e x e)``, ``R (e x j)``, ``T (j x e)`` and
``S (j x j)`` in row-major order. The header records the payload length and
its SHA-256 digest, so truncated or corrupted files are always detected::

    {"format": "layered-gsm", "version": 1, "antenna": "horn",
     "r_min": 0.146, "l_max": 17, "ports": ["TE10"],
     "frequencies": [3.5e9],
     "payload": {"dtype": "<c16", "length": 6702336, "sha256": "..."}}
"""

import enum
import hashlib
import json
import logging
import os
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import cast

import numpy as np
import numpy.typing as npt

from layered_gsm.solver.consts import C0, MAX_SYNTHESIS_ATTEMPTS
from layered_gsm.solver.exceptions import (
    ChecksumError,
    DimensionMismatchError,
    FrequencyNotFoundError,
    SchemaError,
    SynthesisError,
    ValidationError,
)
from layered_gsm.solver.models import (
    GsmBlocks,
    Parity,
    Polarization,
    SvwfBasis,
    SvwfIndex,
)
from layered_gsm.solver.wmatrix import WMatrix, lmax_rule

logger = logging.getLogger(__name__)

ComplexArray = npt.NDArray[np.complex128]

FORMAT_NAME = "layered-gsm"
FORMAT_VERSION = 1
PAYLOAD_DTYPE = np.dtype("<c16")

_HEADER_KEYS = frozenset(
    {
        "format",
        "version",
        "antenna",
        "r_min",
        "l_max",
        "ports",
        "frequencies",
        "payload",
    }
)
_PAYLOAD_KEYS = frozenset({"dtype", "length", "sha256"})
_FREQUENCY_RTOL = 1e-9

HORN_PORTS = ("TE10", "TE20", "TE01", "TE11", "TM11")
HORN_R_MIN = 0.146


@dataclass(frozen=True, eq=False)
class GsmFile:
    """Free-space GSM of one antenna over a list of frequencies.

    Attributes
    ----------
        antenna: Free-form antenna name.
        r_min: Radius of the minimum sphere enclosing the antenna, m.
        l_max: Degree truncation of every GSM in the file.
        port_labels: Mode name of each feed port.
        entries: GSM blocks per frequency, strictly increasing in frequency.

    """

    antenna: str
    r_min: float
    l_max: int
    port_labels: tuple[str, ...]
    entries: tuple[GsmBlocks, ...] = field(default=())

    def __post_init__(self) -> None:
        """Check every entry against the header fields."""
        object.__setattr__(self, "port_labels", tuple(self.port_labels))
        object.__setattr__(self, "entries", tuple(self.entries))
        if not (np.isfinite(self.r_min) and self.r_min > 0):
            err = f"r_min must be positive, got {self.r_min}"
            raise ValidationError(err)
        if not self.entries:
            err = "A GSM file needs at least one frequency"
            raise ValidationError(err)
        for entry in self.entries:
            if entry.basis.l_max != self.l_max:
                err = (
                    f"Entry at {entry.frequency:.6g} Hz has l_max "
                    f"{entry.basis.l_max}, header declares {self.l_max}"
                )
                raise ValidationError(err)
            if entry.port_labels != self.port_labels:
                err = f"Entry at {entry.frequency:.6g} Hz has other ports"
                raise ValidationError(err)
        frequencies = self.frequencies
        if any(b <= a for a, b in zip(frequencies, frequencies[1:])):
            err = "Frequencies must be strictly increasing"
            raise ValidationError(err)

    @property
    def frequencies(self) -> tuple[float, ...]:
        """Frequencies in Hz."""
        return tuple(entry.frequency for entry in self.entries)

    @property
    def port_count(self) -> int:
        """Number of feed ports."""
        return len(self.port_labels)

    def at(self, frequency: float) -> GsmBlocks:
        """GSM at ``frequency``; no interpolation is performed.

        Raises
        ------
            FrequencyNotFoundError: If the frequency is not in the file.

        """
        for entry in self.entries:
            if np.isclose(entry.frequency, frequency, rtol=_FREQUENCY_RTOL):
                return entry
        raise FrequencyNotFoundError(frequency, self.frequencies)


def _block_shapes(e: int, j: int) -> tuple[tuple[int, int], ...]:
    return ((e, e), (e, j), (j, e), (j, j))


def _encode_payload(gsm: GsmFile) -> bytes:
    chunks = [
        np.ascontiguousarray(block, dtype=PAYLOAD_DTYPE).tobytes()
        for entry in gsm.entries
        for block in (entry.gamma, entry.r_block, entry.t_block, entry.s_block)
    ]
    return b"".join(chunks)


def write_gsm(gsm: GsmFile, path: Path | str) -> None:
    """Write ``gsm`` to ``path``.

    The file is written next to its destination and moved into place, so
    readers never observe a partial file.
    """
    target = Path(path)
    payload = _encode_payload(gsm)
    header = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "antenna": gsm.antenna,
        "r_min": gsm.r_min,
        "l_max": gsm.l_max,
        "ports": list(gsm.port_labels),
        "frequencies": list(gsm.frequencies),
        "payload": {
            "dtype": PAYLOAD_DTYPE.str,
            "length": len(payload),
            "sha256": hashlib.sha256(payload).hexdigest(),
        },
    }
    line = json.dumps(header, separators=(",", ":")).encode("utf-8")
    partial = target.with_name(target.name + ".partial")
    try:
        with partial.open("wb") as handle:
            _ = handle.write(line + b"\n")
            _ = handle.write(payload)
        os.replace(partial, target)
    finally:
        partial.unlink(missing_ok=True)
    logger.info(
        "Wrote GSM %s (%d frequencies, l_max=%d, e=%d) to %s",
        gsm.antenna,
        len(gsm.entries),
        gsm.l_max,
        gsm.port_count,
        target,
    )


@dataclass(frozen=True)
class _Header:
    antenna: str
    r_min: float
    l_max: int
    ports: tuple[str, ...]
    frequencies: tuple[float, ...]
    payload_length: int
    payload_sha256: str


def _field(
    mapping: Mapping[str, object],
    key: str,
    kind: type | tuple[type, ...],
    prefix: str,
) -> object:
    if key not in mapping:
        raise SchemaError(f"{prefix}.{key}", "missing")
    value = mapping[key]
    if isinstance(value, bool) or not isinstance(value, kind):
        raise SchemaError(f"{prefix}.{key}", f"unexpected value {value!r}")
    return value


def _text(mapping: Mapping[str, object], key: str, prefix: str) -> str:
    return cast("str", _field(mapping, key, str, prefix))


def _integer(mapping: Mapping[str, object], key: str, prefix: str) -> int:
    return cast("int", _field(mapping, key, int, prefix))


def _number(mapping: Mapping[str, object], key: str, prefix: str) -> float:
    return float(cast("float", _field(mapping, key, (int, float), prefix)))


def _items(
    mapping: Mapping[str, object], key: str, prefix: str
) -> list[object]:
    return cast("list[object]", _field(mapping, key, list, prefix))


def _check_keys(
    mapping: Mapping[str, object], allowed: frozenset[str], prefix: str
) -> None:
    unknown = sorted(set(mapping) - allowed)
    if unknown:
        raise SchemaError(f"{prefix}.{unknown[0]}", "unknown key")


def _parse_header(raw: bytes) -> _Header:
    try:
        header = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise SchemaError("header", f"not valid JSON ({e})") from e
    if not isinstance(header, dict):
        raise SchemaError("header", "expected an object")
    _check_keys(header, _HEADER_KEYS, "header")
    if _text(header, "format", "header") != FORMAT_NAME:
        raise SchemaError("header.format", f"expected {FORMAT_NAME!r}")
    if _integer(header, "version", "header") != FORMAT_VERSION:
        raise SchemaError("header.version", "unsupported version")

    ports: list[str] = []
    for position, label in enumerate(_items(header, "ports", "header")):
        if not isinstance(label, str):
            raise SchemaError(f"header.ports[{position}]", "expected a string")
        ports.append(label)
    frequencies: list[float] = []
    for position, value in enumerate(_items(header, "frequencies", "header")):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise SchemaError(
                f"header.frequencies[{position}]", "expected a number"
            )
        frequencies.append(float(value))
    if not frequencies:
        raise SchemaError("header.frequencies", "must not be empty")

    payload = cast(
        "dict[str, object]", _field(header, "payload", dict, "header")
    )
    _check_keys(payload, _PAYLOAD_KEYS, "header.payload")
    if _text(payload, "dtype", "header.payload") != PAYLOAD_DTYPE.str:
        raise SchemaError("header.payload.dtype", "unsupported dtype")
    return _Header(
        antenna=_text(header, "antenna", "header"),
        r_min=_number(header, "r_min", "header"),
        l_max=_integer(header, "l_max", "header"),
        ports=tuple(ports),
        frequencies=tuple(frequencies),
        payload_length=_integer(payload, "length", "header.payload"),
        payload_sha256=_text(payload, "sha256", "header.payload"),
    )


def read_gsm(path: Path | str) -> GsmFile:
    """Read a GSM file.

    Raises
    ------
        SchemaError: If the header is malformed, with the offending field.
        ChecksumError: If the payload is truncated or corrupted.
        DimensionMismatchError: If an intact payload does not fit the
            declared ports, degree and frequencies.
        ValidationError: If the decoded blocks are inconsistent.

    """
    data = Path(path).read_bytes()
    head, separator, payload = data.partition(b"\n")
    if not separator:
        raise SchemaError("header", "missing header terminator")
    header = _parse_header(head)
    if len(payload) != header.payload_length:
        err = (
            f"Payload has {len(payload)} bytes, header declares "
            f"{header.payload_length}"
        )
        raise ChecksumError(err)
    if hashlib.sha256(payload).hexdigest() != header.payload_sha256:
        err = "Payload SHA-256 does not match the header"
        raise ChecksumError(err)

    try:
        basis = SvwfBasis.canonical(header.l_max)
    except ValidationError as e:
        raise SchemaError("header.l_max", str(e)) from e
    shapes = _block_shapes(len(header.ports), basis.size)
    per_frequency = sum(rows * cols for rows, cols in shapes)
    values = np.frombuffer(payload, dtype=PAYLOAD_DTYPE)
    expected = per_frequency * len(header.frequencies)
    if values.size != expected:
        raise DimensionMismatchError(values.size, expected)

    entries: list[GsmBlocks] = []
    offset = 0
    for frequency in header.frequencies:
        blocks: list[ComplexArray] = []
        for rows, cols in shapes:
            count = rows * cols
            chunk = values[offset : offset + count]
            blocks.append(chunk.reshape(rows, cols).astype(np.complex128))
            offset += count
        gamma, r_block, t_block, s_block = blocks
        entries.append(
            GsmBlocks(
                gamma=gamma,
                r_block=r_block,
                t_block=t_block,
                s_block=s_block,
                frequency=frequency,
                basis=basis,
                port_labels=header.ports,
            )
        )
    return GsmFile(
        antenna=header.antenna,
        r_min=header.r_min,
        l_max=header.l_max,
        port_labels=header.ports,
        entries=tuple(entries),
    )


class SyntheticKind(enum.Enum):
    """Generators standing in for a measured or simulated GSM."""

    SINGLE_MODE_RADIATOR = "single_mode_radiator"
    DIAGONAL_SCATTERER = "diagonal_scatterer"
    RANDOM_PASSIVE = "random_passive"


DEFAULT_EXCITED = SvwfIndex(Polarization.TM, Parity.EVEN, 0, 1)


@dataclass(frozen=True)
class SyntheticGsmSpec:
    """Parameters of a synthetic GSM.

    Attributes
    ----------
        kind: Generator to use.
        excited: SVWF radiated by the single port of the radiator kinds.
        amplitude: Transmitting coefficient of the excited SVWF.
        port_reflection: Free-space port reflection of the radiator kinds.
        scattering: Diagonal of ``S`` per ``(tau, l)`` for
            ``DIAGONAL_SCATTERER``; missing pairs scatter like identity.
        seed: Random seed for ``RANDOM_PASSIVE``.
        radius_bound: Upper bound for the norm of ``1/2 (S - 1) W``.
        interaction_norm: Assumed bound on the 2-norm of ``W`` when no
            interaction matrix is supplied.
        port_labels: Port names for ``RANDOM_PASSIVE``; radiator kinds have
            one port.

    """

    kind: SyntheticKind = SyntheticKind.SINGLE_MODE_RADIATOR
    excited: SvwfIndex = DEFAULT_EXCITED
    amplitude: complex = 1.0
    port_reflection: complex = 0.0
    scattering: Mapping[tuple[int, int], complex] = field(default_factory=dict)
    seed: int = 0
    radius_bound: float = 0.5
    interaction_norm: float = 1.0
    port_labels: tuple[str, ...] = ("P1",)

    def __post_init__(self) -> None:
        """Validate the generator parameters."""
        object.__setattr__(self, "kind", SyntheticKind(self.kind))
        object.__setattr__(self, "port_labels", tuple(self.port_labels))
        if not 0.0 < self.radius_bound < 1.0:
            err = f"radius_bound must be in (0, 1), got {self.radius_bound}"
            raise ValidationError(err)
        if not self.interaction_norm > 0.0:
            err = "interaction_norm must be positive"
            raise ValidationError(err)
        if not self.port_labels:
            err = "At least one port label is required"
            raise ValidationError(err)


def _radiator(
    spec: SyntheticGsmSpec,
    basis: SvwfBasis,
    frequency: float,
) -> GsmBlocks:
    j = basis.size
    t_block = np.zeros((j, 1), dtype=np.complex128)
    t_block[basis.position(spec.excited), 0] = spec.amplitude
    s_block = np.eye(j, dtype=np.complex128)
    if spec.kind is SyntheticKind.DIAGONAL_SCATTERER:
        diagonal = [
            spec.scattering.get((int(n.tau), n.l), 1.0) for n in basis.indices
        ]
        s_block = np.diag(np.asarray(diagonal, dtype=np.complex128))
    return GsmBlocks(
        gamma=np.full((1, 1), spec.port_reflection, dtype=np.complex128),
        r_block=t_block.T.copy(),
        t_block=t_block,
        s_block=s_block,
        frequency=frequency,
        basis=basis,
        port_labels=spec.port_labels[:1],
    )


def _interaction_norm(w: WMatrix) -> float:
    return max(
        float(np.linalg.norm(block, 2)) if block.size else 0.0
        for block in w.blocks.values()
    )


def _complex_normal(
    rng: np.random.Generator, shape: tuple[int, ...]
) -> ComplexArray:
    return (rng.normal(size=shape) + 1j * rng.normal(size=shape)) / np.sqrt(2)


def _random_passive(
    spec: SyntheticGsmSpec,
    basis: SvwfBasis,
    frequency: float,
    w: WMatrix | None,
) -> GsmBlocks:
    j = basis.size
    e = len(spec.port_labels)
    norm = _interaction_norm(w) if w is not None else 0.0
    if norm == 0.0:
        norm = spec.interaction_norm
    limit = spec.radius_bound * (1.0 + 1e-9)
    rng = np.random.default_rng(spec.seed)
    for attempt in range(1, MAX_SYNTHESIS_ATTEMPTS + 1):
        unitary, _ = np.linalg.qr(_complex_normal(rng, (j, j)))
        magnitudes = rng.uniform(0.0, 1.0, size=j)
        magnitudes /= magnitudes.max()
        phases = np.exp(2j * np.pi * rng.uniform(size=j))
        # Normal offset with 2-norm 2 * bound / norm.
        eigen = magnitudes * phases * (2.0 * spec.radius_bound / norm)
        offset = (unitary * eigen) @ unitary.conj().T
        s_block = np.eye(j, dtype=np.complex128) + offset
        blocks = GsmBlocks(
            gamma=0.1 * _complex_normal(rng, (e, e)),
            r_block=_complex_normal(rng, (e, j)) / np.sqrt(j),
            t_block=_complex_normal(rng, (j, e)) / np.sqrt(j),
            s_block=s_block,
            frequency=frequency,
            basis=basis,
            port_labels=spec.port_labels,
        )
        if w is None:
            return blocks
        loop = 0.5 * w.right_product(offset)
        radius = float(np.max(np.abs(np.linalg.eigvals(loop))))
        if radius <= limit:
            logger.debug(
                "Synthetic GSM accepted on attempt %d (radius %.3f)",
                attempt,
                radius,
            )
            return blocks
        logger.debug("Synthetic GSM attempt %d radius %.3f", attempt, radius)
    err = (
        f"No GSM within spectral radius {spec.radius_bound} after "
        f"{MAX_SYNTHESIS_ATTEMPTS} attempts"
    )
    raise SynthesisError(err)


def synthesize_gsm(
    spec: SyntheticGsmSpec,
    basis: SvwfBasis,
    frequency: float,
    *,
    w: WMatrix | None = None,
) -> GsmBlocks:
    """Generate a synthetic GSM in ``basis`` at ``frequency``.

    ``SINGLE_MODE_RADIATOR`` radiates one SVWF through one port with
    ``R = T^t`` and ``S = 1``. ``DIAGONAL_SCATTERER`` adds a diagonal ``S``.
    ``RANDOM_PASSIVE`` draws dense blocks whose feedback loop
    ``1/2 (S - 1) W`` has norm at most ``radius_bound``; with ``w`` given the
    loop's spectral radius is verified against ``w`` itself.

    Raises
    ------
        SynthesisError: If no draw meets the bound within 10 attempts.

    """
    if spec.kind is SyntheticKind.RANDOM_PASSIVE:
        return _random_passive(spec, basis, frequency, w)
    return _radiator(spec, basis, frequency)


def synthesize_file(
    spec: SyntheticGsmSpec,
    l_max: int,
    frequencies: Sequence[float],
    *,
    r_min: float,
    antenna: str = "synthetic",
) -> GsmFile:
    """Synthetic GSM file over ``frequencies``.

    Random draws use ``seed + position`` so each frequency differs.
    """
    basis = SvwfBasis.canonical(l_max)
    entries = []
    for position, frequency in enumerate(sorted(frequencies)):
        point_spec = spec
        if spec.kind is SyntheticKind.RANDOM_PASSIVE:
            point_spec = replace(spec, seed=spec.seed + position)
        entries.append(synthesize_gsm(point_spec, basis, frequency))
    labels = entries[0].port_labels
    return GsmFile(antenna, r_min, l_max, labels, tuple(entries))


def horn_preset(
    frequencies: Sequence[float] | None = None,
    *,
    seed: int = 0,
    l_max: int | None = None,
) -> GsmFile:
    """Five-port horn-like GSM with ``R_min = 146 mm`` over 3.2-3.8 GHz.

    The degree follows the circumscribing-sphere rule at the highest
    frequency unless ``l_max`` is given.
    """
    band = (
        list(frequencies)
        if frequencies is not None
        else list(np.linspace(3.2e9, 3.8e9, 7))
    )
    if l_max is None:
        k_high = 2.0 * np.pi * max(band) / C0
        l_max = lmax_rule(k_high * HORN_R_MIN)
    spec = SyntheticGsmSpec(
        kind=SyntheticKind.RANDOM_PASSIVE,
        seed=seed,
        port_labels=HORN_PORTS,
    )
    return synthesize_file(
        spec, l_max, band, r_min=HORN_R_MIN, antenna="horn"
    )
