"""Result tables: CSV through pandas and Touchstone through scikit-rf.

The CSV layout has one row per sweep point and port pair::

    <swept parameters...>, frequency, port_i, port_j, re, im, db, phase_deg
"""

import logging
from collections.abc import Sequence
from pathlib import Path
from typing import TYPE_CHECKING

import numpy as np
import pandas as pd
import skrf as rf

from layered_gsm.solver.exceptions import SchemaError, ValidationError

if TYPE_CHECKING:
    from layered_gsm.sweep.results import SweepPoint

logger = logging.getLogger(__name__)

RESULT_COLUMNS = (
    "frequency",
    "port_i",
    "port_j",
    "re",
    "im",
    "db",
    "phase_deg",
)
_REQUIRED_OBSERVED = ("frequency", "port_i", "port_j", "re", "im")


def results_frame(
    points: Sequence["SweepPoint"], axes: Sequence[str] = ()
) -> pd.DataFrame:
    """Flatten sweep points into the result table."""
    rows: list[dict[str, object]] = []
    for point in points:
        size = point.composite.shape[0]
        for i in range(size):
            for j in range(size):
                value = complex(point.composite[i, j])
                magnitude = abs(value)
                row: dict[str, object] = {
                    name: point.parameters[name] for name in axes
                }
                row.update(
                    frequency=point.frequency,
                    port_i=point.port_labels[i],
                    port_j=point.port_labels[j],
                    re=value.real,
                    im=value.imag,
                    db=20.0 * np.log10(magnitude) if magnitude > 0 else -np.inf,
                    phase_deg=float(np.degrees(np.angle(value))),
                )
                rows.append(row)
    return pd.DataFrame(rows, columns=[*axes, *RESULT_COLUMNS])


def write_csv(
    points: Sequence["SweepPoint"], path: Path | str, axes: Sequence[str] = ()
) -> Path:
    """Write the result table as CSV."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    frame = results_frame(points, axes)
    frame.to_csv(target, index=False, float_format="%.12g")
    logger.info("Wrote %d row(s) to %s", len(frame), target)
    return target


def write_touchstone(
    points: Sequence["SweepPoint"], path: Path | str, axes: Sequence[str] = ()
) -> list[Path]:
    """Write one Touchstone file per combination of swept parameters.

    Without swept parameters a single file is written. Otherwise the stem
    gets a ``_<n>`` suffix numbering the combinations in sweep order.
    """
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    groups: dict[tuple[float, ...], list["SweepPoint"]] = {}
    for point in points:
        key = tuple(point.parameters[name] for name in axes)
        groups.setdefault(key, []).append(point)

    written: list[Path] = []
    for position, members in enumerate(groups.values()):
        ordered = sorted(members, key=lambda p: p.frequency)
        frequency = rf.Frequency.from_f(
            [p.frequency for p in ordered], unit="Hz"
        )
        network = rf.Network(
            frequency=frequency,
            s=np.stack([p.composite for p in ordered]),
            name=target.stem,
        )
        stem = target.stem if len(groups) == 1 else f"{target.stem}_{position}"
        network.write_touchstone(filename=stem, dir=str(target.parent))
        written.append(target.parent / f"{stem}.s{network.nports}p")
    logger.info(
        "Wrote %d Touchstone file(s) to %s", len(written), target.parent
    )
    return written


def read_observed(
    path: Path | str,
) -> dict[float, dict[tuple[str, str], complex]]:
    """Observed composite entries per frequency from a result CSV.

    Raises
    ------
        SchemaError: If a required column is missing.
        ValidationError: If the table has no rows or repeats an entry.

    """
    source = Path(path)
    frame = pd.read_csv(source)
    missing = [c for c in _REQUIRED_OBSERVED if c not in frame.columns]
    if missing:
        raise SchemaError(f"{source.name}.{missing[0]}", "missing column")
    if frame.empty:
        err = f"Observed table {source} has no rows"
        raise ValidationError(err)
    observed: dict[float, dict[tuple[str, str], complex]] = {}
    for row in frame.itertuples(index=False):
        frequency = float(row.frequency)
        key = (str(row.port_i), str(row.port_j))
        entries = observed.setdefault(frequency, {})
        if key in entries:
            err = f"Observed table repeats {key} at {frequency:.6g} Hz"
            raise ValidationError(err)
        entries[key] = complex(float(row.re), float(row.im))
    logger.debug(
        "Read %d observed frequency(ies) from %s", len(observed), source
    )
    return observed
