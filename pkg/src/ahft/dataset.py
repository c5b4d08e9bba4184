"""Performance-shaping-factor (PSF) observation records and preprocessing.

The package works on small tabular datasets: one row per observed work
instance, one numeric column per PSF (the value is the factor's level
multiplier, e.g. stress "extreme" = 5), a required ``fatigue`` response in
(0, 1), and an optional exposure ``duration_hours`` (default 1 hour).

Two reference datasets from a lathing-workshop case study ship with the
package: :func:`builtin_table3` (15 fitting instances over 8 PSFs) and
:func:`builtin_table8` (5 hold-out instances used for validation).

Preprocessing follows the usual PCA pipeline: column standardization with
the sample (n-1) standard deviation, then the Pearson correlation matrix
Z'Z/(n-1) of the standardized columns.
"""

from __future__ import annotations

import csv
import io
import math
import re
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    EmptyDataset,
    FatigueOutOfRange,
    InputError,
    MissingColumn,
    NonNumericCell,
    TooFewRows,
    ZeroVarianceColumn,
)

FATIGUE = "fatigue"
DURATION = "duration_hours"


def normalize_name(name: str) -> str:
    """Normalize a column/factor name to lower_snake_case.

    Case-, space- and punctuation-insensitive, so CLI arguments like
    ``Available Time`` or ``available-time`` match the CSV header
    ``available_time``.
    """
    cleaned = re.sub(r"[^0-9a-zA-Z]+", "_", name.strip()).strip("_")
    return cleaned.lower()


# ---------------------------------------------------------------------------
# PSF catalog (reference data)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PsfDefinition:
    """One PSF with its ordered (level label, multiplier) pairs."""

    name: str
    levels: tuple[tuple[str, float], ...]

    def __post_init__(self):
        labels = [label for label, _ in self.levels]
        if len(set(labels)) != len(labels):
            raise InputError(f"duplicate level labels in PSF {self.name!r}")
        for label, mult in self.levels:
            if not (mult > 0 and math.isfinite(mult)):
                raise InputError(
                    f"PSF {self.name!r} level {label!r}: multiplier must be "
                    f"a positive finite number, got {mult!r}"
                )

    @property
    def multipliers(self) -> tuple[float, ...]:
        return tuple(mult for _, mult in self.levels)


@dataclass(frozen=True)
class PsfCatalog:
    """A named collection of PSF definitions."""

    definitions: tuple[PsfDefinition, ...]

    def __post_init__(self):
        names = [d.name for d in self.definitions]
        if len(set(names)) != len(names):
            raise InputError("duplicate PSF names in catalog")

    def get(self, name: str) -> PsfDefinition | None:
        key = normalize_name(name)
        for d in self.definitions:
            if d.name == key:
                return d
        return None

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(d.name for d in self.definitions)


def _catalog() -> PsfCatalog:
    # The eight PSFs most commonly retained in human-reliability analysis,
    # with SPAR-H-style level multipliers.  Reference data only: observations
    # carry already-encoded numeric values and are not remapped.
    return PsfCatalog((
        PsfDefinition("available_time", (
            ("barely_adequate", 10.0),
            ("nominal", 1.0),
            ("extra", 0.1),
            ("expansive", 0.01),
        )),
        PsfDefinition("stress", (
            ("extreme", 5.0),
            ("high", 2.0),
            ("nominal", 1.0),
        )),
        PsfDefinition("complexity", (
            ("highly_complex", 5.0),
            ("moderately_complex", 2.0),
            ("nominal", 1.0),
        )),
        PsfDefinition("experience_and_training", (
            ("low", 3.0),
            ("nominal", 1.0),
            ("high", 0.5),
        )),
        PsfDefinition("procedures", (
            ("not_available", 50.0),
            ("incomplete", 20.0),
            ("available_but_poor", 5.0),
            ("nominal", 1.0),
            ("diagnostic_oriented", 0.5),
        )),
        PsfDefinition("ergonomics", (
            ("missing_or_misleading", 50.0),
            ("poor", 10.0),
            ("nominal", 1.0),
            ("good", 0.5),
        )),
        PsfDefinition("fitness_for_duty", (
            ("degraded_fitness", 5.0),
            ("nominal", 1.0),
        )),
        PsfDefinition("work_process", (
            ("poor", 5.0),
            ("nominal", 1.0),
            ("good", 0.5),
        )),
    ))


DEFAULT_CATALOG = _catalog()


# ---------------------------------------------------------------------------
# Observations and datasets
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Observation:
    """One instance: PSF values, a fatigue response, and an exposure time.

    Treated as an immutable value object after construction.  The
    response must be a positive finite number (it acts as a lifetime);
    measured fatigue additionally lies in (0, 1), which CSV ingestion
    enforces, while synthetic lifetimes may exceed 1.
    """

    psf_values: dict[str, float]
    fatigue: float
    duration_hours: float = 1.0

    def __post_init__(self):
        for name, value in self.psf_values.items():
            if not math.isfinite(value):
                raise InputError(f"PSF {name!r} value must be finite, got {value!r}")
        if not (self.fatigue > 0.0 and math.isfinite(self.fatigue)):
            raise FatigueOutOfRange(
                f"response must be positive and finite, got {self.fatigue!r}"
            )
        if not (self.duration_hours > 0 and math.isfinite(self.duration_hours)):
            raise InputError(
                f"duration_hours must be a positive finite number, "
                f"got {self.duration_hours!r}"
            )


@dataclass(frozen=True)
class Dataset:
    """An ordered collection of observations sharing one PSF name set."""

    column_names: tuple[str, ...]   # PSF columns in order, then "fatigue"
    rows: tuple[Observation, ...]

    def __post_init__(self):
        psf_names = set(self.psf_names)
        for i, row in enumerate(self.rows):
            if set(row.psf_values) != psf_names:
                raise InputError(f"row {i + 1} does not share the dataset's PSF name set")

    @property
    def psf_names(self) -> tuple[str, ...]:
        return tuple(c for c in self.column_names if c != FATIGUE)

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    def column(self, name: str) -> np.ndarray:
        """Return one column as a float array (``fatigue`` included)."""
        key = normalize_name(name)
        if key == FATIGUE:
            return np.array([r.fatigue for r in self.rows], dtype=float)
        if key not in self.column_names:
            raise MissingColumn(f"no column named {name!r}")
        return np.array([r.psf_values[key] for r in self.rows], dtype=float)

    def matrix(self, columns: list[str] | tuple[str, ...]) -> np.ndarray:
        """Stack the named columns into an (n_rows, len(columns)) array."""
        return np.column_stack([self.column(c) for c in columns])

    @property
    def durations(self) -> np.ndarray:
        return np.array([r.duration_hours for r in self.rows], dtype=float)


# ---------------------------------------------------------------------------
# CSV ingestion / emission
# ---------------------------------------------------------------------------

def _parse_cell(text: str, row: int, column: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise NonNumericCell(
            f"row {row}, column {column!r}: cannot parse {text!r} as a number"
        ) from None
    if not math.isfinite(value):
        raise NonNumericCell(f"row {row}, column {column!r}: value {text!r} is not finite")
    return value


def load_csv(source, catalog: PsfCatalog | None = None) -> Dataset:
    """Read a dataset from CSV.

    Parameters
    ----------
    source
        A binary file-like object, ``bytes``, or text; UTF-8, header row
        required.  One column must be named ``fatigue`` (name matching is
        case/space-insensitive); an optional ``duration_hours`` column
        defaults to 1.0 per row; every other column is treated as a PSF.
        Numbers may use plain decimal or scientific notation with a dot
        decimal separator.
    catalog
        Optional.  When given, any PSF column whose name matches a catalog
        definition must contain only that definition's level multipliers;
        columns not in the catalog are accepted unchecked.

    Raises
    ------
    MissingColumn, NonNumericCell, FatigueOutOfRange, EmptyDataset
        With the offending row (1-based, counting data rows) and column
        named in the message.
    """
    if isinstance(source, bytes):
        text = source.decode("utf-8")
    elif isinstance(source, str):
        text = source
    else:
        raw = source.read()
        text = raw.decode("utf-8") if isinstance(raw, bytes) else raw

    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise EmptyDataset("input has no header row") from None

    names = [normalize_name(h) for h in header]
    if len(set(names)) != len(names):
        raise InputError(f"duplicate column names after normalization: {names}")
    if FATIGUE not in names:
        raise MissingColumn("required column 'fatigue' is absent")

    psf_cols = [n for n in names if n not in (FATIGUE, DURATION)]
    rows: list[Observation] = []
    for i, record in enumerate(reader, start=1):
        if not record or all(cell.strip() == "" for cell in record):
            continue
        if len(record) != len(names):
            raise InputError(
                f"row {i}: expected {len(names)} cells, got {len(record)}"
            )
        cells = dict(zip(names, record))
        fatigue = _parse_cell(cells[FATIGUE], i, FATIGUE)
        if not (0.0 < fatigue < 1.0):
            raise FatigueOutOfRange(
                f"row {i}: fatigue must lie strictly in (0, 1), got {fatigue}"
            )
        duration = 1.0
        if DURATION in cells:
            duration = _parse_cell(cells[DURATION], i, DURATION)
            if duration <= 0:
                raise InputError(f"row {i}: duration_hours must be positive")
        values = {c: _parse_cell(cells[c], i, c) for c in psf_cols}
        if catalog is not None:
            for c, v in values.items():
                definition = catalog.get(c)
                if definition is not None and v not in definition.multipliers:
                    raise InputError(
                        f"row {i}, column {c!r}: {v} is not a defined level "
                        f"multiplier {sorted(definition.multipliers)}"
                    )
        rows.append(Observation(values, fatigue, duration))

    if not rows:
        raise EmptyDataset("input has a header but no data rows")
    return Dataset(tuple(psf_cols) + (FATIGUE,), tuple(rows))


def serialize(dataset: Dataset) -> bytes:
    """Emit a dataset as CSV bytes; ``load_csv`` round-trips it exactly.

    Floats are written with ``repr`` (shortest exact form), so values
    survive the round trip bit-for-bit.
    """
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    header = list(dataset.psf_names) + [FATIGUE, DURATION]
    writer.writerow(header)
    for row in dataset.rows:
        cells = [repr(row.psf_values[c]) for c in dataset.psf_names]
        cells.append(repr(row.fatigue))
        cells.append(repr(row.duration_hours))
        writer.writerow(cells)
    return out.getvalue().encode("utf-8")


# ---------------------------------------------------------------------------
# Built-in case-study data
# ---------------------------------------------------------------------------

_PSF_ORDER = (
    "available_time", "stress", "complexity", "experience_and_training",
    "procedures", "ergonomics", "fitness_for_duty", "work_process",
)

# 15 fitting instances: 8 PSF level values + observed fatigue after a
# one-hour exposure.
_TABLE3 = (
    (0.1,  2, 5, 3,   20, 0.5, 5, 0.5, 0.130),
    (10,   2, 2, 0.5, 1,  10,  1, 0.5, 0.110),
    (10,   1, 2, 1,   50, 1,   5, 5,   0.126),
    (0.1,  1, 1, 1,   5,  0.5, 1, 0.5, 0.035),
    (10,   2, 5, 3,   50, 1,   5, 5,   0.165),
    (0.1,  2, 5, 0.5, 1,  1,   5, 1,   0.078),
    (0.01, 1, 1, 0.5, 1,  1,   1, 5,   0.027),
    (1,    5, 2, 1,   1,  1,   1, 5,   0.086),
    (0.01, 5, 2, 0.5, 1,  10,  5, 5,   0.138),
    (10,   2, 1, 3,   1,  10,  5, 5,   0.150),
    (1,    1, 5, 0.5, 1,  10,  1, 5,   0.094),
    (0.1,  5, 5, 3,   50, 10,  1, 1,   0.157),
    (0.01, 5, 5, 0.5, 20, 10,  5, 0.5, 0.142),
    (0.1,  5, 2, 3,   5,  0.5, 5, 1,   0.126),
    (0.1,  5, 2, 3,   5,  0.5, 5, 1,   0.134),
)

# 5 hold-out instances used for validation.
_TABLE8 = (
    (10,   5, 5, 0.5, 20, 10,  5, 1, 0.195),
    (1,    5, 2, 0.5, 50, 0.5, 1, 5, 0.062),
    (1,    5, 1, 0.5, 50, 10,  1, 1, 0.073),
    (10,   5, 1, 1,   5,  1,   5, 5, 0.162),
    (0.01, 5, 2, 1,   1,  10,  5, 1, 0.114),
)


def _build(rows) -> Dataset:
    observations = tuple(
        Observation(dict(zip(_PSF_ORDER, map(float, r[:-1]))), float(r[-1]), 1.0)
        for r in rows
    )
    return Dataset(_PSF_ORDER + (FATIGUE,), observations)


def builtin_table3() -> Dataset:
    """The bundled 15-instance fitting dataset (one-hour exposures)."""
    return _build(_TABLE3)


def builtin_table8() -> Dataset:
    """The bundled 5-instance hold-out dataset (one-hour exposures)."""
    return _build(_TABLE8)


BUILTIN_DATASETS = {
    "table3": builtin_table3,
    "table8": builtin_table8,
}


# ---------------------------------------------------------------------------
# Preprocessing
# ---------------------------------------------------------------------------

def standardize(dataset: Dataset, columns: list[str] | tuple[str, ...]) -> np.ndarray:
    """Center and scale the named columns to mean 0, sample sd 1.

    The divisor is n-1 (sample standard deviation).  Raises
    :class:`ZeroVarianceColumn` naming the first constant column, and
    :class:`TooFewRows` when fewer than two rows are available.
    """
    if dataset.n_rows < 2:
        raise TooFewRows("standardization needs at least 2 rows")
    m = dataset.matrix(columns)
    mean = m.mean(axis=0)
    sd = m.std(axis=0, ddof=1)
    for name, s in zip(columns, sd):
        if s == 0.0:
            raise ZeroVarianceColumn(f"column {name!r} has zero sample variance")
    return (m - mean) / sd


def correlation_matrix(dataset: Dataset, columns: list[str] | tuple[str, ...]) -> np.ndarray:
    """Pearson correlation matrix Z'Z/(n-1) of the standardized columns.

    Exactly unit diagonal, symmetric, entries clipped to [-1, 1] against
    last-bit rounding.
    """
    z = standardize(dataset, columns)
    n = z.shape[0]
    r = (z.T @ z) / (n - 1)
    r = (r + r.T) / 2.0
    r = np.clip(r, -1.0, 1.0)
    np.fill_diagonal(r, 1.0)
    return r
