"""CSV ingestion of time series and writing of traces and statistics."""

import logging
import math
from collections.abc import Sequence
from pathlib import Path
from typing import Optional, Union

import numpy as np
import pandas as pd

from ..engine.errors import DataFormatError, DimensionMismatchError
from ..engine.types import DatasetSchema, FloatArray, Sample, StandardizationStats

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]
Cell = Union[int, float, str]

STATS_COLUMNS = ["column", "mean", "std"]


def _read_frame(path: PathLike, nrows: Optional[int] = None) -> pd.DataFrame:
    # every cell as text so parse failures can be reported exactly
    try:
        return pd.read_csv(
            path, dtype=str, keep_default_na=False, skipinitialspace=False, nrows=nrows
        )
    except pd.errors.EmptyDataError:
        raise DataFormatError(f"{path} is empty; a header row is required") from None
    except pd.errors.ParserError as e:
        raise DataFormatError(f"{path} is not a well-formed CSV file: {e}") from e


def _parse_cell(raw: str, row: int, column: str) -> float:
    text = raw.strip()
    if not text:
        raise DataFormatError(f"Missing value at row {row}, column '{column}'", row=row, column=column)
    try:
        value = float(text)
    except ValueError:
        raise DataFormatError(
            f"Cannot parse '{raw}' at row {row}, column '{column}'", row=row, column=column
        ) from None
    if not math.isfinite(value):
        raise DataFormatError(
            f"Non-finite value '{raw}' at row {row}, column '{column}'", row=row, column=column
        )
    return value


def load_csv(path: PathLike, schema: DatasetSchema) -> list[Sample]:
    """
    Read samples from a headed CSV file.

    Unselected columns are ignored. Rows are numbered as in the file, the
    header being row 1.

    Raises:
        FileNotFoundError: If the file does not exist
        DataFormatError: On a missing column or an unparseable cell
    """
    if schema.target_column in schema.feature_columns:
        raise DataFormatError(f"Target '{schema.target_column}' is also a feature")

    frame = _read_frame(path)
    required = list(schema.feature_columns) + [schema.target_column]
    if schema.has_timestamp and schema.timestamp_column:
        required.append(schema.timestamp_column)
    for column in required:
        if column not in frame.columns:
            raise DataFormatError(f"Column '{column}' not found in {path}", column=column)

    samples: list[Sample] = []
    for i, record in enumerate(frame.to_dict(orient="records")):
        row = i + 2
        x = np.array([_parse_cell(record[c], row, c) for c in schema.feature_columns])
        y = _parse_cell(record[schema.target_column], row, schema.target_column)
        samples.append(Sample(x=x, y=y, index=i))

    logger.info("loaded %d samples from %s n=%d", len(samples), path, len(schema.feature_columns))
    return samples


def read_header(path: PathLike) -> list[str]:
    return [str(c) for c in _read_frame(path, nrows=0).columns]


def load_features(path: PathLike, columns: Sequence[str]) -> FloatArray:
    """
    Read only the feature matrix, for inference on files without a target.

    Raises:
        DataFormatError: On a missing column or an unparseable cell
    """
    frame = _read_frame(path)
    for column in columns:
        if column not in frame.columns:
            raise DataFormatError(f"Column '{column}' not found in {path}", column=column)
    rows = [
        [_parse_cell(record[c], i + 2, c) for c in columns]
        for i, record in enumerate(frame.to_dict(orient="records"))
    ]
    return np.array(rows, dtype=np.float64).reshape(len(rows), len(columns))


def compute_stats(samples: Sequence[Sample]) -> StandardizationStats:
    """Per-column mean and population std; features first, target last."""
    if not samples:
        raise DataFormatError("Cannot compute statistics of an empty sample list")
    table = np.array([np.append(s.x, s.y) for s in samples])
    return StandardizationStats(means=table.mean(axis=0), stds=table.std(axis=0))


def save_stats(path: PathLike, stats: StandardizationStats, columns: Sequence[str]) -> None:
    if len(columns) != len(stats.means):
        raise DimensionMismatchError("One column name is needed per statistic")
    frame = pd.DataFrame({"column": list(columns), "mean": stats.means, "std": stats.stds})
    frame.to_csv(path, index=False, lineterminator="\n")


def load_stats(path: PathLike, columns: Optional[Sequence[str]] = None) -> StandardizationStats:
    """
    Read a column,mean,std file.

    With columns given, the statistics are returned in that order.

    Raises:
        DataFormatError: If the file is malformed or lacks a requested column
    """
    frame = _read_frame(path)
    for column in STATS_COLUMNS:
        if column not in frame.columns:
            raise DataFormatError(f"Stats file {path} lacks column '{column}'", column=column)

    by_name = {}
    for i, record in enumerate(frame.to_dict(orient="records")):
        row = i + 2
        std = _parse_cell(record["std"], row, "std")
        if std < 0:
            raise DataFormatError(f"Negative std at row {row}", row=row, column="std")
        by_name[record["column"]] = (_parse_cell(record["mean"], row, "mean"), std)

    order = list(columns) if columns is not None else list(by_name)
    missing = [c for c in order if c not in by_name]
    if missing:
        raise DataFormatError(f"Stats file {path} has no entry for {missing}", column=missing[0])
    return StandardizationStats(
        means=np.array([by_name[c][0] for c in order]),
        stds=np.array([by_name[c][1] for c in order]),
    )


def write_trace(path: PathLike, rows: Sequence[Sequence[Cell]], header: Sequence[str]) -> None:
    """
    Write one CSV row per record under a fixed header.

    Floats are written in shortest round-trip form; NaN as 'nan'.
    """
    frame = pd.DataFrame([list(r) for r in rows], columns=list(header))
    frame.to_csv(path, index=False, lineterminator="\n", na_rep="nan")


def write_stream(
    path: PathLike,
    samples: Sequence[Sample],
    feature_columns: Sequence[str],
    target_column: str,
) -> None:
    """Write samples in the layout load_csv reads back."""
    rows = [[float(v) for v in s.x] + [s.y] for s in samples]
    write_trace(path, rows, list(feature_columns) + [target_column])
