"""Reading measured runs from CSV files."""

import logging
import math
from pathlib import Path
from typing import List, Union

import polars as pl
from pydantic import ValidationError

from perfmodel.data.models import MeasuredRun
from perfmodel.errors import MeasurementFormatError, PerfModelError

logger = logging.getLogger(__name__)

MEASURED_COLUMNS = ["arch", "p", "i", "it", "ep", "measured_s"]
_INTEGER_COLUMNS = ("p", "i", "it", "ep")
# MeasuredRun field -> CSV column, where they differ.
_FIELD_COLUMNS = {"architecture_name": "arch"}


def _parse_cell(value: str | None, column: str, row: int) -> Union[str, int, float]:
    if value is None or value.strip() == "":
        raise MeasurementFormatError("missing value", row=row, column=column)
    text = value.strip()
    if column == "arch":
        return text
    try:
        number: Union[int, float] = int(text) if column in _INTEGER_COLUMNS else float(text)
    except ValueError as e:
        kind = "an integer" if column in _INTEGER_COLUMNS else "a number"
        raise MeasurementFormatError(
            f"expected {kind}, got '{text}'", row=row, column=column
        ) from e
    if not math.isfinite(number):
        raise MeasurementFormatError(f"must be finite, got {text}", row=row, column=column)
    if number <= 0:
        raise MeasurementFormatError(f"must be > 0, got {text}", row=row, column=column)
    return number


def parse_measured_frame(frame: pl.DataFrame) -> List[MeasuredRun]:
    """Convert a string-typed frame with the measured-run header into MeasuredRuns.

    Rows are numbered from 1, not counting the header.

    Raises:
        MeasurementFormatError: at the first missing column or malformed cell
    """
    missing = [c for c in MEASURED_COLUMNS if c not in frame.columns]
    if missing:
        raise MeasurementFormatError(
            f"missing column(s) {', '.join(missing)}; expected header {','.join(MEASURED_COLUMNS)}",
            row=0,
            column=missing[0],
        )

    runs = []
    for row_number, record in enumerate(frame.iter_rows(named=True), start=1):
        values = {c: _parse_cell(record[c], c, row_number) for c in MEASURED_COLUMNS}
        try:
            run = MeasuredRun(
                architecture_name=values["arch"],
                p=values["p"],
                i=values["i"],
                it=values["it"],
                ep=values["ep"],
                measured_s=values["measured_s"],
            )
        except ValidationError as e:
            detail = e.errors()[0]
            field = str(detail["loc"][-1]) if detail["loc"] else "measured_s"
            raise MeasurementFormatError(
                detail["msg"], row=row_number, column=_FIELD_COLUMNS.get(field, field)
            ) from e
        runs.append(run)
    return runs


def read_measured_runs(path: Union[str, Path]) -> List[MeasuredRun]:
    """Read measured runs from a CSV with header arch,p,i,it,ep,measured_s.

    Args:
        path: CSV file

    Returns:
        List of MeasuredRun in file order

    Raises:
        MeasurementFormatError: at the first malformed cell
        OSError: if the file cannot be read
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Measured runs file not found: {path}")
    try:
        frame = pl.read_csv(path, infer_schema=False)
    except pl.exceptions.ComputeError as e:
        raise PerfModelError(f"{path}: unreadable CSV: {e}") from e
    runs = parse_measured_frame(frame)
    logger.info(f"read {len(runs)} measured runs from {path}")
    return runs
