"""Rendering result frames as CSV, JSON or terminal tables."""

import logging
import sys
from pathlib import Path
from typing import Callable, Optional, Union

import polars as pl

from perfmodel.analysis.evaluation import round_half_up

logger = logging.getLogger(__name__)

FORMATS = ("csv", "json", "table")

_CONTENTION_COLUMNS = {"reference_seconds", "slope", "intercept"}


def _formatter_for(column: str) -> Callable[[float], str]:
    if "minutes" in column:
        return lambda v: f"{round_half_up(v, 1):.1f}"
    if "contention" in column or column in _CONTENTION_COLUMNS:
        return lambda v: f"{v:.2e}"
    return lambda v: f"{v:.3f}"


def format_frame(frame: pl.DataFrame) -> pl.DataFrame:
    """Apply fixed presentation formatting to every float column.

    Minutes get one decimal (rounded half up), contention values three significant
    digits in scientific notation, and all other floats (seconds, ratios) three
    decimals. Integer and string columns are left as they are.
    """
    exprs = []
    for name, dtype in frame.schema.items():
        if dtype.is_float():
            fmt = _formatter_for(name)
            exprs.append(
                pl.col(name).map_elements(fmt, return_dtype=pl.Utf8, skip_nulls=True).alias(name)
            )
    return frame.with_columns(exprs) if exprs else frame


def render(frame: pl.DataFrame, fmt: str) -> str:
    """Render a frame in one of FORMATS.

    JSON keeps numbers numeric, parsed back from their formatted text so every
    format shows the same digits.
    """
    if fmt not in FORMATS:
        raise ValueError(f"unknown format '{fmt}', expected one of {', '.join(FORMATS)}")

    formatted = format_frame(frame)
    if fmt == "csv":
        return formatted.write_csv()
    if fmt == "json":
        numeric = formatted.with_columns(
            [
                pl.col(name).cast(pl.Float64)
                for name, dtype in frame.schema.items()
                if dtype.is_float()
            ]
        )
        return numeric.write_json() + "\n"

    with pl.Config(
        tbl_hide_dataframe_shape=True,
        tbl_hide_column_data_types=True,
        tbl_rows=-1,
        tbl_cols=-1,
        tbl_width_chars=240,
        fmt_str_lengths=200,
    ):
        return str(formatted) + "\n"


def emit(
    frame: pl.DataFrame,
    fmt: str,
    out: Optional[Union[str, Path]] = None,
    title: Optional[str] = None,
) -> None:
    """Write a rendered frame to a file or stdout.

    Args:
        frame: Result frame
        fmt: One of FORMATS
        out: Output file (default: stdout)
        title: Heading printed above terminal tables (ignored for csv/json)
    """
    text = render(frame, fmt)
    if title and fmt == "table":
        text = f"{title}\n{text}"
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(text)
    logger.info(f"wrote {frame.height} rows to {path}")
