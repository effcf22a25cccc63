"""Prediction accuracy against measured runs and scaling sweeps."""

import logging
from decimal import ROUND_HALF_UP, Decimal
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import polars as pl
from pydantic import ValidationError

from perfmodel.analysis.predictor import (
    Contention,
    parallel_efficiency,
    predict,
    predict_a,
    predict_b,
    speedup,
)
from perfmodel.data.models import (
    AccuracyReport,
    AccuracyRow,
    ChunkMode,
    HardwareProfile,
    MeasuredRun,
    ModelParamsA,
    ModelParamsB,
    PublishedResults,
    Strategy,
    Workload,
)
from perfmodel.errors import EvaluationError, PerfModelError

logger = logging.getLogger(__name__)

SWEEP_SCHEMA = {
    "architecture": pl.Utf8,
    "p": pl.Int64,
    "total_a_s": pl.Float64,
    "minutes_a": pl.Float64,
    "total_b_s": pl.Float64,
    "minutes_b": pl.Float64,
    "speedup_a": pl.Float64,
    "speedup_b": pl.Float64,
    "efficiency_a": pl.Float64,
    "efficiency_b": pl.Float64,
}

SCALE_SCHEMA = {
    "architecture": pl.Utf8,
    "i": pl.Int64,
    "it": pl.Int64,
    "ep": pl.Int64,
    "p": pl.Int64,
    "total_s": pl.Float64,
    "minutes": pl.Float64,
}


def round_half_up(value: float, digits: int = 1) -> float:
    """Round for presentation, halves away from zero."""
    quantum = Decimal(1).scaleb(-digits)
    return float(Decimal(repr(value)).quantize(quantum, rounding=ROUND_HALF_UP))


def accuracy_delta(measured_s: float, predicted_s: float) -> float:
    """Deviation of a measurement from its prediction, in percent of the prediction.

    Args:
        measured_s: Measured time in seconds
        predicted_s: Predicted time in seconds

    Returns:
        |measured - predicted| / predicted * 100
    """
    if predicted_s <= 0:
        raise PerfModelError(f"predicted time must be > 0, got {predicted_s}")
    if measured_s <= 0:
        raise PerfModelError(f"measured time must be > 0, got {measured_s}")
    return abs(measured_s - predicted_s) / predicted_s * 100.0


def evaluate(
    measured: Sequence[MeasuredRun],
    strategy: Strategy,
    params: Mapping[str, Union[ModelParamsA, ModelParamsB]],
    hw: HardwareProfile,
    contention: Mapping[str, Contention],
    mode: ChunkMode = ChunkMode.EXACT,
) -> AccuracyReport:
    """Predict every measured run and report the accuracy deltas.

    Args:
        measured: Measured runs, possibly for several architectures
        strategy: Prediction strategy
        params: Strategy parameters by architecture name
        hw: Hardware profile
        contention: Contention profile (or fixed value) by architecture name
        mode: Chunk computation mode

    Returns:
        AccuracyReport with the unweighted mean delta overall and per architecture

    Raises:
        EvaluationError: naming the first run that could not be predicted
    """
    rows: List[AccuracyRow] = []
    for index, run in enumerate(measured):
        arch = run.architecture_name
        try:
            if arch not in params:
                raise PerfModelError(f"no {strategy.value} parameters for '{arch}'")
            if arch not in contention:
                raise PerfModelError(f"no contention profile for '{arch}'")
            prediction = predict(
                strategy, run.to_workload(), params[arch], hw, contention[arch], mode
            )
            delta = accuracy_delta(run.measured_s, prediction.total_s)
        except (PerfModelError, ValidationError) as e:
            raise EvaluationError(f"{arch} p={run.p}: {e}", row=index) from e

        rows.append(
            AccuracyRow(
                architecture_name=arch,
                p=run.p,
                measured_s=run.measured_s,
                predicted_s=prediction.total_s,
                delta_percent=delta,
            )
        )

    per_architecture: Dict[str, List[float]] = {}
    for row in rows:
        per_architecture.setdefault(row.architecture_name, []).append(row.delta_percent)

    average = sum(r.delta_percent for r in rows) / len(rows) if rows else 0.0
    logger.info(f"strategy {strategy.value}: average delta {average:.2f}% over {len(rows)} runs")
    return AccuracyReport(
        strategy=strategy,
        rows=rows,
        average_delta_percent=average,
        per_architecture={k: sum(v) / len(v) for k, v in per_architecture.items()},
    )


def accuracy_frame(report: AccuracyReport) -> pl.DataFrame:
    """Tabulate an AccuracyReport, one row per run."""
    return pl.DataFrame(
        [
            {
                "strategy": report.strategy.value,
                "architecture": row.architecture_name,
                "p": row.p,
                "measured_s": row.measured_s,
                "predicted_s": row.predicted_s,
                "delta_percent": row.delta_percent,
            }
            for row in report.rows
        ],
        schema={
            "strategy": pl.Utf8,
            "architecture": pl.Utf8,
            "p": pl.Int64,
            "measured_s": pl.Float64,
            "predicted_s": pl.Float64,
            "delta_percent": pl.Float64,
        },
    )


def sweep_threads(
    thread_counts: Sequence[int],
    template: Workload,
    params_a: ModelParamsA,
    params_b: ModelParamsB,
    hw: HardwareProfile,
    contention: Contention,
    mode: ChunkMode = ChunkMode.EXACT,
) -> pl.DataFrame:
    """Predict a workload at several thread counts with both strategies.

    Args:
        thread_counts: Thread counts, one output row each, in the given order
        template: Workload whose p (and ns) are replaced per row
        params_a: Strategy (a) parameters
        params_b: Strategy (b) parameters
        hw: Hardware profile
        contention: Contention profile or fixed value for the template's architecture
        mode: Chunk computation mode

    Returns:
        Polars DataFrame with unrounded seconds, minutes rounded to one decimal,
        plus speedup and parallel efficiency relative to the first row. Empty, with
        the same columns, when thread_counts is empty
    """
    rows = []
    first: Optional[Tuple[int, float, float]] = None
    for p in thread_counts:
        w = Workload.model_validate({**template.model_dump(), "p": p, "ns": p})
        total_a = predict_a(w, params_a, hw, contention, mode).total_s
        total_b = predict_b(w, params_b, hw, contention, mode).total_s
        if first is None:
            first = (p, total_a, total_b)
        rows.append(
            {
                "architecture": template.architecture_name,
                "p": p,
                "total_a_s": total_a,
                "minutes_a": round_half_up(total_a / 60.0),
                "total_b_s": total_b,
                "minutes_b": round_half_up(total_b / 60.0),
                "speedup_a": speedup(first[1], total_a),
                "speedup_b": speedup(first[2], total_b),
                "efficiency_a": parallel_efficiency(first[1], total_a, p / first[0]),
                "efficiency_b": parallel_efficiency(first[2], total_b, p / first[0]),
            }
        )
    return pl.DataFrame(rows, schema=SWEEP_SCHEMA)


def sweep_scale(
    image_grid: Sequence[Tuple[int, int]],
    epoch_grid: Sequence[int],
    thread_counts: Sequence[int],
    template: Workload,
    params_a: ModelParamsA,
    hw: HardwareProfile,
    contention: Contention,
    mode: ChunkMode = ChunkMode.EXACT,
) -> pl.DataFrame:
    """Strategy (a) predictions over an image x epoch x thread grid.

    Args:
        image_grid: (i, it) pairs
        epoch_grid: Epoch counts
        thread_counts: Thread counts
        template: Workload supplying the architecture
        params_a: Strategy (a) parameters
        hw: Hardware profile
        contention: Contention profile or fixed value
        mode: Chunk computation mode

    Returns:
        Long-form Polars DataFrame ordered by p, then images, then epochs
    """
    rows = []
    for p in thread_counts:
        for i, it in image_grid:
            for ep in epoch_grid:
                w = Workload.model_validate(
                    {**template.model_dump(), "i": i, "it": it, "ep": ep, "p": p, "ns": p}
                )
                total = predict_a(w, params_a, hw, contention, mode).total_s
                rows.append(
                    {
                        "architecture": template.architecture_name,
                        "i": i,
                        "it": it,
                        "ep": ep,
                        "p": p,
                        "total_s": total,
                        "minutes": round_half_up(total / 60.0),
                    }
                )
    return pl.DataFrame(rows, schema=SCALE_SCHEMA)


def scale_grid_pivot(frame: pl.DataFrame) -> pl.DataFrame:
    """Lay a sweep_scale result out with images as rows and (p, ep) as columns."""
    labelled = frame.with_columns(
        pl.concat_str(
            [
                pl.lit("minutes_p"),
                pl.col("p").cast(pl.Utf8),
                pl.lit("_ep"),
                pl.col("ep").cast(pl.Utf8),
            ]
        ).alias("column")
    )
    return labelled.pivot(
        on="column", index=["i", "it"], values="minutes", aggregate_function="first"
    ).sort(["i", "it"])


def reproduce_thread_sweep(sweep: pl.DataFrame, published: PublishedResults) -> pl.DataFrame:
    """Compare a sweep_threads result against published minutes.

    Returns:
        Polars DataFrame with architecture, p, strategy, predicted_minutes,
        published_minutes and abs_diff (rows without a published value are skipped)
    """
    rows = []
    for record in sweep.iter_rows(named=True):
        arch = record["architecture"]
        for strategy in Strategy:
            table = published.thread_sweep.get(arch, {}).get(strategy, {})
            if record["p"] not in table:
                continue
            predicted = record[f"total_{strategy.value}_s"] / 60.0
            expected = table[record["p"]]
            rows.append(
                {
                    "architecture": arch,
                    "p": record["p"],
                    "strategy": strategy.value,
                    "predicted_minutes": predicted,
                    "published_minutes": expected,
                    "abs_diff": abs(predicted - expected),
                }
            )
    return pl.DataFrame(
        rows,
        schema={
            "architecture": pl.Utf8,
            "p": pl.Int64,
            "strategy": pl.Utf8,
            "predicted_minutes": pl.Float64,
            "published_minutes": pl.Float64,
            "abs_diff": pl.Float64,
        },
    )


def reproduce_scale_grid(grid: pl.DataFrame, published: PublishedResults) -> pl.DataFrame:
    """Join a sweep_scale result with the published grid cells."""
    cells = pl.DataFrame(
        [cell.model_dump() for cell in published.scale_grid],
        schema={"i": pl.Int64, "it": pl.Int64, "ep": pl.Int64, "p": pl.Int64, "minutes": pl.Float64},
    ).rename({"minutes": "published_minutes"})
    return (
        grid.with_columns((pl.col("total_s") / 60.0).alias("predicted_minutes"))
        .join(cells, on=["i", "it", "ep", "p"], how="inner")
        .with_columns(
            (pl.col("predicted_minutes") - pl.col("published_minutes")).abs().alias("abs_diff")
        )
        .select(["p", "i", "it", "ep", "predicted_minutes", "published_minutes", "abs_diff"])
        .sort(["p", "i", "ep"])
    )
