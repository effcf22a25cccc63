"""Processor model: CPI schedule and memory contention curves."""

import logging
import math
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np
import polars as pl

from perfmodel.data.models import ContentionProfile, HardwareProfile, LinearFit
from perfmodel.errors import ContentionFitError, PerfModelError

logger = logging.getLogger(__name__)


class ContentionSource(str, Enum):
    """Where a contention value came from."""

    MEASURED = "measured"
    INTERPOLATED = "interpolated"
    EXTRAPOLATED = "extrapolated"


def threads_per_core(hw: HardwareProfile, p: int) -> int:
    """Hardware threads sharing one core when p threads are spread evenly.

    Capped at the core's thread limit; thread counts beyond the chip are time-sliced
    at the densest placement.
    """
    if p < 1:
        raise PerfModelError(f"thread count must be >= 1, got {p}")
    return min(math.ceil(p / hw.cores), hw.max_threads_per_core)


def cpi_for(hw: HardwareProfile, p: int) -> float:
    """CPI multiplier for p threads.

    Args:
        hw: Hardware profile
        p: Thread count (>= 1)

    Returns:
        CPI from the profile's schedule for the resulting threads per core
    """
    return hw.cpi_schedule[threads_per_core(hw, p)]


def fit_contention(profile: ContentionProfile, fit_range: Optional[int] = None) -> LinearFit:
    """Ordinary least-squares line (with intercept) through the contention samples.

    Args:
        profile: Contention samples for one architecture
        fit_range: Only use samples with p <= fit_range (default: all samples)

    Returns:
        LinearFit over (p, contention_seconds)

    Raises:
        ContentionFitError: if fewer than two samples are in range
    """
    samples = [s for s in profile.samples if fit_range is None or s.p <= fit_range]
    if len(samples) < 2:
        raise ContentionFitError(
            f"{profile.architecture_name}: need at least 2 samples to fit, got {len(samples)}"
        )

    xs = np.array([s.p for s in samples], dtype=float)
    ys = np.array([s.contention_seconds for s in samples], dtype=float)
    slope, intercept = np.polyfit(xs, ys, 1)

    fit = LinearFit(slope=float(slope), intercept=float(intercept))
    logger.debug(
        f"{profile.architecture_name}: contention fit slope={fit.slope:.4e} "
        f"intercept={fit.intercept:.4e} over {len(samples)} samples"
    )
    return fit


def contention_with_source(profile: ContentionProfile, p: int) -> Tuple[float, ContentionSource]:
    """Contention penalty at p threads and how it was obtained.

    Measured points are returned exactly, values between points are linearly
    interpolated, and values outside the measured range come from the
    least-squares line, clamped at zero.

    Args:
        profile: Contention samples for one architecture
        p: Thread count (>= 1)

    Returns:
        Tuple of (contention_seconds, source)

    Raises:
        ContentionFitError: if the profile has no samples
    """
    if p < 1:
        raise PerfModelError(f"thread count must be >= 1, got {p}")
    if not profile.samples:
        raise ContentionFitError(f"{profile.architecture_name}: contention profile is empty")

    for sample in profile.samples:
        if sample.p == p:
            return sample.contention_seconds, ContentionSource.MEASURED

    first, last = profile.samples[0].p, profile.samples[-1].p
    if first < p < last:
        xs = [s.p for s in profile.samples]
        ys = [s.contention_seconds for s in profile.samples]
        return float(np.interp(p, xs, ys)), ContentionSource.INTERPOLATED

    fit = fit_contention(profile)
    return max(fit.at(p), 0.0), ContentionSource.EXTRAPOLATED


def contention_at(profile: ContentionProfile, p: int) -> float:
    """Contention penalty (seconds per image per epoch) at p threads."""
    value, source = contention_with_source(profile, p)
    logger.debug(f"{profile.architecture_name}: contention at p={p} is {value:.4e} ({source.value})")
    return value


def contention_table(profile: ContentionProfile, thread_counts: List[int]) -> pl.DataFrame:
    """Contention values for several thread counts.

    Args:
        profile: Contention samples for one architecture
        thread_counts: Thread counts to evaluate

    Returns:
        Polars DataFrame with columns p, contention_seconds, source and, where the
        profile carries a published prediction for that p, reference_seconds
    """
    references = {s.p: s.contention_seconds for s in profile.reference_predictions}
    rows = []
    for p in thread_counts:
        value, source = contention_with_source(profile, p)
        rows.append(
            {
                "p": p,
                "contention_seconds": value,
                "source": source.value,
                "reference_seconds": references.get(p),
            }
        )
    return pl.DataFrame(
        rows,
        schema={
            "p": pl.Int64,
            "contention_seconds": pl.Float64,
            "source": pl.Utf8,
            "reference_seconds": pl.Float64,
        },
    )
