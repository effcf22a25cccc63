"""Closed-form execution-time models for data-parallel CNN training.

Both strategies split the run into preparation, training, validation and testing
phases plus a memory-contention overhead. Each thread trains its own network
instance on an equal share ("chunk") of the images, so the parallel phases are
bounded by one thread's chunk.

Strategy (a) derives compute time from operation counts, the clock speed, the
CPI penalty and a calibrated OperationFactor. Strategy (b) uses measured
per-image forward/backward times and a measured preparation time instead.
"""

import logging
import math
from typing import Optional, Union

from perfmodel.analysis.hardware import contention_at, cpi_for, threads_per_core
from perfmodel.data.models import (
    ChunkMode,
    ContentionProfile,
    HardwareProfile,
    ModelOpsA,
    ModelParamsA,
    ModelParamsB,
    PhaseBreakdown,
    Prediction,
    Strategy,
    Workload,
)
from perfmodel.errors import CalibrationError, PerfModelError

logger = logging.getLogger(__name__)

# Preparation work per training image, test image and epoch (operations).
PREP_OPS_PER_IMAGE = 4
PREP_OPS_PER_TEST_IMAGE = 2
PREP_OPS_PER_EPOCH = 10

Contention = Union[ContentionProfile, float]


def t_mem(contention_s: float, ep: int, i: int, p: int) -> float:
    """Memory overhead: contention penalty per image and epoch, spread over p threads."""
    return contention_s * ep * i / p


def chunk(n: int, p: int, mode: ChunkMode = ChunkMode.EXACT) -> float:
    """Share of n images handled by one of p threads.

    Args:
        n: Image count
        p: Thread count
        mode: EXACT for the real quotient, CEIL for the slowest worker's share

    Returns:
        Images per thread
    """
    if n < 1 or p < 1:
        raise PerfModelError(f"image and thread counts must be >= 1, got n={n}, p={p}")
    if mode is ChunkMode.CEIL:
        return float(math.ceil(n / p))
    return n / p


def _resolve_contention(w: Workload, contention: Contention) -> float:
    if isinstance(contention, ContentionProfile):
        if contention.architecture_name != w.architecture_name:
            raise PerfModelError(
                f"contention profile is for '{contention.architecture_name}', "
                f"workload trains '{w.architecture_name}'"
            )
        return contention_at(contention, w.p)
    if contention < 0:
        raise PerfModelError(f"contention must be >= 0, got {contention}")
    return float(contention)


def _compute_terms_a(
    w: Workload, ops: ModelOpsA, hw: HardwareProfile, mode: ChunkMode
) -> tuple[float, float, float, float, float, float]:
    """Unmultiplied strategy (a) terms: prep, train, validate, test and the two chunks."""
    s = hw.clock_speed_hz
    chunk_i = chunk(w.i, w.p, mode)
    chunk_it = chunk(w.it, w.p, mode)

    prep = (
        ops.prep_ops
        + PREP_OPS_PER_IMAGE * w.i
        + PREP_OPS_PER_TEST_IMAGE * w.it
        + PREP_OPS_PER_EPOCH * w.ep
    ) / s
    train = ((ops.fprop_ops + ops.bprop_ops) / s) * chunk_i * w.ep
    validate = (ops.fprop_ops / s) * chunk_i * w.ep
    test = (ops.fprop_ops / s) * chunk_it * w.ep
    return prep, train, validate, test, chunk_i, chunk_it


def predict_a(
    w: Workload,
    params: ModelParamsA,
    hw: HardwareProfile,
    contention: Contention,
    mode: ChunkMode = ChunkMode.EXACT,
    cpi: Optional[float] = None,
) -> Prediction:
    """Predict execution time from operation counts (strategy a).

    Args:
        w: Workload to predict
        params: Operation counts and OperationFactor
        hw: Hardware profile (clock speed, CPI schedule)
        contention: Contention profile for the workload's architecture, or a fixed
            contention value in seconds
        mode: Chunk computation mode
        cpi: Override for the CPI multiplier

    Returns:
        Prediction with a phase breakdown whose components sum to the total
    """
    cpi_used = cpi if cpi is not None else cpi_for(hw, w.p)
    contention_s = _resolve_contention(w, contention)
    prep, train, validate, test, chunk_i, chunk_it = _compute_terms_a(w, params, hw, mode)
    factor = params.operation_factor

    breakdown = PhaseBreakdown(
        prep_s=prep * factor,
        train_s=train * cpi_used * factor,
        validate_s=validate * cpi_used * factor,
        test_s=test * cpi_used * factor,
        mem_s=t_mem(contention_s, w.ep, w.i, w.p),
    )
    logger.debug(
        f"predict_a {w.architecture_name} p={w.p}: cpi={cpi_used} contention={contention_s:.4e}"
    )
    return Prediction(
        strategy=Strategy.A,
        architecture_name=w.architecture_name,
        p=w.p,
        total_s=breakdown.total_s,
        breakdown=breakdown,
        cpi_used=cpi_used,
        contention_s=contention_s,
        threads_per_core=threads_per_core(hw, w.p),
        chunk_i=chunk_i,
        chunk_it=chunk_it,
    )


def predict_b(
    w: Workload,
    params: ModelParamsB,
    hw: HardwareProfile,
    contention: Contention,
    mode: ChunkMode = ChunkMode.EXACT,
    cpi: Optional[float] = None,
) -> Prediction:
    """Predict execution time from measured per-image timings (strategy b).

    The preparation time is taken as measured: it is not scaled by CPI and there is
    no OperationFactor.

    Args:
        w: Workload to predict
        params: Measured preparation and per-image times
        hw: Hardware profile (CPI schedule)
        contention: Contention profile or fixed contention value in seconds
        mode: Chunk computation mode
        cpi: Override for the CPI multiplier

    Returns:
        Prediction with a phase breakdown whose components sum to the total
    """
    cpi_used = cpi if cpi is not None else cpi_for(hw, w.p)
    contention_s = _resolve_contention(w, contention)
    chunk_i = chunk(w.i, w.p, mode)
    chunk_it = chunk(w.it, w.p, mode)

    breakdown = PhaseBreakdown(
        prep_s=params.t_prep_s,
        train_s=(params.t_fprop_s + params.t_bprop_s) * chunk_i * w.ep * cpi_used,
        validate_s=params.t_fprop_s * chunk_i * w.ep * cpi_used,
        test_s=params.t_fprop_s * chunk_it * w.ep * cpi_used,
        mem_s=t_mem(contention_s, w.ep, w.i, w.p),
    )
    logger.debug(
        f"predict_b {w.architecture_name} p={w.p}: cpi={cpi_used} contention={contention_s:.4e}"
    )
    return Prediction(
        strategy=Strategy.B,
        architecture_name=w.architecture_name,
        p=w.p,
        total_s=breakdown.total_s,
        breakdown=breakdown,
        cpi_used=cpi_used,
        contention_s=contention_s,
        threads_per_core=threads_per_core(hw, w.p),
        chunk_i=chunk_i,
        chunk_it=chunk_it,
    )


def predict(
    strategy: Strategy,
    w: Workload,
    params: Union[ModelParamsA, ModelParamsB],
    hw: HardwareProfile,
    contention: Contention,
    mode: ChunkMode = ChunkMode.EXACT,
    cpi: Optional[float] = None,
) -> Prediction:
    """Dispatch to predict_a or predict_b."""
    if strategy is Strategy.A:
        if not isinstance(params, ModelParamsA):
            raise PerfModelError("strategy a needs ModelParamsA")
        return predict_a(w, params, hw, contention, mode, cpi)
    if not isinstance(params, ModelParamsB):
        raise PerfModelError("strategy b needs ModelParamsB")
    return predict_b(w, params, hw, contention, mode, cpi)


def calibrate_operation_factor(
    measured_total_s: float,
    w: Workload,
    ops: ModelOpsA,
    hw: HardwareProfile,
    contention: Contention,
    mode: ChunkMode = ChunkMode.EXACT,
    cpi: Optional[float] = None,
) -> float:
    """Solve the strategy (a) model for the OperationFactor matching one measurement.

    Args:
        measured_total_s: Measured wall time in seconds
        w: Workload that was measured
        ops: Operation counts (any operation_factor present is ignored)
        hw: Hardware profile
        contention: Contention profile or fixed contention value in seconds
        mode: Chunk computation mode
        cpi: Override for the CPI multiplier

    Returns:
        OperationFactor

    Raises:
        CalibrationError: if the measurement does not exceed the memory overhead
    """
    cpi_used = cpi if cpi is not None else cpi_for(hw, w.p)
    contention_s = _resolve_contention(w, contention)
    mem_s = t_mem(contention_s, w.ep, w.i, w.p)
    prep, train, validate, test, _, _ = _compute_terms_a(w, ops, hw, mode)

    denominator = prep + (train + validate + test) * cpi_used
    if denominator <= 0:
        raise CalibrationError("compute term is not positive")
    if measured_total_s <= mem_s:
        raise CalibrationError(
            f"measured time {measured_total_s:.3f} s does not exceed the memory "
            f"overhead {mem_s:.3f} s"
        )

    factor = (measured_total_s - mem_s) / denominator
    logger.info(f"calibrated OperationFactor {factor:.4f} for {w.architecture_name} p={w.p}")
    return factor


def speedup(baseline_s: float, parallel_s: float) -> float:
    """Speedup of a run relative to a baseline run."""
    return baseline_s / parallel_s


def parallel_efficiency(baseline_s: float, parallel_s: float, threads_ratio: float) -> float:
    """Speedup divided by the increase in threads."""
    return speedup(baseline_s, parallel_s) / threads_ratio
