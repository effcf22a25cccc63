"""API routes for the performance model."""

from typing import Dict, List, Optional

from fastapi import APIRouter, Depends, HTTPException, Query
from pydantic import BaseModel, Field, ValidationError

from perfmodel.analysis.archmodel import op_table
from perfmodel.analysis.evaluation import sweep_threads
from perfmodel.analysis.hardware import contention_table
from perfmodel.analysis.predictor import predict
from perfmodel.data.dataset import (
    contention_for,
    default_workload,
    get_dataset,
    params_a_for,
    params_b_for,
)
from perfmodel.data.models import ChunkMode, PaperDataset, Prediction, Strategy
from perfmodel.errors import PerfModelError
from perfmodel.utils.config import DEFAULT_CHUNK_MODE, DEFAULT_PRESET

router = APIRouter(prefix="/api/v1", tags=["CNN Performance Model"])


class PredictRequest(BaseModel):
    """Body of a prediction request; omitted counts use the dataset defaults."""

    strategy: Strategy
    arch: str
    p: int = Field(ge=1)
    i: Optional[int] = Field(default=None, ge=1)
    it: Optional[int] = Field(default=None, ge=1)
    ep: Optional[int] = Field(default=None, ge=1)
    chunk_mode: ChunkMode = ChunkMode(DEFAULT_CHUNK_MODE)


def get_paper_dataset() -> PaperDataset:
    """Dependency returning the dataset with the configured preset.

    Returns:
        PaperDataset
    """
    return get_dataset(DEFAULT_PRESET)


def _require_arch(dataset: PaperDataset, name: str) -> None:
    if name not in dataset.architectures and name not in dataset.params_a:
        raise HTTPException(status_code=404, detail=f"Unknown architecture '{name}'")


@router.get("/architectures", response_model=List[str])
async def get_architectures(dataset: PaperDataset = Depends(get_paper_dataset)):
    """Names of the bundled architectures."""
    return sorted(set(dataset.architectures) | set(dataset.params_a))


@router.get("/architectures/{name}/ops", response_model=List[Dict])
async def get_architecture_ops(name: str, dataset: PaperDataset = Depends(get_paper_dataset)):
    """Per-layer neurons, weights and operation counts.

    Args:
        name: Architecture name
        dataset: PaperDataset

    Returns:
        One dictionary per layer
    """
    if name not in dataset.architectures:
        raise HTTPException(status_code=404, detail=f"No layer description for '{name}'")
    try:
        return op_table(dataset.architectures[name]).to_dicts()
    except PerfModelError as e:
        raise HTTPException(status_code=422, detail=str(e)) from e


@router.get("/contention/{name}", response_model=List[Dict])
async def get_contention(
    name: str,
    threads: str = Query("480,960,1920,3840", description="Comma-separated thread counts"),
    dataset: PaperDataset = Depends(get_paper_dataset),
):
    """Contention values, measured or extrapolated, at the requested thread counts."""
    _require_arch(dataset, name)
    try:
        thread_counts = [int(t) for t in threads.split(",") if t.strip()]
        return contention_table(contention_for(dataset, name), thread_counts).to_dicts()
    except (ValueError, PerfModelError) as e:
        raise HTTPException(status_code=422, detail=str(e)) from e


@router.post("/predict", response_model=Prediction)
async def post_predict(request: PredictRequest, dataset: PaperDataset = Depends(get_paper_dataset)):
    """Predict one workload.

    Args:
        request: Strategy, architecture, threads and optional image/epoch counts
        dataset: PaperDataset

    Returns:
        Prediction with phase breakdown
    """
    _require_arch(dataset, request.arch)
    try:
        w = default_workload(
            dataset, request.arch, request.p, i=request.i, it=request.it, ep=request.ep
        )
        params = (
            params_a_for(dataset, request.arch)
            if request.strategy is Strategy.A
            else params_b_for(dataset, request.arch)
        )
        return predict(
            request.strategy,
            w,
            params,
            dataset.hardware,
            contention_for(dataset, request.arch),
            request.chunk_mode,
        )
    except (PerfModelError, ValidationError) as e:
        raise HTTPException(status_code=422, detail=str(e)) from e


@router.get("/sweep", response_model=List[Dict])
async def get_sweep(
    arch: str = Query(..., description="Architecture name"),
    threads: str = Query("480,960,1920,3840", description="Comma-separated thread counts"),
    dataset: PaperDataset = Depends(get_paper_dataset),
):
    """Both strategies over a list of thread counts."""
    _require_arch(dataset, arch)
    try:
        thread_counts = [int(t) for t in threads.split(",") if t.strip()]
        if not thread_counts:
            raise PerfModelError("threads must name at least one thread count")
        frame = sweep_threads(
            thread_counts,
            default_workload(dataset, arch, thread_counts[0]),
            params_a_for(dataset, arch),
            params_b_for(dataset, arch),
            dataset.hardware,
            contention_for(dataset, arch),
            ChunkMode(DEFAULT_CHUNK_MODE),
        )
        return frame.to_dicts()
    except (ValueError, PerfModelError) as e:
        raise HTTPException(status_code=422, detail=str(e)) from e
