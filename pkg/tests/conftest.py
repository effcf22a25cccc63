"""Shared fixtures."""

import pytest

from perfmodel.data.dataset import apply_preset, contention_for, load_dataset
from perfmodel.data.models import (
    CnnArchitecture,
    ContentionProfile,
    ContentionSample,
    HardwareProfile,
    LayerKind,
    LayerSpec,
    Workload,
)


@pytest.fixture(scope="session")
def dataset():
    """The bundled dataset with published values."""
    return load_dataset()


@pytest.fixture(scope="session")
def tableix_dataset(dataset):
    """The bundled dataset with the thread-sweep preset applied."""
    return apply_preset(dataset, "paper-tableIX")


@pytest.fixture
def hw(dataset) -> HardwareProfile:
    return dataset.hardware


@pytest.fixture
def small_contention(dataset) -> ContentionProfile:
    return contention_for(dataset, "small")


@pytest.fixture
def small_workload() -> Workload:
    """Small CNN, 240 threads, default images and epochs."""
    return Workload(architecture_name="small", i=60000, it=10000, ep=70, p=240)


@pytest.fixture
def linear_profile() -> ContentionProfile:
    """Contention exactly 1 ms per thread."""
    return ContentionProfile(
        architecture_name="tiny",
        samples=[ContentionSample(p=p, contention_seconds=p * 1e-3) for p in (1, 2, 4, 8)],
    )


@pytest.fixture
def tiny_arch() -> CnnArchitecture:
    """Input 1@6x6 -> conv 2@4x4 (3x3) -> pool 2@2x2 -> fc 4 -> output 2."""
    return CnnArchitecture(
        name="tiny",
        layers=[
            LayerSpec(kind=LayerKind.INPUT, maps=1, map_height=6, map_width=6),
            LayerSpec(
                kind=LayerKind.CONVOLUTIONAL,
                maps=2,
                map_height=4,
                map_width=4,
                kernel_height=3,
                kernel_width=3,
                connected_prev_maps=1,
            ),
            LayerSpec(
                kind=LayerKind.MAX_POOLING,
                maps=2,
                map_height=2,
                map_width=2,
                kernel_height=2,
                kernel_width=2,
                connected_prev_maps=1,
            ),
            LayerSpec(kind=LayerKind.FULLY_CONNECTED, maps=4, connected_prev_maps=2),
            LayerSpec(kind=LayerKind.OUTPUT, maps=2, connected_prev_maps=4),
        ],
    )
