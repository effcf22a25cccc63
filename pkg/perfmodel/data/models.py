"""Data models for the CNN performance model."""

from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class LayerKind(str, Enum):
    """CNN layer type."""

    INPUT = "Input"
    CONVOLUTIONAL = "Convolutional"
    MAX_POOLING = "MaxPooling"
    FULLY_CONNECTED = "FullyConnected"
    OUTPUT = "Output"


class Strategy(str, Enum):
    """Prediction strategy: operation counts (a) or measured per-image timings (b)."""

    A = "a"
    B = "b"


class ChunkMode(str, Enum):
    """How a thread's share of images is computed."""

    EXACT = "exact"
    CEIL = "ceil"


class LayerSpec(BaseModel):
    """One layer of a CNN architecture."""

    model_config = ConfigDict(frozen=True)

    kind: LayerKind
    maps: int = Field(ge=1)
    map_height: int = Field(default=1, ge=1)
    map_width: int = Field(default=1, ge=1)
    kernel_height: int = Field(default=1, ge=1)
    kernel_width: int = Field(default=1, ge=1)
    connected_prev_maps: int = Field(default=0, ge=0)

    @property
    def neurons(self) -> int:
        return self.maps * self.map_height * self.map_width

    @property
    def kernel_area(self) -> int:
        return self.kernel_height * self.kernel_width


class CnnArchitecture(BaseModel):
    """A CNN described as an ordered list of layers, Input first and Output last."""

    model_config = ConfigDict(frozen=True)

    name: str
    layers: List[LayerSpec]
    reconstructed: bool = False
    description: Optional[str] = None
    source: Optional[str] = None


class LayerStats(BaseModel):
    """Neuron and weight counts of one layer."""

    index: int
    kind: LayerKind
    maps: int
    neurons: int
    weights: int


class LayerOps(BaseModel):
    """Forward and backward operation counts of one layer for one image."""

    index: int
    kind: LayerKind
    fprop: int
    bprop: int


class OpCounts(BaseModel):
    """Per-image operation counts of a whole architecture."""

    fprop_ops: int
    bprop_ops: int
    per_layer: List[LayerOps]


class OpTotals(BaseModel):
    """Operation totals split by layer type, as in the published op-count tables."""

    max_pooling: int = Field(ge=0)
    fully_connected: int = Field(ge=0)
    convolution: int = Field(ge=0)
    total: int = Field(ge=0)


class ReferenceOps(BaseModel):
    """Published forward/backward op totals for one architecture."""

    fprop: OpTotals
    bprop: OpTotals
    source: Optional[str] = None


class HardwareProfile(BaseModel):
    """Processor description: clock, topology and CPI penalty schedule."""

    model_config = ConfigDict(frozen=True)

    name: str
    clock_speed_hz: float = Field(gt=0)
    cores: int = Field(ge=1)
    max_threads_per_core: int = Field(ge=1)
    cpi_schedule: Dict[int, float]
    source: Optional[str] = None

    @model_validator(mode="after")
    def _check_cpi_schedule(self) -> "HardwareProfile":
        previous = 1.0
        for threads in range(1, self.max_threads_per_core + 1):
            if threads not in self.cpi_schedule:
                raise ValueError(f"cpi_schedule has no entry for {threads} threads per core")
            cpi = self.cpi_schedule[threads]
            if cpi < 1:
                raise ValueError(f"CPI for {threads} threads per core must be >= 1, got {cpi}")
            if cpi < previous:
                raise ValueError("cpi_schedule must be non-decreasing in threads per core")
            previous = cpi
        return self


class ContentionSample(BaseModel):
    """Memory contention penalty measured (or published) at one thread count."""

    model_config = ConfigDict(frozen=True)

    p: int = Field(ge=1)
    contention_seconds: float = Field(ge=0)


class ContentionProfile(BaseModel):
    """Per-architecture memory contention curve."""

    model_config = ConfigDict(frozen=True)

    architecture_name: str
    samples: List[ContentionSample]
    reference_predictions: List[ContentionSample] = Field(default_factory=list)
    source: Optional[str] = None

    @field_validator("samples")
    @classmethod
    def _strictly_increasing(cls, samples: List[ContentionSample]) -> List[ContentionSample]:
        for before, after in zip(samples, samples[1:]):
            if after.p <= before.p:
                raise ValueError("contention samples must be strictly increasing in p")
        return samples

    @property
    def max_measured_p(self) -> int:
        return self.samples[-1].p


class LinearFit(BaseModel):
    """Least-squares line contention = slope * p + intercept."""

    slope: float
    intercept: float

    def at(self, p: float) -> float:
        return self.slope * p + self.intercept


class Workload(BaseModel):
    """Model inputs: images, test images, epochs, threads and network instances."""

    model_config = ConfigDict(frozen=True)

    architecture_name: str
    i: int = Field(ge=1)
    it: int = Field(ge=1)
    ep: int = Field(ge=1)
    p: int = Field(ge=1)
    ns: Optional[int] = Field(default=None, ge=1)

    @model_validator(mode="before")
    @classmethod
    def _default_network_instances(cls, data: Any) -> Any:
        # One network instance per thread.
        if isinstance(data, dict) and data.get("ns") is None and "p" in data:
            data = {**data, "ns": data["p"]}
        return data


class ModelOpsA(BaseModel):
    """Strategy (a) operation counts: preparation and per-image propagation."""

    model_config = ConfigDict(frozen=True)

    prep_ops: float = Field(gt=0)
    fprop_ops: float = Field(gt=0)
    bprop_ops: float = Field(gt=0)
    source: Optional[str] = None


class ModelParamsA(ModelOpsA):
    """Strategy (a) parameters including the calibrated OperationFactor."""

    operation_factor: float = Field(gt=0)


class ModelParamsB(BaseModel):
    """Strategy (b) parameters: measured preparation and per-image times in seconds."""

    model_config = ConfigDict(frozen=True)

    t_prep_s: float = Field(gt=0)
    t_fprop_s: float = Field(gt=0)
    t_bprop_s: float = Field(gt=0)
    source: Optional[str] = None


class PhaseBreakdown(BaseModel):
    """Predicted seconds per algorithm phase, after all multipliers."""

    prep_s: float = Field(ge=0)
    train_s: float = Field(ge=0)
    validate_s: float = Field(ge=0)
    test_s: float = Field(ge=0)
    mem_s: float = Field(ge=0)

    @property
    def total_s(self) -> float:
        return self.prep_s + self.train_s + self.validate_s + self.test_s + self.mem_s


class Prediction(BaseModel):
    """Predicted execution time of one workload under one strategy."""

    strategy: Strategy
    architecture_name: str
    p: int
    total_s: float = Field(ge=0)
    breakdown: PhaseBreakdown
    cpi_used: float
    contention_s: float
    threads_per_core: int
    chunk_i: float
    chunk_it: float

    @property
    def minutes(self) -> float:
        return self.total_s / 60.0

    @property
    def phase_breakdown(self) -> Dict[str, float]:
        """Seconds per phase in program order: prep, train, validate, test, mem."""
        b = self.breakdown
        return {
            "prep": b.prep_s,
            "train": b.train_s,
            "validate": b.validate_s,
            "test": b.test_s,
            "mem": b.mem_s,
        }


class MeasuredRun(BaseModel):
    """A measured wall time for one workload."""

    architecture_name: str
    p: int = Field(ge=1)
    i: int = Field(ge=1)
    it: int = Field(ge=1)
    ep: int = Field(ge=1)
    measured_s: float = Field(gt=0)

    def to_workload(self) -> Workload:
        return Workload(
            architecture_name=self.architecture_name,
            i=self.i,
            it=self.it,
            ep=self.ep,
            p=self.p,
        )


class AccuracyRow(BaseModel):
    """Measured vs. predicted time of one run."""

    architecture_name: str
    p: int
    measured_s: float
    predicted_s: float
    delta_percent: float = Field(ge=0)


class AccuracyReport(BaseModel):
    """Per-run accuracy deltas and their unweighted mean."""

    strategy: Strategy
    rows: List[AccuracyRow]
    average_delta_percent: float
    per_architecture: Dict[str, float] = Field(default_factory=dict)


class WorkloadDefaults(BaseModel):
    """Default image and epoch counts for one architecture."""

    i: int = Field(ge=1)
    it: int = Field(ge=1)
    ep: int = Field(ge=1)
    source: Optional[str] = None


class ScaleCell(BaseModel):
    """One published cell of the image/epoch scaling grid."""

    i: int
    it: int
    ep: int
    p: int
    minutes: float


class PublishedResults(BaseModel):
    """Published prediction tables used for reproduction reports."""

    thread_sweep: Dict[str, Dict[Strategy, Dict[int, float]]] = Field(default_factory=dict)
    thread_sweep_source: Optional[str] = None
    scale_grid_architecture: str = "small"
    scale_grid: List[ScaleCell] = Field(default_factory=list)
    scale_grid_source: Optional[str] = None
    average_delta_percent: Dict[str, Dict[Strategy, float]] = Field(default_factory=dict)
    average_delta_source: Optional[str] = None


class PresetOverride(BaseModel):
    """Named overrides applied on top of the base dataset."""

    description: str
    params_a: Dict[str, Dict[str, float]] = Field(default_factory=dict)
    params_b: Dict[str, Dict[str, float]] = Field(default_factory=dict)


class PaperDataset(BaseModel):
    """Bundled constants: hardware, contention, model parameters and architectures."""

    name: str
    description: Optional[str] = None
    notes: List[str] = Field(default_factory=list)
    hardware: HardwareProfile
    contention: List[ContentionProfile]
    params_a: Dict[str, ModelParamsA]
    params_b: Dict[str, ModelParamsB]
    workloads: Dict[str, WorkloadDefaults]
    reference_ops: Dict[str, ReferenceOps] = Field(default_factory=dict)
    published: PublishedResults = Field(default_factory=PublishedResults)
    presets: Dict[str, PresetOverride] = Field(default_factory=dict)
    architecture_files: List[str] = Field(default_factory=list)
    architectures: Dict[str, CnnArchitecture] = Field(default_factory=dict)
