"""Loading the bundled model dataset, presets and architecture documents."""

import json
import logging
from pathlib import Path
from typing import Dict, List, Optional, Union

import polars as pl
from pydantic import ValidationError

from perfmodel.data.models import (
    CnnArchitecture,
    ContentionProfile,
    ModelParamsA,
    ModelParamsB,
    PaperDataset,
    Workload,
)
from perfmodel.errors import DatasetError
from perfmodel.utils.config import DATASET_FILE

logger = logging.getLogger(__name__)

BASE_PRESET = "paper"


def _read_json(path: Path) -> dict:
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


def load_architecture(path: Union[str, Path]) -> CnnArchitecture:
    """Load one architecture document.

    Args:
        path: JSON file with name and an ordered layer list

    Returns:
        CnnArchitecture

    Raises:
        DatasetError: if the document does not match the schema
    """
    path = Path(path)
    try:
        return CnnArchitecture.model_validate(_read_json(path))
    except (ValidationError, json.JSONDecodeError) as e:
        raise DatasetError(f"invalid architecture document {path}: {e}") from e


def load_dataset(path: Union[str, Path] = DATASET_FILE) -> PaperDataset:
    """Load a dataset document and the architecture documents it references.

    Architecture file paths are resolved relative to the dataset file.

    Args:
        path: Dataset JSON file

    Returns:
        PaperDataset with architectures populated

    Raises:
        DatasetError: if the document or a referenced architecture is invalid
        OSError: if a file cannot be read
    """
    path = Path(path)
    try:
        dataset = PaperDataset.model_validate(_read_json(path))
    except (ValidationError, json.JSONDecodeError) as e:
        raise DatasetError(f"invalid dataset document {path}: {e}") from e

    architectures: Dict[str, CnnArchitecture] = dict(dataset.architectures)
    for relative in dataset.architecture_files:
        arch = load_architecture(path.parent / relative)
        architectures[arch.name] = arch

    logger.debug(f"loaded dataset '{dataset.name}' with {len(architectures)} architectures")
    return dataset.model_copy(update={"architectures": architectures})


def apply_preset(dataset: PaperDataset, preset: str) -> PaperDataset:
    """Return the dataset with a named preset's parameter overrides applied.

    Args:
        dataset: Base dataset
        preset: Preset name; the base preset applies no overrides

    Returns:
        PaperDataset with overridden parameters

    Raises:
        DatasetError: if the preset is unknown or overrides an unknown architecture
    """
    if preset == BASE_PRESET:
        return dataset
    if preset not in dataset.presets:
        known = ", ".join([BASE_PRESET, *dataset.presets])
        raise DatasetError(f"unknown preset '{preset}' (known: {known})")

    override = dataset.presets[preset]
    params_a = dict(dataset.params_a)
    params_b = dict(dataset.params_b)
    for arch, fields in override.params_a.items():
        if arch not in params_a:
            raise DatasetError(f"preset '{preset}' overrides unknown architecture '{arch}'")
        params_a[arch] = ModelParamsA.model_validate({**params_a[arch].model_dump(), **fields})
    for arch, fields in override.params_b.items():
        if arch not in params_b:
            raise DatasetError(f"preset '{preset}' overrides unknown architecture '{arch}'")
        params_b[arch] = ModelParamsB.model_validate({**params_b[arch].model_dump(), **fields})

    logger.warning(f"preset '{preset}': {override.description}")
    return dataset.model_copy(update={"params_a": params_a, "params_b": params_b})


def contention_for(dataset: PaperDataset, arch: str) -> ContentionProfile:
    """Contention profile of one architecture.

    Raises:
        DatasetError: if the dataset has no profile for it
    """
    for profile in dataset.contention:
        if profile.architecture_name == arch:
            return profile
    raise DatasetError(f"no contention profile for architecture '{arch}'")


def params_a_for(dataset: PaperDataset, arch: str) -> ModelParamsA:
    if arch not in dataset.params_a:
        raise DatasetError(f"no strategy (a) parameters for architecture '{arch}'")
    return dataset.params_a[arch]


def params_b_for(dataset: PaperDataset, arch: str) -> ModelParamsB:
    if arch not in dataset.params_b:
        raise DatasetError(f"no strategy (b) parameters for architecture '{arch}'")
    return dataset.params_b[arch]


def architecture_for(dataset: PaperDataset, arch: str) -> CnnArchitecture:
    if arch not in dataset.architectures:
        known = ", ".join(sorted(dataset.architectures))
        raise DatasetError(f"unknown architecture '{arch}' (known: {known})")
    return dataset.architectures[arch]


def default_workload(dataset: PaperDataset, arch: str, p: int, **overrides: Optional[int]) -> Workload:
    """Workload for an architecture using the dataset's default image and epoch counts.

    Args:
        dataset: Dataset providing defaults
        arch: Architecture name
        p: Thread count
        **overrides: Replacement values for i, it, ep or ns (None keeps the default)

    Returns:
        Workload (validated)
    """
    if arch not in dataset.workloads:
        raise DatasetError(f"no workload defaults for architecture '{arch}'")
    defaults = dataset.workloads[arch]
    values = {"architecture_name": arch, "i": defaults.i, "it": defaults.it, "ep": defaults.ep}
    values.update({k: v for k, v in overrides.items() if v is not None})
    values["p"] = p
    return Workload.model_validate(values)


_cache: Dict[str, PaperDataset] = {}


def get_dataset(preset: str = BASE_PRESET, path: Optional[Union[str, Path]] = None) -> PaperDataset:
    """Get the (cached) dataset with a preset applied.

    Args:
        preset: Preset name
        path: Dataset file (default: the bundled dataset)

    Returns:
        PaperDataset
    """
    source = str(path or DATASET_FILE)
    if source not in _cache:
        _cache[source] = load_dataset(source)
    return apply_preset(_cache[source], preset)


def _fmt(value: object) -> str:
    if isinstance(value, float):
        return f"{value:g}"
    return str(value)


def dataset_frame(dataset: PaperDataset) -> pl.DataFrame:
    """Every bundled constant with the citation stored next to it.

    Returns:
        Polars DataFrame with columns section, key, value, source
    """
    rows: List[Dict[str, Optional[str]]] = []

    def add(section: str, key: str, value: object, source: Optional[str]) -> None:
        rows.append({"section": section, "key": key, "value": _fmt(value), "source": source})

    hw = dataset.hardware
    add("hardware", "name", hw.name, hw.source)
    add("hardware", "clock_speed_hz", hw.clock_speed_hz, hw.source)
    add("hardware", "cores", hw.cores, hw.source)
    add("hardware", "max_threads_per_core", hw.max_threads_per_core, hw.source)
    for threads, cpi in sorted(hw.cpi_schedule.items()):
        add("hardware", f"cpi[{threads} threads/core]", cpi, hw.source)

    for profile in dataset.contention:
        for sample in profile.samples:
            add(
                f"contention.{profile.architecture_name}",
                f"p={sample.p}",
                sample.contention_seconds,
                profile.source,
            )

    for arch, params_a in sorted(dataset.params_a.items()):
        for field in ("prep_ops", "fprop_ops", "bprop_ops", "operation_factor"):
            add(f"params_a.{arch}", field, getattr(params_a, field), params_a.source)
    for arch, params_b in sorted(dataset.params_b.items()):
        for field in ("t_prep_s", "t_fprop_s", "t_bprop_s"):
            add(f"params_b.{arch}", field, getattr(params_b, field), params_b.source)
    for arch, defaults in sorted(dataset.workloads.items()):
        for field in ("i", "it", "ep"):
            add(f"workload.{arch}", field, getattr(defaults, field), defaults.source)
    for arch, reference in sorted(dataset.reference_ops.items()):
        add(f"reference_ops.{arch}", "fprop_total", reference.fprop.total, reference.source)
        add(f"reference_ops.{arch}", "bprop_total", reference.bprop.total, reference.source)
    published = dataset.published
    for arch, by_strategy in sorted(published.average_delta_percent.items()):
        for strategy, delta in sorted(by_strategy.items()):
            add(
                f"accuracy.{arch}",
                f"average_delta_percent[{strategy.value}]",
                delta,
                published.average_delta_source,
            )
    for name, arch in sorted(dataset.architectures.items()):
        add("architectures", name, f"{len(arch.layers)} layers", arch.source)
    for name, preset in sorted(dataset.presets.items()):
        add("presets", name, preset.description, None)
    for index, note in enumerate(dataset.notes):
        add("notes", str(index + 1), note, None)

    return pl.DataFrame(
        rows,
        schema={"section": pl.Utf8, "key": pl.Utf8, "value": pl.Utf8, "source": pl.Utf8},
    )
