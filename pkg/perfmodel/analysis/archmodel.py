"""Layer statistics and per-image operation counts for CNN architectures."""

import logging
from typing import Dict, List, Tuple

import polars as pl

from perfmodel.data.models import (
    CnnArchitecture,
    LayerKind,
    LayerOps,
    LayerSpec,
    LayerStats,
    OpCounts,
    OpTotals,
    ReferenceOps,
)
from perfmodel.errors import ArchitectureError

logger = logging.getLogger(__name__)

_WEIGHTED_DENSE = (LayerKind.FULLY_CONNECTED, LayerKind.OUTPUT)
_UNIT_KERNEL = (LayerKind.INPUT, LayerKind.FULLY_CONNECTED, LayerKind.OUTPUT)


def validate_architecture(arch: CnnArchitecture) -> None:
    """Check the structural invariants of an architecture.

    Args:
        arch: Architecture to check

    Raises:
        ArchitectureError: naming the first offending layer
    """
    if len(arch.layers) < 2:
        raise ArchitectureError(f"architecture '{arch.name}' needs at least Input and Output")
    if arch.layers[0].kind is not LayerKind.INPUT:
        raise ArchitectureError("first layer must be Input", layer_index=0)
    last = len(arch.layers) - 1
    if arch.layers[last].kind is not LayerKind.OUTPUT:
        raise ArchitectureError("last layer must be Output", layer_index=last)

    for index, layer in enumerate(arch.layers):
        if index > 0 and layer.kind is LayerKind.INPUT:
            raise ArchitectureError("Input may only appear first", layer_index=index)
        if index < last and layer.kind is LayerKind.OUTPUT:
            raise ArchitectureError("Output may only appear last", layer_index=index)
        if layer.kind in _UNIT_KERNEL and layer.kernel_area != 1:
            raise ArchitectureError(
                f"{layer.kind.value} layers use a 1x1 kernel", layer_index=index
            )
        if index == 0:
            if layer.connected_prev_maps != 0:
                raise ArchitectureError("Input has no previous maps", layer_index=0)
            continue
        prev = arch.layers[index - 1]
        if layer.connected_prev_maps > prev.maps:
            raise ArchitectureError(
                f"connected_prev_maps={layer.connected_prev_maps} exceeds the "
                f"{prev.maps} maps of layer {index - 1}",
                layer_index=index,
            )


def infer_map_shape(prev: LayerSpec, layer: LayerSpec) -> Tuple[int, int]:
    """Infer a layer's map size from the previous layer (unit stride, no padding).

    Args:
        prev: Previous layer
        layer: Layer whose map size to infer

    Returns:
        Tuple of (map_height, map_width)
    """
    if layer.kind is LayerKind.CONVOLUTIONAL:
        return (
            prev.map_height - layer.kernel_height + 1,
            prev.map_width - layer.kernel_width + 1,
        )
    if layer.kind is LayerKind.MAX_POOLING:
        return prev.map_height // layer.kernel_height, prev.map_width // layer.kernel_width
    if layer.kind in _WEIGHTED_DENSE:
        return 1, 1
    return layer.map_height, layer.map_width


def _check_shapes(arch: CnnArchitecture) -> None:
    for index in range(1, len(arch.layers)):
        prev, layer = arch.layers[index - 1], arch.layers[index]
        if layer.kind in _WEIGHTED_DENSE:
            continue
        expected = infer_map_shape(prev, layer)
        if expected != (layer.map_height, layer.map_width):
            logger.warning(
                f"{arch.name} layer {index}: declared map {layer.map_height}x{layer.map_width}, "
                f"unit-stride inference gives {expected[0]}x{expected[1]}"
            )


def layer_weights(layer: LayerSpec, prev: LayerSpec | None) -> int:
    """Number of trainable weights (biases included) of a layer."""
    if layer.kind is LayerKind.CONVOLUTIONAL:
        return layer.maps * (layer.kernel_area * layer.connected_prev_maps + 1)
    if layer.kind in _WEIGHTED_DENSE and prev is not None:
        return layer.neurons * (prev.neurons + 1)
    return 0


def layer_stats(arch: CnnArchitecture) -> List[LayerStats]:
    """Compute neurons and weights of every layer.

    Args:
        arch: Architecture to analyse

    Returns:
        One LayerStats per layer, in order

    Raises:
        ArchitectureError: if the architecture is malformed
    """
    validate_architecture(arch)
    _check_shapes(arch)

    stats = []
    for index, layer in enumerate(arch.layers):
        prev = arch.layers[index - 1] if index > 0 else None
        stats.append(
            LayerStats(
                index=index,
                kind=layer.kind,
                maps=layer.maps,
                neurons=layer.neurons,
                weights=layer_weights(layer, prev),
            )
        )
    return stats


def layer_fprop_ops(layer: LayerSpec, prev: LayerSpec | None) -> int:
    """Forward operations of one layer for one image.

    A multiply and an add per kernel tap, plus a bias add and an activation per neuron.
    """
    if layer.kind is LayerKind.CONVOLUTIONAL:
        return layer.neurons * (2 * layer.kernel_area * layer.connected_prev_maps + 2)
    if layer.kind is LayerKind.MAX_POOLING:
        return layer.neurons * layer.kernel_area
    if layer.kind in _WEIGHTED_DENSE and prev is not None:
        return layer.neurons * (2 * prev.neurons + 2)
    return 0


def layer_bprop_ops(layer: LayerSpec, prev: LayerSpec | None) -> int:
    """Backward operations of one layer for one image.

    Weighted layers pay for the weight gradient and the delta propagation (twice the
    forward work); pooling routes each delta through a kernel-area comparison.
    """
    if layer.kind is LayerKind.MAX_POOLING:
        return layer.neurons * layer.kernel_area
    return 2 * layer_fprop_ops(layer, prev)


def count_ops(arch: CnnArchitecture) -> OpCounts:
    """Count forward and backward operations per image.

    Args:
        arch: Architecture to analyse

    Returns:
        OpCounts with per-layer entries and totals

    Raises:
        ArchitectureError: if the architecture is malformed
    """
    validate_architecture(arch)

    per_layer = []
    for index, layer in enumerate(arch.layers):
        prev = arch.layers[index - 1] if index > 0 else None
        per_layer.append(
            LayerOps(
                index=index,
                kind=layer.kind,
                fprop=layer_fprop_ops(layer, prev),
                bprop=layer_bprop_ops(layer, prev),
            )
        )

    counts = OpCounts(
        fprop_ops=sum(entry.fprop for entry in per_layer),
        bprop_ops=sum(entry.bprop for entry in per_layer),
        per_layer=per_layer,
    )
    logger.debug(f"{arch.name}: fprop={counts.fprop_ops} bprop={counts.bprop_ops}")
    return counts


def ops_by_kind(counts: OpCounts) -> Dict[str, OpTotals]:
    """Group operation counts by layer type.

    Output layers count as fully connected.

    Args:
        counts: Result of count_ops

    Returns:
        Dictionary with "fprop" and "bprop" OpTotals
    """
    groups = {
        LayerKind.MAX_POOLING: "max_pooling",
        LayerKind.FULLY_CONNECTED: "fully_connected",
        LayerKind.OUTPUT: "fully_connected",
        LayerKind.CONVOLUTIONAL: "convolution",
    }
    totals: Dict[str, Dict[str, int]] = {
        direction: {"max_pooling": 0, "fully_connected": 0, "convolution": 0}
        for direction in ("fprop", "bprop")
    }
    for entry in counts.per_layer:
        group = groups.get(entry.kind)
        if group is None:
            continue
        totals["fprop"][group] += entry.fprop
        totals["bprop"][group] += entry.bprop

    return {
        direction: OpTotals(**values, total=sum(values.values()))
        for direction, values in totals.items()
    }


def op_table(arch: CnnArchitecture) -> pl.DataFrame:
    """Per-layer table of neurons, weights and operation counts.

    Args:
        arch: Architecture to analyse

    Returns:
        Polars DataFrame with columns index, kind, maps, neurons, weights, fprop_ops, bprop_ops
    """
    stats = layer_stats(arch)
    counts = count_ops(arch)
    return pl.DataFrame(
        [
            {
                "index": s.index,
                "kind": s.kind.value,
                "maps": s.maps,
                "neurons": s.neurons,
                "weights": s.weights,
                "fprop_ops": ops.fprop,
                "bprop_ops": ops.bprop,
            }
            for s, ops in zip(stats, counts.per_layer)
        ],
        schema={
            "index": pl.Int64,
            "kind": pl.Utf8,
            "maps": pl.Int64,
            "neurons": pl.Int64,
            "weights": pl.Int64,
            "fprop_ops": pl.Int64,
            "bprop_ops": pl.Int64,
        },
    )


def compare_with_reference(arch: CnnArchitecture, reference: ReferenceOps) -> pl.DataFrame:
    """Compare counted totals against published per-type totals.

    Mismatches are expected for reconstructed architectures and never raise.

    Args:
        arch: Architecture to count
        reference: Published totals for the same architecture

    Returns:
        Polars DataFrame with one row per (direction, layer type)
    """
    counted = ops_by_kind(count_ops(arch))
    published = {"fprop": reference.fprop, "bprop": reference.bprop}

    rows = []
    for direction in ("fprop", "bprop"):
        for group in ("max_pooling", "fully_connected", "convolution", "total"):
            ours = getattr(counted[direction], group)
            theirs = getattr(published[direction], group)
            rows.append(
                {
                    "architecture": arch.name,
                    "direction": direction,
                    "layer_type": group,
                    "counted": ours,
                    "reference": theirs,
                    "ratio": ours / theirs if theirs else None,
                }
            )
    return pl.DataFrame(rows)


def ops_ratio(references: Dict[str, ReferenceOps], order: List[str]) -> pl.DataFrame:
    """Growth ratios of total op counts between consecutive architectures.

    Args:
        references: Published totals by architecture name
        order: Architecture names from smallest to largest

    Returns:
        Polars DataFrame with columns architecture, fprop_total, fprop_ratio,
        bprop_total, bprop_ratio (ratios are null for the first architecture)
    """
    rows = []
    previous = None
    for name in order:
        current = references[name]
        rows.append(
            {
                "architecture": name,
                "fprop_total": current.fprop.total,
                "fprop_ratio": current.fprop.total / previous.fprop.total if previous else None,
                "bprop_total": current.bprop.total,
                "bprop_ratio": current.bprop.total / previous.bprop.total if previous else None,
            }
        )
        previous = current
    return pl.DataFrame(
        rows,
        schema={
            "architecture": pl.Utf8,
            "fprop_total": pl.Int64,
            "fprop_ratio": pl.Float64,
            "bprop_total": pl.Int64,
            "bprop_ratio": pl.Float64,
        },
    )
