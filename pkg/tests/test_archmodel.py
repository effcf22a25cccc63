"""Tests for layer statistics and operation counting."""

import logging

import pytest

from perfmodel.analysis.archmodel import (
    compare_with_reference,
    count_ops,
    infer_map_shape,
    layer_stats,
    op_table,
    ops_by_kind,
    ops_ratio,
    validate_architecture,
)
from perfmodel.data.models import CnnArchitecture, LayerKind, LayerSpec
from perfmodel.errors import ArchitectureError


def _minimal(output_maps: int = 3) -> CnnArchitecture:
    return CnnArchitecture(
        name="minimal",
        layers=[
            LayerSpec(kind=LayerKind.INPUT, maps=1, map_height=2, map_width=2),
            LayerSpec(kind=LayerKind.OUTPUT, maps=output_maps, connected_prev_maps=1),
        ],
    )


def test_tiny_layer_stats(tiny_arch):
    """Neurons and weights of every layer of a hand-checked network."""
    stats = layer_stats(tiny_arch)

    assert [s.neurons for s in stats] == [36, 32, 8, 4, 2]
    assert [s.weights for s in stats] == [0, 20, 0, 36, 10]


def test_tiny_op_counts(tiny_arch):
    counts = count_ops(tiny_arch)

    assert [entry.fprop for entry in counts.per_layer] == [0, 640, 32, 72, 20]
    assert [entry.bprop for entry in counts.per_layer] == [0, 1280, 32, 144, 40]
    assert counts.fprop_ops == 764
    assert counts.bprop_ops == 1496


def test_ops_by_kind(tiny_arch):
    """Output layers are grouped with fully connected layers."""
    totals = ops_by_kind(count_ops(tiny_arch))

    assert totals["fprop"].max_pooling == 32
    assert totals["fprop"].fully_connected == 92
    assert totals["fprop"].convolution == 640
    assert totals["fprop"].total == 764
    assert totals["bprop"].fully_connected == 184
    assert totals["bprop"].total == 1496


def test_minimal_network_counts_output_as_dense():
    counts = count_ops(_minimal())
    stats = layer_stats(_minimal())

    # 3 outputs fully connected to 4 inputs plus bias.
    assert stats[1].weights == 3 * (4 + 1)
    assert counts.fprop_ops == 3 * (2 * 4 + 2)
    assert counts.bprop_ops == 2 * counts.fprop_ops
    assert ops_by_kind(counts)["fprop"].fully_connected == counts.fprop_ops


@pytest.mark.parametrize(
    "arch_name, index, neurons, weights",
    [
        ("small", 1, 3380, 85),
        ("medium", 1, 13520, 340),
        ("large", 4, 3600, 216100),
    ],
)
def test_bundled_convolution_layers(dataset, arch_name, index, neurons, weights):
    """Published layer figures of the reconstructed architectures."""
    stats = layer_stats(dataset.architectures[arch_name])

    assert stats[index].kind is LayerKind.CONVOLUTIONAL
    assert stats[index].neurons == neurons
    assert stats[index].weights == weights


@pytest.mark.parametrize("arch_name", ["small", "medium", "large"])
def test_bundled_input_and_output(dataset, arch_name):
    stats = layer_stats(dataset.architectures[arch_name])

    assert stats[0].neurons == 841
    assert stats[-1].neurons == 10


def test_bundled_architectures_have_consistent_shapes(dataset, caplog):
    with caplog.at_level(logging.WARNING):
        for arch in dataset.architectures.values():
            layer_stats(arch)

    assert caplog.records == []


def test_op_counts_grow_with_architecture_size(dataset):
    counts = [count_ops(dataset.architectures[name]) for name in ("small", "medium", "large")]

    assert counts[0].fprop_ops < counts[1].fprop_ops < counts[2].fprop_ops
    assert counts[0].bprop_ops < counts[1].bprop_ops < counts[2].bprop_ops


def test_bundled_ratios(dataset):
    """Growth of the published totals from small to medium to large."""
    ratios = ops_ratio(dataset.reference_ops, ["small", "medium", "large"])

    assert ratios["fprop_ratio"][0] is None
    assert ratios["fprop_ratio"][1] == pytest.approx(9.64, abs=0.01)
    assert ratios["fprop_ratio"][2] == pytest.approx(9.57, abs=0.01)
    assert ratios["bprop_ratio"][1] == pytest.approx(11.68, abs=0.01)
    assert ratios["bprop_ratio"][2] == pytest.approx(11.96, abs=0.01)


def test_bundled_reference_totals_add_up(dataset):
    for reference in dataset.reference_ops.values():
        for totals in (reference.fprop, reference.bprop):
            assert totals.max_pooling + totals.fully_connected + totals.convolution == totals.total


def test_compare_with_reference_reports_without_raising(dataset):
    frame = compare_with_reference(dataset.architectures["small"], dataset.reference_ops["small"])

    assert frame.height == 8
    assert set(frame["direction"].to_list()) == {"fprop", "bprop"}
    row = frame.filter(
        (frame["direction"] == "fprop") & (frame["layer_type"] == "total")
    ).row(0, named=True)
    assert row["reference"] == 58000
    assert row["ratio"] == pytest.approx(row["counted"] / 58000)


def test_op_table_columns(tiny_arch):
    frame = op_table(tiny_arch)

    assert frame.columns == ["index", "kind", "maps", "neurons", "weights", "fprop_ops", "bprop_ops"]
    assert frame["kind"].to_list() == [
        "Input",
        "Convolutional",
        "MaxPooling",
        "FullyConnected",
        "Output",
    ]
    assert frame["fprop_ops"].sum() == 764


def test_infer_map_shape(tiny_arch):
    layers = tiny_arch.layers

    assert infer_map_shape(layers[0], layers[1]) == (4, 4)
    assert infer_map_shape(layers[1], layers[2]) == (2, 2)
    assert infer_map_shape(layers[2], layers[3]) == (1, 1)


def test_declared_shape_mismatch_warns(tiny_arch, caplog):
    layers = list(tiny_arch.layers)
    layers[1] = layers[1].model_copy(update={"map_height": 5, "map_width": 5})
    strided = tiny_arch.model_copy(update={"layers": layers})

    with caplog.at_level(logging.WARNING):
        layer_stats(strided)

    assert any("layer 1" in record.message for record in caplog.records)


def test_first_layer_must_be_input():
    arch = CnnArchitecture(
        name="bad",
        layers=[
            LayerSpec(kind=LayerKind.FULLY_CONNECTED, maps=4),
            LayerSpec(kind=LayerKind.OUTPUT, maps=2, connected_prev_maps=4),
        ],
    )

    with pytest.raises(ArchitectureError) as exc_info:
        validate_architecture(arch)

    assert exc_info.value.layer_index == 0


def test_last_layer_must_be_output(tiny_arch):
    arch = tiny_arch.model_copy(update={"layers": tiny_arch.layers[:-1]})

    with pytest.raises(ArchitectureError) as exc_info:
        count_ops(arch)

    assert exc_info.value.layer_index == 3


def test_connected_maps_cannot_exceed_previous_layer(tiny_arch):
    layers = list(tiny_arch.layers)
    layers[1] = layers[1].model_copy(update={"connected_prev_maps": 2})
    arch = tiny_arch.model_copy(update={"layers": layers})

    with pytest.raises(ArchitectureError, match="layer 1"):
        layer_stats(arch)


def test_dense_layers_need_unit_kernel(tiny_arch):
    layers = list(tiny_arch.layers)
    layers[3] = layers[3].model_copy(update={"kernel_height": 2})
    arch = tiny_arch.model_copy(update={"layers": layers})

    with pytest.raises(ArchitectureError) as exc_info:
        count_ops(arch)

    assert exc_info.value.layer_index == 3


def test_too_short_architecture():
    arch = CnnArchitecture(
        name="short", layers=[LayerSpec(kind=LayerKind.INPUT, maps=1, map_height=2, map_width=2)]
    )

    with pytest.raises(ArchitectureError):
        validate_architecture(arch)


def _shape_preserving_layer(prev: LayerSpec) -> LayerSpec:
    """A layer whose output looks like prev, so the layers after it see the same input."""
    if prev.kind is LayerKind.FULLY_CONNECTED:
        return LayerSpec(
            kind=LayerKind.FULLY_CONNECTED, maps=prev.maps, connected_prev_maps=prev.maps
        )
    return LayerSpec(
        kind=LayerKind.CONVOLUTIONAL,
        maps=prev.maps,
        map_height=prev.map_height,
        map_width=prev.map_width,
        connected_prev_maps=prev.maps,
    )


def _with_layer_at(arch: CnnArchitecture, index: int) -> CnnArchitecture:
    layers = list(arch.layers)
    layers.insert(index, _shape_preserving_layer(layers[index - 1]))
    return arch.model_copy(update={"layers": layers})


def test_adding_a_layer_never_decreases_ops(tiny_arch, dataset):
    for arch in [tiny_arch, *dataset.architectures.values()]:
        base = count_ops(arch)
        for index in range(1, len(arch.layers)):
            grown = count_ops(_with_layer_at(arch, index))

            assert grown.fprop_ops > base.fprop_ops, (arch.name, index)
            assert grown.bprop_ops > base.bprop_ops, (arch.name, index)


def _conv_only(scale: int) -> CnnArchitecture:
    return CnnArchitecture(
        name=f"conv-x{scale}",
        layers=[
            LayerSpec(kind=LayerKind.INPUT, maps=1, map_height=8, map_width=8),
            LayerSpec(
                kind=LayerKind.CONVOLUTIONAL,
                maps=3 * scale,
                map_height=6,
                map_width=6,
                kernel_height=3,
                kernel_width=3,
                connected_prev_maps=1,
            ),
            LayerSpec(
                kind=LayerKind.CONVOLUTIONAL,
                maps=4 * scale,
                map_height=4,
                map_width=4,
                kernel_height=3,
                kernel_width=3,
                connected_prev_maps=1,
            ),
            LayerSpec(kind=LayerKind.OUTPUT, maps=2, connected_prev_maps=1),
        ],
    )


def test_conv_ops_linear_in_maps():
    base = count_ops(_conv_only(1))
    doubled = count_ops(_conv_only(2))

    conv = [e.fprop for e in base.per_layer if e.kind is LayerKind.CONVOLUTIONAL]
    conv_doubled = [e.fprop for e in doubled.per_layer if e.kind is LayerKind.CONVOLUTIONAL]

    # 2 * 9 taps * 1 connected map + 2 per neuron
    assert conv == [3 * 36 * 20, 4 * 16 * 20]
    assert conv_doubled == [2 * ops for ops in conv]
