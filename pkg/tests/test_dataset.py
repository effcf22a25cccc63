"""Tests for the bundled dataset, presets and measured-run ingestion."""

import json
import logging

import pytest

from perfmodel.data.dataset import (
    apply_preset,
    architecture_for,
    contention_for,
    dataset_frame,
    default_workload,
    get_dataset,
    load_architecture,
    load_dataset,
)
from perfmodel.data.measurements import MEASURED_COLUMNS, read_measured_runs
from perfmodel.data.models import Strategy
from perfmodel.errors import DatasetError, MeasurementFormatError, PerfModelError
from perfmodel.utils.config import ARCHITECTURES_DIR, DATASET_FILE


def test_bundled_dataset_loads(dataset):
    assert dataset.hardware.clock_speed_hz == 1.238e9
    assert dataset.hardware.cores == 60
    assert dataset.hardware.cpi_schedule == {1: 1.0, 2: 1.0, 3: 1.5, 4: 2.0}
    assert set(dataset.architectures) == {"small", "medium", "large"}
    assert [profile.architecture_name for profile in dataset.contention] == [
        "small",
        "medium",
        "large",
    ]


def test_every_constant_block_is_cited(dataset):
    blocks = [
        dataset.hardware,
        *dataset.contention,
        *dataset.params_a.values(),
        *dataset.params_b.values(),
        *dataset.workloads.values(),
        *dataset.reference_ops.values(),
        *dataset.architectures.values(),
    ]
    assert all(block.source for block in blocks)
    assert all(block.source.startswith(("Table ", "Fig. ")) for block in blocks)
    assert dataset.published.thread_sweep_source
    assert dataset.published.scale_grid_source


def test_bundled_parameters(dataset):
    assert dataset.params_a["medium"].prep_ops == 1e10
    assert dataset.params_a["large"].operation_factor == 15
    assert dataset.params_b["large"].t_bprop_s == pytest.approx(0.85919)
    assert dataset.workloads["large"].ep == 15
    assert dataset.published.thread_sweep["large"][Strategy.B][480] == 82.6
    assert len(dataset.published.scale_grid) == 18


def test_preset_overrides_medium_prep_and_warns(dataset, caplog):
    with caplog.at_level(logging.WARNING):
        preset = apply_preset(dataset, "paper-tableIX")

    assert preset.params_a["medium"].prep_ops == 1e9
    assert preset.params_a["medium"].fprop_ops == dataset.params_a["medium"].fprop_ops
    assert preset.params_a["small"] == dataset.params_a["small"]
    assert dataset.params_a["medium"].prep_ops == 1e10
    assert any("paper-tableIX" in record.message for record in caplog.records)


def test_base_preset_is_identity(dataset):
    assert apply_preset(dataset, "paper") is dataset


def test_unknown_preset(dataset):
    with pytest.raises(DatasetError, match="unknown preset"):
        apply_preset(dataset, "nonsense")


def test_get_dataset_is_cached():
    assert get_dataset() is get_dataset()
    assert get_dataset("paper-tableIX").params_a["medium"].prep_ops == 1e9


def test_load_architecture_document():
    arch = load_architecture(ARCHITECTURES_DIR / "large.json")

    assert arch.name == "large"
    assert arch.reconstructed
    assert len(arch.layers) == 8


def test_invalid_architecture_document(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"name": "bad", "layers": [{"kind": "Sideways", "maps": 1}]}))

    with pytest.raises(DatasetError):
        load_architecture(path)


def test_user_dataset_copy_loads(tmp_path):
    document = json.loads(DATASET_FILE.read_text())
    document["architecture_files"] = []
    document["params_a"]["small"]["operation_factor"] = 20
    path = tmp_path / "mine.json"
    path.write_text(json.dumps(document))

    mine = load_dataset(path)

    assert mine.params_a["small"].operation_factor == 20
    assert mine.architectures == {}


def test_missing_dataset_file(tmp_path):
    with pytest.raises(OSError):
        load_dataset(tmp_path / "absent.json")


def test_lookup_helpers(dataset):
    assert contention_for(dataset, "medium").architecture_name == "medium"
    with pytest.raises(DatasetError):
        contention_for(dataset, "huge")
    with pytest.raises(DatasetError, match="known: large, medium, small"):
        architecture_for(dataset, "huge")


def test_default_workload_overrides(dataset):
    w = default_workload(dataset, "large", 480, ep=30, i=None)

    assert (w.i, w.it, w.ep, w.p, w.ns) == (60000, 10000, 30, 480, 480)


def test_dataset_frame_lists_constants(dataset):
    frame = dataset_frame(dataset)

    assert frame.columns == ["section", "key", "value", "source"]
    row = frame.filter((frame["section"] == "params_a.medium") & (frame["key"] == "prep_ops"))
    assert row["value"][0] == "1e+10"
    assert row["source"][0]
    assert frame.filter(frame["section"] == "contention.large").height == 7


def _write_csv(tmp_path, text):
    path = tmp_path / "runs.csv"
    path.write_text(text)
    return path


def test_read_measured_runs(tmp_path):
    path = _write_csv(
        tmp_path,
        "arch,p,i,it,ep,measured_s\nsmall,240,60000,10000,70,540.5\nlarge,15,60000,10000,15,9000\n",
    )

    runs = read_measured_runs(path)

    assert [run.architecture_name for run in runs] == ["small", "large"]
    assert runs[0].p == 240
    assert runs[1].measured_s == 9000.0


@pytest.mark.parametrize(
    "row, row_number, column",
    [
        ("small,abc,60000,10000,70,540.5", 2, "p"),
        ("small,240,60000,10000,70,", 2, "measured_s"),
        ("small,240,60000,10000,0,540.5", 2, "ep"),
        ("small,240,60000,10000,7.5,540.5", 2, "ep"),
        ("small,240,60000,10000,70,nan", 2, "measured_s"),
        ("small,240,60000,10000,70,inf", 2, "measured_s"),
        ("small,240,60000,10000,70,-inf", 2, "measured_s"),
    ],
)
def test_malformed_cell_is_located(tmp_path, row, row_number, column):
    path = _write_csv(tmp_path, f"{','.join(MEASURED_COLUMNS)}\nsmall,240,60000,10000,70,1\n{row}\n")

    with pytest.raises(MeasurementFormatError) as exc_info:
        read_measured_runs(path)

    assert exc_info.value.row == row_number
    assert exc_info.value.column == column
    assert f"row {row_number}, column '{column}'" in str(exc_info.value)


def test_missing_column(tmp_path):
    path = _write_csv(tmp_path, "arch,p,i,it,ep\nsmall,240,60000,10000,70\n")

    with pytest.raises(MeasurementFormatError) as exc_info:
        read_measured_runs(path)

    assert exc_info.value.column == "measured_s"


def test_missing_measurements_file(tmp_path):
    with pytest.raises(OSError):
        read_measured_runs(tmp_path / "absent.csv")


def test_measurement_errors_are_domain_errors():
    assert issubclass(MeasurementFormatError, PerfModelError)
