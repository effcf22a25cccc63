"""Tests for output rendering."""

import json

import polars as pl
import pytest

from perfmodel.utils.reporting import emit, format_frame, render


@pytest.fixture
def frame():
    return pl.DataFrame(
        {
            "architecture": ["small", "small"],
            "p": [480, 960],
            "total_s": [392.91687, 325.28],
            "minutes": [6.549, 5.45],
            "contention_seconds": [0.0277770, 0.0558361],
        }
    )


def test_format_frame(frame):
    formatted = format_frame(frame)

    assert formatted["total_s"].to_list() == ["392.917", "325.280"]
    assert formatted["minutes"].to_list() == ["6.5", "5.5"]
    assert formatted["contention_seconds"].to_list() == ["2.78e-02", "5.58e-02"]
    assert formatted["p"].to_list() == [480, 960]


def test_render_csv(frame):
    text = render(frame, "csv")

    assert text.splitlines() == [
        "architecture,p,total_s,minutes,contention_seconds",
        "small,480,392.917,6.5,2.78e-02",
        "small,960,325.280,5.5,5.58e-02",
    ]


def test_render_json_keeps_numbers(frame):
    rows = json.loads(render(frame, "json"))

    assert rows[0] == {
        "architecture": "small",
        "p": 480,
        "total_s": 392.917,
        "minutes": 6.5,
        "contention_seconds": 0.0278,
    }


def test_render_table_shows_all_rows():
    many = pl.DataFrame({"p": list(range(1, 41)), "total_s": [1.0] * 40})
    text = render(many, "table")

    assert "40" in text
    assert "…" not in text
    assert "shape" not in text


def test_render_is_deterministic(frame):
    assert render(frame, "csv") == render(frame, "csv")
    assert render(frame, "table") == render(frame, "table")


def test_unknown_format(frame):
    with pytest.raises(ValueError):
        render(frame, "xml")


def test_emit_to_file(frame, tmp_path):
    out = tmp_path / "nested" / "out.csv"
    emit(frame, "csv", out, title="ignored for csv")

    assert out.read_text().startswith("architecture,p,")


def test_emit_to_stdout_with_title(frame, capsys):
    emit(frame, "table", title="small sweep")

    assert capsys.readouterr().out.startswith("small sweep\n")
