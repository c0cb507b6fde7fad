import io
import json

import pytest

from output_writer import (OutputSpec, OutputWriter, Table, format_number, parse_csv_rows, render_csv,
                           render_json)
from pekeris_core import DomainError

TABLE = Table(("n", "energy_eV"), [[0, -4.476032519876], [1, -3.9637]], {"molecule": "H2", "N": 3})


@pytest.mark.parametrize("precision", [5, 18, 0])
def test_precision_bounds(precision):
    with pytest.raises(DomainError):
        OutputSpec(precision=precision)


def test_unknown_format():
    with pytest.raises(DomainError):
        OutputSpec(format="xlsx")


def test_stdout_destinations():
    assert OutputSpec().to_stdout
    assert OutputSpec(destination="-").to_stdout
    assert not OutputSpec(destination="out.csv").to_stdout


@pytest.mark.parametrize("value, precision, text", [
    (3, 6, "3"),
    (-4.476032519876, 6, "-4.47603"),
    (0.1 + 0.2, 17, "0.30000000000000004"),
    (float("nan"), 12, "nan"),
])
def test_format_number(value, precision, text):
    assert format_number(value, precision) == text


def test_csv_layout():
    text = render_csv([TABLE], 8)
    assert text.splitlines() == [
        "# molecule=H2",
        "# N=3",
        "n,energy_eV",
        "0,-4.4760325",
        "1,-3.9637",
    ]


@pytest.mark.parametrize("precision", [6, 12, 17])
def test_csv_parses_back_within_precision(precision):
    rows = parse_csv_rows(render_csv([TABLE], precision))
    value = float(rows[0]["energy_eV"])
    assert abs(value - TABLE.rows[0][1]) <= 10 ** (1 - precision) * abs(TABLE.rows[0][1])


def test_json_single_block():
    payload = json.loads(render_json([TABLE], 12))
    assert payload["meta"] == {"molecule": "H2", "N": 3}
    assert payload["rows"][0] == {"n": 0, "energy_eV": -4.47603251988}


def test_json_multiple_blocks():
    payload = json.loads(render_json([TABLE, TABLE], 12, meta={"command": "pekeris"}))
    assert payload["meta"] == {"command": "pekeris"}
    assert len(payload["blocks"]) == 2


def test_writer_to_stream():
    stream = io.StringIO()
    result = OutputWriter(OutputSpec(), stream=stream).write_tables([TABLE])
    assert result["success"] is True
    assert result["destination"] == "<stdout>"
    assert stream.getvalue().startswith("# molecule=H2\n")


def test_writer_to_file_creates_directories(tmp_path):
    target = tmp_path / "a" / "b" / "spectrum.json"
    result = OutputWriter(OutputSpec(format="json", destination=str(target))).write_tables([TABLE])
    assert result["success"] is True
    assert json.loads(target.read_text(encoding="utf-8"))["rows"][1]["n"] == 1


def test_writer_reports_unwritable_destination(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    result = OutputWriter(OutputSpec(destination=str(blocker / "out.csv"))).write_tables([TABLE])
    assert result["success"] is False
    assert "could not write output" in result["error"]
