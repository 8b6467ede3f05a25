import csv
import json
import math

import pytest

from conftest import edit_csv
from lcburden import simulate
from lcburden.aggregation import table_rows
from lcburden.cli import main
from lcburden.report import (
    INTERMEDIATE_TABLES,
    RUN_TABLES,
    Table,
    render_csv,
    render_json,
    render_md,
    burden_summary,
    burden_intervals,
)


def _csv_rows(path):
    with open(path, newline="", encoding="utf-8") as handle:
        return list(csv.DictReader(handle))


def test_csv_and_json_carry_the_same_numbers(result):
    t = burden_summary(result)
    rows = list(csv.DictReader(render_csv(t).splitlines()))
    doc = json.loads(render_json(t))
    assert len(rows) == len(doc["rows"]) == len(t.rows)
    for from_csv, from_json in zip(rows, doc["rows"]):
        for column in t.columns[1:]:
            value = from_json[column]
            if value is None:
                assert from_csv[column] == ""
            else:
                assert float(from_csv[column]) == value


def test_nan_rendering():
    t = Table("t", ("a", "b"), [("x", math.nan)])
    assert render_csv(t) == "a,b\nx,\n"
    assert json.loads(render_json(t))["rows"] == [{"a": "x", "b": None}]
    assert "| x | - |" in render_md(t)


def test_markdown_rounding(result):
    md = render_md(burden_summary(result))
    line = next(x for x in md.splitlines() if x.startswith("| incident/NSCLC/IV |"))
    cells = [c.strip() for c in line.strip("|").split("|")]
    assert cells[3] == "5,661"
    assert cells[6] == "211.49"


def test_run_writes_every_table(bundle_path, tmp_path, result):
    out = tmp_path / "out"
    assert main(["run", str(bundle_path), "--out", str(out), "--dump-intermediates"]) == 0
    names = {build(result).name for build in RUN_TABLES + INTERMEDIATE_TABLES}
    for name in names:
        for fmt in ("csv", "json", "md"):
            assert (out / f"{name}.{fmt}").exists()


def test_cli_numbers_equal_the_library(bundle_path, tmp_path, result):
    out = tmp_path / "out"
    assert main(["run", str(bundle_path), "--out", str(out), "--format", "csv"]) == 0
    assert not (out / "burden_summary.json").exists()
    rows = {r["row"]: r for r in _csv_rows(out / "burden_summary.csv")}
    for label, values in table_rows(result.report).items():
        for column, value in values.items():
            assert float(rows[label][column]) == value


def test_prevalence_metadata(bundle_path, tmp_path, result):
    out = tmp_path / "out"
    main(["run", str(bundle_path), "--out", str(out), "--format", "json",
          "--dump-intermediates"])
    doc = json.loads((out / "prevalence_by_year.json").read_text())
    assert doc["metadata"]["f1"] == result.calibration.f1
    assert doc["metadata"]["f2to5"] == result.calibration.f2to5


def test_validate_exit_codes(bundle_path, bundle_copy, tmp_path, capsys):
    assert main(["validate", str(bundle_path)]) == 0
    assert main(["validate", str(tmp_path / "absent")]) == 1
    edit_csv(bundle_copy / "survival.csv", "NSCLC,I,2,0.575", "NSCLC,I,2,57.5%")
    assert main(["validate", str(bundle_copy)]) == 2
    assert "survival.csv:3 [probability]" in capsys.readouterr().err


def test_validation_errors_exit_2_and_write_report(bundle_copy, tmp_path, capsys):
    edit_csv(bundle_copy / "disability_weights.csv", "0.288", "1.288")
    report = tmp_path / "report.txt"
    assert main(["validate", str(bundle_copy), "--report", str(report)]) == 2
    assert "disability weight" in report.read_text()
    assert "error:" in capsys.readouterr().err
    assert main(["run", str(bundle_copy), "--out", str(tmp_path / "o")]) == 2


def test_missing_table_is_invalid(bundle_copy, tmp_path):
    (bundle_copy / "epi.csv").unlink()
    assert main(["run", str(bundle_copy), "--out", str(tmp_path / "o")]) == 2


def test_unwritable_output_is_io_error(bundle_path, tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert main(["run", str(bundle_path), "--out", str(blocker / "sub")]) == 1


def test_bad_arguments_exit_via_argparse(bundle_path, tmp_path):
    with pytest.raises(SystemExit):
        main(["run", str(bundle_path), "--out", str(tmp_path), "--format", "xml"])
    with pytest.raises(SystemExit):
        main(["simulate", str(bundle_path), "--out", str(tmp_path), "--percentiles", "90,10"])


def test_simulate_matches_library(bundle, bundle_path, tmp_path):
    out = tmp_path / "sim"
    assert main(["simulate", str(bundle_path), "--out", str(out), "--iterations", "30",
                 "--seed", "9", "--percentiles", "5,95", "--format", "csv,json"]) == 0
    summary = simulate(bundle, 30, 9, percentiles=(5.0, 95.0))
    expected = render_csv(burden_intervals(summary))
    assert (out / "burden_intervals.csv").read_text() == expected
    meta = json.loads((out / "burden_intervals.json").read_text())["metadata"]
    assert meta == {"iterations": 30, "seed": 9, "percentiles": [5.0, 95.0]}


def test_emitted_csv_uses_bundle_numeric_conventions(bundle_path, tmp_path):
    out = tmp_path / "out"
    main(["run", str(bundle_path), "--out", str(out), "--format", "csv"])
    for path in out.glob("*.csv"):
        raw = path.read_bytes()
        raw.decode("utf-8")
        for row in _csv_rows(path):
            for value in row.values():
                if value and value[0].isdigit():
                    assert "," not in value and "%" not in value
                    float(value)
