import csv
import io
import json

import pytest

from nativeswap import __version__
from nativeswap.device import speedup_table
from nativeswap.report import Report, ReportError, emit_report, report_json, rows_to_csv


def _speedup_report(casablanca):
    rows, mean = speedup_table(casablanca)
    return Report("speedups", rows, {"device": casablanca.name}, seed=3, extra={"mean_optimized_speedup": mean})


def test_csv_columns_and_values(casablanca):
    text = rows_to_csv(_speedup_report(casablanca).rows)
    rows = list(csv.DictReader(io.StringIO(text)))
    assert list(rows[0]) == ["control", "target", "t1q_dt", "tcr_dt", "orientation_speedup", "optimized_speedup"]
    assert float(rows[-1]["optimized_speedup"]) == pytest.approx(4448 / 3968, rel=1e-15)
    assert text.endswith("\n") and "\r" not in text


def test_json_echoes_config(casablanca):
    doc = json.loads(report_json(_speedup_report(casablanca)))
    assert doc["toolkit_version"] == __version__
    assert doc["seed"] == 3 and doc["config"] == {"device": "casablanca-sim"}
    assert len(doc["rows"]) == 6 and "mean_optimized_speedup" in doc


def test_emission_is_byte_identical(tmp_path, casablanca):
    rep = _speedup_report(casablanca)
    a = emit_report(rep, tmp_path / "a", "speedups")
    b = emit_report(rep, tmp_path / "b", "speedups")
    assert [p.name for p in a] == ["speedups.csv", "speedups.json", "speedups_speedup_hist.png"]
    for pa, pb in zip(a, b):
        assert pa.read_bytes() == pb.read_bytes()


def test_bench_figure(tmp_path):
    rows = [{"n": n, "strategy": s, "success": 1 - n * (0.03 if s == "slow" else 0.02)}
            for n in (2, 3) for s in ("slow", "optimized")]
    paths = emit_report(Report("bench", rows), tmp_path, "bench")
    assert paths[-1].name == "bench_success.png"
    assert emit_report(Report("bench", rows), tmp_path, "plain", figures=False)[-1].suffix == ".json"


def test_empty_results_rejected(tmp_path):
    with pytest.raises(ReportError, match="empty"):
        emit_report(Report("speedups", []), tmp_path, "x")


def test_unwritable_target(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    with pytest.raises(ReportError, match="cannot write"):
        emit_report(Report("model", [{"a": 1}]), blocker / "sub", "x")
