import csv
import json
import subprocess
import sys

import pytest

from contactpaint.cli import main
from contactpaint.mission import run_mission
from contactpaint.scenario import bundled_path, parse_scenario

SMALL = """schema_version: 1
name: small
drawing: [[0.6, 1.0], [0.6, 1.4], [0.2, 1.0], [0.2, 1.4], [-0.2, 1.2], [-0.6, 1.2]]
true_gamma_deg: 10.0
"""


@pytest.fixture
def small(tmp_path):
    p = tmp_path / "small.yaml"
    p.write_text(SMALL)
    return p


def run_cli(*args):
    return main([str(a) for a in args])


def test_run_bundled_smoke(tmp_path):
    out = tmp_path / "out"
    assert run_cli(bundled_path("flat_gamma10.yaml"), "--out", out) == 0
    for f in ("report.csv", "summary.json", "events.csv", "drawing.svg", "wallmodel.svg"):
        assert (out / f).is_file()
    s = json.loads((out / "summary.json").read_text())
    assert s["rmse_cm"] > 0 and s["n_dots"] == 140
    assert s["config"]["true_gamma_deg"] == 10.0
    rows = list(csv.DictReader((out / "report.csv").open()))
    assert len(rows) == 141 and rows[0]["kind"] == "bootstrap"
    assert {"index", "ref_x_m", "applied_x_m", "error_cm", "gamma_hat_deg", "delta_hat_x_m", "delta_hat_y_m", "segment_id"} <= set(rows[0])


def test_bundled_name_resolution(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert run_cli("flat_gamma10", "--echo") == 0


def test_no_estimation_flag_echoed(small, tmp_path):
    out = tmp_path / "o"
    assert run_cli(small, "--no-estimation", "--seed", 7, "--localization", "noisy", "--out", out) == 0
    s = json.loads((out / "summary.json").read_text())
    assert s["estimation_enabled"] is False and s["config"]["estimation"] is False
    assert s["seed"] == 7 and s["localization"] == "noisy"


def test_json_format_and_telemetry(small, tmp_path):
    out = tmp_path / "o"
    assert run_cli(small, "--format", "json", "--telemetry", "--out", out) == 0
    rows = json.loads((out / "report.json").read_text())
    assert len(rows) == 7 and rows[1]["kind"] == "dot"
    tel = (out / "telemetry.csv").read_text().splitlines()
    assert tel[0].startswith("t_s,") and len(tel) > 100
    assert "contact" in (out / "telemetry.csv").read_text()


def test_svg_well_formed(small, tmp_path):
    import xml.dom.minidom

    out = tmp_path / "o"
    run_cli(small, "--out", out)
    for f in ("drawing.svg", "wallmodel.svg"):
        doc = xml.dom.minidom.parse(str(out / f))
        assert doc.documentElement.tagName == "svg"
        assert doc.getElementsByTagName("circle")


@pytest.mark.parametrize("body", ["schema_version: 1\ntrue_gamma_deg: [1\n", "schema_version: 1\nunknown: 3\n", "nope: 1\n"])
def test_malformed_scenario_writes_nothing(tmp_path, capsys, body):
    bad = tmp_path / "bad.yaml"
    bad.write_text(body)
    out = tmp_path / "out"
    assert run_cli(bad, "--out", out) != 0
    assert not out.exists()
    assert "bad.yaml" in capsys.readouterr().err


def test_missing_scenario_arg(capsys):
    assert main([]) != 0


def test_report_bytes_deterministic(small, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    run_cli(small, "--localization", "noisy", "--seed", 4, "--out", a)
    run_cli(small, "--localization", "noisy", "--seed", 4, "--out", b)
    assert (a / "report.csv").read_bytes() == (b / "report.csv").read_bytes()
    assert (a / "summary.json").read_bytes() == (b / "summary.json").read_bytes()


def test_single_cell_sweep_equals_run(small, tmp_path):
    sw = tmp_path / "sw.yaml"
    sw.write_text("schema_version: 1\ngamma_deg: [10]\nseeds: [3]\ncolumns: [est_noisy]\n")
    out = tmp_path / "o"
    assert run_cli(small, "--sweep", sw, "--out", out) == 0
    rows = list(csv.DictReader((out / "table.csv").open()))
    assert len(rows) == 1
    direct = run_mission(parse_scenario(SMALL).with_overrides(seed=3, localization="noisy").config)
    assert float(rows[0]["est_noisy"]) == pytest.approx(direct.rmse_cm, abs=1e-4)


def test_gamma_sweep_table_shape_and_repeatability(small, tmp_path):
    sw = tmp_path / "sw.yaml"
    sw.write_text("schema_version: 1\ngamma_deg: [-15, -10, 0, 10, 15]\nseeds: 2\n")
    a, b = tmp_path / "a", tmp_path / "b"
    assert run_cli(small, "--sweep", sw, "--out", a) == 0
    assert run_cli(small, "--sweep", sw, "--out", b) == 0
    rows = list(csv.reader((a / "table.csv").open()))
    assert rows[0] == ["config", "est_noisy", "est_gt", "noest_gt"]
    assert [r[0] for r in rows[1:]] == ["-15", "-10", "0", "+10", "+15"]
    assert (a / "table.csv").read_bytes() == (b / "table.csv").read_bytes()
    cells = list(csv.DictReader((a / "cells.csv").open()))
    assert len(cells) == 5 * 3 * 2


def test_segment_sweep_table_shape(tmp_path):
    base = tmp_path / "seg.yaml"
    base.write_text(SMALL.replace("true_gamma_deg: 10.0", "true_gamma_deg: 0.0"))
    sw = tmp_path / "sw.yaml"
    sw.write_text(bundled_path("sweep_segments.yaml").read_text().replace("seeds: 10", "seeds: 1"))
    out = tmp_path / "o"
    assert run_cli(base, "--sweep", sw, "--format", "json", "--out", out) == 0
    t = json.loads((out / "table.json").read_text())
    assert [r["config"] for r in t["rows"]] == ["-10|0|+10", "-15|0|+15", "+10|0|+10", "-10|0|-10"]
    assert all(set(r) >= {"est_noisy", "est_gt", "noest_gt"} for r in t["rows"])


def test_sweep_cell_failures_reported(small, tmp_path):
    base = tmp_path / "b.yaml"
    base.write_text(SMALL + "controller:\n  max_approach_distance_m: 0.2\n")
    sw = tmp_path / "sw.yaml"
    sw.write_text("schema_version: 1\ngamma_deg: [0]\nseeds: 1\ncolumns: [est_gt]\n")
    out = tmp_path / "o"
    assert run_cli(base, "--sweep", sw, "--format", "json", "--out", out) == 0
    t = json.loads((out / "table.json").read_text())
    assert t["rows"][0]["est_gt"] is None and t["rows"][0]["failures"]["est_gt"] == 1


@pytest.mark.parametrize("body", ["schema_version: 1\nseeds: 2\n", "schema_version: 1\ngamma_deg: [1]\nseeds: -1\n", "schema_version: 1\ngamma_deg: [1]\ncolumns: [ptam]\n", "schema_version: 1\ngamma_deg: [1]\nsegment_angles_deg: [[0]]\n"])
def test_bad_sweep_file(small, tmp_path, body):
    sw = tmp_path / "sw.yaml"
    sw.write_text(body)
    out = tmp_path / "o"
    assert run_cli(small, "--sweep", sw, "--out", out) != 0
    assert not out.exists()


def test_console_script(small, tmp_path):
    out = tmp_path / "o"
    r = subprocess.run([sys.executable, "-m", "contactpaint.cli", str(small), "--out", str(out)], capture_output=True, text=True)
    assert r.returncode == 0, r.stderr
    assert "rmse" in r.stdout


def test_bundled_sweep_name_resolves():
    from contactpaint.cli import resolve_scenario

    assert resolve_scenario("sweep_gamma") == bundled_path("sweep_gamma.yaml")


def test_split_events_logged(tmp_path):
    out = tmp_path / "out"
    assert run_cli(bundled_path("segments_m10_0_p10.yaml"), "--out", out) == 0
    kinds = [r["kind"] for r in csv.DictReader((out / "events.csv").open())]
    s = json.loads((out / "summary.json").read_text())
    assert kinds.count("split") == len(s["wall_model"]) - 1 == 2
