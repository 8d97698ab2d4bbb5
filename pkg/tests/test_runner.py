"""Config parsing, artifact formats, sweeps, CLI exit codes."""

import copy
import json
import subprocess
import sys

import numpy as np
import pytest

from kmwave import cli, runner
from kmwave.errors import ConfigurationError

FAST_CFG = {
    "equation": {"alpha": 1.0, "beta": 0.0, "nu": 0.0},
    "initial_data": {"kind": "sine"},
    "grid": {"n_points": 256},
    "time": {"t_end": 0.3},
    "monitors": {"g5": {"enabled": False}},
}


def _cfg(extra=None):
    data = copy.deepcopy(FAST_CFG)
    if extra:
        for k, v in extra.items():
            data.setdefault(k, {}).update(v)
    return runner.parse_config(json.dumps(data))


def test_defaults_are_echoed():
    cfg = runner.parse_config("{}")
    assert cfg["time"]["cfl"] == 0.5
    assert cfg["monitors"]["nesting"]["gamma"] == pytest.approx(1.0 / 3.0)
    assert cfg["outputs"]["csv_path"] is None


def test_unknown_keys_listed():
    with pytest.raises(ConfigurationError) as exc:
        runner.parse_config('{"tme": {}, "grd": {}}')
    assert "grd" in str(exc.value) and "tme" in str(exc.value)


def test_invariant_errors_name_field():
    with pytest.raises(ConfigurationError, match="n_points"):
        runner.parse_config('{"grid": {"n_points": 48}}')
    with pytest.raises(ConfigurationError, match="cfl"):
        runner.parse_config('{"time": {"cfl": 2.0}}')
    with pytest.raises(ConfigurationError, match="samples"):
        runner.parse_config('{"initial_data": {"kind": "custom_samples"}}')


def test_custom_samples_field():
    n = 64
    vals = list(np.sin(np.linspace(-np.pi, np.pi, n, endpoint=False)))
    cfg = runner.parse_config(json.dumps({
        "initial_data": {"kind": "custom_samples", "samples": vals},
        "grid": {"n_points": n},
    }))
    u = runner.build_initial_field(cfg)
    assert np.allclose(u.values, vals)


def test_csv_schema(tmp_path):
    out = tmp_path / "run.csv"
    cfg = _cfg({"outputs": {"csv_path": str(out)}})
    runner.run_scenario(cfg)
    lines = out.read_text().splitlines()
    assert lines[0] == "# schema_version=1"
    assert lines[1] == ",".join(runner.CSV_COLUMNS)
    first = lines[2].split(",")
    assert len(first) == len(runner.CSV_COLUMNS)
    assert float(first[0]) == 0.0


def test_report_json_contains_config(tmp_path):
    out = tmp_path / "run.json"
    cfg = _cfg({"outputs": {"json_path": str(out)}})
    runner.run_scenario(cfg)
    rep = json.loads(out.read_text())
    assert rep["schema_version"] == 1
    assert rep["config"]["time"]["cfl"] == 0.5  # default echoed
    assert rep["breaking"]["verdict"] in ("breaking", "no_breaking")


def test_svg_emission(tmp_path):
    out = tmp_path / "plot.svg"
    runner.emit_plot({"y": ([0.0, 1.0], [2.0, 3.0])}, str(out),
                     bracket=(0.2, 0.4))
    text = out.read_text()
    assert text.startswith("<svg")
    assert "polyline" in text
    # degenerate single point must still render
    single = tmp_path / "single.svg"
    runner.emit_plot({"y": ([1.0], [1.0])}, str(single))
    assert "circle" in single.read_text()


def test_sweep_rows_ordered_and_isolated(tmp_path, monkeypatch):
    monkeypatch.setenv("KMWAVE_WORKERS", "2")
    out = tmp_path / "sweep.csv"
    cfg = _cfg()
    rows = runner.sweep(cfg, "initial_data.amplitude", [2.0, 0.5, 1.0],
                        csv_path=str(out))
    assert [r["value"] for r in rows] == [0.5, 1.0, 2.0]
    assert all(r["error"] is None for r in rows)
    assert out.read_text().startswith("# schema_version=1")
    with pytest.raises(ConfigurationError):
        runner.sweep(cfg, "no.such.axis", [1.0])


def test_sweep_captures_per_row_failure():
    cfg = _cfg()
    rows = runner.sweep(cfg, "grid.half_length", [-1.0, 3.141592653589793])
    assert rows[0]["error"] is not None
    assert rows[1]["error"] is None


def test_cli_exit_codes(tmp_path):
    good = tmp_path / "good.json"
    good.write_text(json.dumps(FAST_CFG))
    assert cli.main(["run", str(good)]) == 0
    bad = tmp_path / "bad.json"
    bad.write_text('{"grid": {"n_points": 7}}')
    assert cli.main(["run", str(bad)]) == 2
    assert cli.main(["run", str(tmp_path / "missing.json")]) == 2
    assert cli.main(["stirling", "--to", "20"]) == 0


def test_cli_module_invocation(tmp_path):
    good = tmp_path / "good.json"
    good.write_text(json.dumps(FAST_CFG))
    proc = subprocess.run([sys.executable, "-m", "kmwave", "run", str(good)],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["schema_version"] == 1
