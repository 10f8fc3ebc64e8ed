import json
import subprocess
import sys

import pytest

from cpilab import scenarios
from cpilab.cli import main

TINY = {
    "name": "tiny",
    "source": {
        "lambda_c_nm": 790.0,
        "bandwidth_nm": 11.0,
        "stretched_ps": 54.0,
        "grid": {"points": 2049, "halfwidth_factor": 5.0},
    },
    "sample": {"interfaces": [{"r_real": 0.2}], "gaps": []},
    "mode": ["cpi"],
    "x_grid": {"start_um": -80.0, "stop_um": 80.0, "step_um": 0.2},
}


def write_config(tmp_path, data, name="tiny.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return path


def test_materials_list(capsys):
    assert main(["materials", "list"]) == 0
    out = capsys.readouterr().out
    for name in ("vacuum", "fused_silica", "bk7", "calcite_o"):
        assert name in out


def test_simulate_with_config(tmp_path, capsys):
    cfg = write_config(tmp_path, TINY)
    assert main(["simulate", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert (tmp_path / "tiny_cpi.csv").exists()
    assert (tmp_path / "tiny_report.json").exists()
    assert "dip" in out
    report = json.loads((tmp_path / "tiny_report.json").read_text())
    assert report["cpi"]["features"][0]["polarity"] == "dip"


def test_unknown_scenario_exits_2(tmp_path, capsys):
    assert main(["simulate", "--scenario", "nope", "--out", str(tmp_path)]) == 2
    err = capsys.readouterr().err
    assert err.startswith("error:")
    assert err.count("\n") == 1


def test_unknown_config_key_exits_2(tmp_path, capsys):
    cfg = write_config(tmp_path, {**TINY, "typo_section": {}})
    assert main(["simulate", "--config", str(cfg), "--out", str(tmp_path)]) == 2
    assert "typo_section" in capsys.readouterr().err


def test_numeric_contract_exits_3(tmp_path, capsys):
    bad = json.loads(json.dumps(TINY))
    bad["mode"] = ["wli"]  # 0.2 um step undersamples the carrier
    cfg = write_config(tmp_path, bad)
    assert main(["simulate", "--config", str(cfg), "--out", str(tmp_path)]) == 3
    assert capsys.readouterr().err.startswith("error:")


def test_lambda0_override(tmp_path, capsys):
    cfg = write_config(tmp_path, TINY)
    assert main([
        "simulate", "--config", str(cfg), "--out", str(tmp_path), "--lambda0-nm", "792.1",
    ]) == 0
    assert "792.1" in capsys.readouterr().out


def test_analyze_round_trip(tmp_path, capsys):
    cfg = write_config(tmp_path, TINY)
    main(["simulate", "--config", str(cfg), "--out", str(tmp_path)])
    capsys.readouterr()
    assert main(["analyze", str(tmp_path / "tiny_cpi.csv")]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["kind"] == "CPI"
    assert len(report["features"]) == 1


def test_analyze_rejects_headerless_file(tmp_path, capsys):
    path = tmp_path / "raw.csv"
    path.write_text("x_um,signal\n0,1\n1,1\n")
    assert main(["analyze", str(path)]) == 2
    assert capsys.readouterr().err.startswith("error:")


def test_outputs_are_deterministic(tmp_path):
    cfg = write_config(tmp_path, TINY)
    out1 = tmp_path / "run1"
    out2 = tmp_path / "run2"
    main(["simulate", "--config", str(cfg), "--out", str(out1)])
    main(["simulate", "--config", str(cfg), "--out", str(out2)])
    for name in ("tiny_cpi.csv", "tiny_report.json"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


def test_scenario_hash_tracks_physics_only():
    base = scenarios.parse_config(json.loads(json.dumps(TINY)))
    h0 = scenarios.scenario_hash(base)

    cfg = json.loads(json.dumps(TINY))
    cfg["x_grid"]["step_um"] = 0.1
    assert scenarios.scenario_hash(scenarios.parse_config(cfg)) != h0

    cfg = json.loads(json.dumps(TINY))
    cfg["output"] = {"dir": "elsewhere"}
    cfg["name"] = "renamed"
    assert scenarios.scenario_hash(scenarios.parse_config(cfg)) == h0


def test_simulate_preset_through_cli(tmp_path, capsys):
    assert main(["simulate", "--scenario", "fig4a", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "fig4a" in out
    assert (tmp_path / "fig4a_cpi.csv").exists()
    assert (tmp_path / "fig4a_report.json").exists()


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "cpilab.cli", "materials", "list"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert "fused_silica" in proc.stdout


def test_hash_appears_in_scan_header(tmp_path):
    cfg = write_config(tmp_path, TINY)
    main(["simulate", "--config", str(cfg), "--out", str(tmp_path)])
    parsed = scenarios.parse_config(json.loads(json.dumps(TINY)))
    text = (tmp_path / "tiny_cpi.csv").read_text()
    assert f"# hash: {scenarios.scenario_hash(parsed)}" in text
