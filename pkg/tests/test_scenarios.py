import json

import numpy as np
import pytest

from cpilab import scanio, scenarios
from cpilab.errors import ConfigError


QUANTUM_STYLE = {
    "name": "qdemo",
    "source": {
        "lambda_c_nm": 790.0,
        "bandwidth_nm": 11.0,
        "stretched_ps": 54.0,
        "grid": {"points": 2049, "halfwidth_factor": 5.0},
    },
    "sample": {"interfaces": [{"r_real": 0.2}], "gaps": []},
    "mode": ["qoct", "cw_swept"],
    "effective": {"shape": "gaussian", "fwhm_nm": 11.0},
    "x_grid": {"start_um": -80.0, "stop_um": 80.0, "step_um": 0.2},
}


def test_given_spectrum_modes_run(tmp_path):
    cfg = scenarios.parse_config(json.loads(json.dumps(QUANTUM_STYLE)))
    summary = scenarios.run_scenario(cfg, tmp_path)
    qoct = scanio.read_scan(tmp_path / "qdemo_qoct.csv")
    cw = scanio.read_scan(tmp_path / "qdemo_cw_swept.csv")
    assert qoct.kind == "QOCT"
    assert cw.kind == "CPI"
    # identical Gaussian kernels: the same dip up to the kind tag
    assert np.array_equal(qoct.signal, cw.signal)
    assert abs(qoct.signal[np.where(qoct.x_um == 0.0)[0][0]]) < 1e-12
    assert set(summary["scans"]) == {"qoct", "cw_swept"}


def test_effective_section_required(tmp_path):
    broken = json.loads(json.dumps(QUANTUM_STYLE))
    del broken["effective"]
    with pytest.raises(ConfigError, match="effective"):
        scenarios.parse_config(broken)


def test_bulk_delay_center_requires_bulk():
    cfg = json.loads(json.dumps(QUANTUM_STYLE))
    cfg["mode"] = ["cpi"]
    del cfg["effective"]
    cfg["x_grid"]["center"] = "bulk_delay"
    parsed = scenarios.parse_config(cfg)
    with pytest.raises(ConfigError, match="bulk"):
        scenarios.run_scenario(parsed, ".", modes=("cpi",))


def test_sweep_config_needs_enough_wavelengths():
    cfg = json.loads(json.dumps(QUANTUM_STYLE))
    cfg["mode"] = ["sweep"]
    del cfg["effective"]
    cfg["sweep"] = {"lambda0_list_nm": [790.0, 790.2]}
    with pytest.raises(ConfigError, match="at least 3"):
        scenarios.parse_config(cfg)


def test_preset_fields_round_trip():
    for name in scenarios.preset_names():
        cfg = scenarios.load_preset(name)
        assert cfg.name == name
        assert scenarios.scenario_hash(cfg)


def test_plot_outputs(tmp_path):
    pytest.importorskip("matplotlib")
    cfg = json.loads(json.dumps(QUANTUM_STYLE))
    cfg["mode"] = ["cpi"]
    del cfg["effective"]
    parsed = scenarios.parse_config(cfg, name="qdemo")
    summary = scenarios.run_scenario(parsed, tmp_path, plot=True)
    assert (tmp_path / "qdemo_cpi.svg").exists()
    assert any(str(p).endswith(".svg") for p in summary["outputs"])
