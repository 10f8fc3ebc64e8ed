import numpy as np
import pytest

from cpilab.engine import Interferogram
from cpilab.errors import ScanFormatError
from cpilab.scanio import feature_report, read_scan, write_scan, write_json
from cpilab.analysis import Feature


def sample_scan():
    x = np.arange(-10.0, 10.0, 0.37)
    s = 1.0 + 0.1 * np.sin(x * 1.7) + 1e-13 * x
    return Interferogram(kind="CPI", x_um=x, signal=s, meta={"omega0": 2.3826e15})


def test_round_trip_is_bitwise(tmp_path):
    scan = sample_scan()
    path = tmp_path / "scan.csv"
    write_scan(path, scan, scenario="demo", scenario_hash="abc123")
    back = read_scan(path)
    assert np.array_equal(back.x_um, scan.x_um)
    assert np.array_equal(back.signal, scan.signal)
    assert back.kind == "CPI"
    assert back.meta["omega0"] == scan.meta["omega0"]
    assert back.meta["scenario"] == "demo"


def test_write_is_deterministic(tmp_path):
    scan = sample_scan()
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    write_scan(a, scan)
    write_scan(b, scan)
    assert a.read_bytes() == b.read_bytes()


def test_missing_version_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("x_um,signal\n0,1\n1,1\n")
    with pytest.raises(ScanFormatError, match="version"):
        read_scan(path)
    path.write_text("# cpi-lab scan v99\nx_um,signal\n0,1\n")
    with pytest.raises(ScanFormatError, match="version"):
        read_scan(path)


def test_external_fixture_ingests(tmp_path):
    path = tmp_path / "external.csv"
    path.write_text(
        "# cpi-lab scan v1\n"
        "# produced by a motor controller export\n"
        "x_um,signal\n"
        "0.0,1.01\n"
        "0.5,0.62\n"
        "1.0,0.99\n"
    )
    scan = read_scan(path)
    assert scan.kind == "CPI"  # default when the header does not say
    assert scan.x_um.size == 3
    assert scan.signal[1] == 0.62


def test_malformed_row_reports_line_number(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("# cpi-lab scan v1\nx_um,signal\n0,1\n1,banana\n")
    with pytest.raises(ScanFormatError, match="line 4"):
        read_scan(path)
    path.write_text("# cpi-lab scan v1\nx_um,signal\n0,1,2\n")
    with pytest.raises(ScanFormatError, match="line 3"):
        read_scan(path)


def test_non_monotonic_axis_rejected(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("# cpi-lab scan v1\nx_um,signal\n0,1\n2,1\n1,1\n")
    with pytest.raises(ScanFormatError, match="increasing"):
        read_scan(path)


def test_feature_report_schema():
    feats = [Feature(center_um=1.0, fwhm_um=2.0, visibility=-0.5, polarity="dip")]
    report = feature_report("CPI", 2.3826e15, feats)
    assert set(report) == {"kind", "omega0_nm", "features"}
    assert set(report["features"][0]) == {
        "center_um", "fwhm_um", "visibility", "polarity", "classification"
    }
    assert report["features"][0]["classification"] == "unknown"


def test_write_json_deterministic(tmp_path):
    payload = {"b": 2, "a": [1.5, {"z": 0.1}]}
    p1 = tmp_path / "r1.json"
    p2 = tmp_path / "r2.json"
    write_json(p1, payload)
    write_json(p2, payload)
    assert p1.read_bytes() == p2.read_bytes()
