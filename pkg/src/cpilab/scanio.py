"""Scan persistence (CSV) and report emission (JSON).

Scan files are plain two-column CSV with a version header:

    # cpi-lab scan v1
    # kind: CPI
    # omega0_rad_per_s: 2.3826825681033005e+15
    # scenario: fig2a
    # hash: 0123456789ab
    x_um,signal
    -100,1.0000000000000002

Floats are serialised with 17 significant digits so a write/read round
trip is bitwise exact. Writes go through a temp file and rename so a
crashed run never leaves a truncated scan behind.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

import numpy as np

from .constants import TWO_PI, C_VACUUM
from .engine import Interferogram
from .errors import ScanFormatError

__all__ = ["write_scan", "read_scan", "write_json", "feature_report", "sweep_report"]

SCAN_VERSION_LINE = "# cpi-lab scan v1"
_COLUMNS = "x_um,signal"


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def write_scan(
    path: str | Path,
    scan: Interferogram,
    scenario: str | None = None,
    scenario_hash: str | None = None,
) -> Path:
    path = Path(path)
    lines = [SCAN_VERSION_LINE, f"# kind: {scan.kind}"]
    omega0 = scan.meta.get("omega0")
    if omega0 is not None:
        lines.append(f"# omega0_rad_per_s: {_fmt(omega0)}")
    if scenario:
        lines.append(f"# scenario: {scenario}")
    if scenario_hash:
        lines.append(f"# hash: {scenario_hash}")
    lines.append(_COLUMNS)
    lines.extend(f"{_fmt(x)},{_fmt(s)}" for x, s in zip(scan.x_um, scan.signal))
    _atomic_write(path, "\n".join(lines) + "\n")
    return path


def read_scan(path: str | Path) -> Interferogram:
    path = Path(path)
    try:
        raw = path.read_text()
    except OSError as exc:
        raise ScanFormatError(f"cannot read scan file {path}: {exc}") from exc
    lines = raw.splitlines()
    if not lines or lines[0].strip() != SCAN_VERSION_LINE:
        raise ScanFormatError(
            f"{path}: missing or unsupported version header (expected {SCAN_VERSION_LINE!r})"
        )
    meta: dict = {}
    kind = "CPI"
    body_start = None
    for i, line in enumerate(lines[1:], start=2):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            content = stripped.lstrip("#").strip()
            if ":" in content:
                key, value = (part.strip() for part in content.split(":", 1))
                if key == "kind":
                    kind = value
                elif key == "omega0_rad_per_s":
                    try:
                        meta["omega0"] = float(value)
                    except ValueError as exc:
                        raise ScanFormatError(f"{path}: line {i}: bad omega0 value") from exc
                else:
                    meta[key] = value
            continue
        body_start = i
        break
    if body_start is None:
        raise ScanFormatError(f"{path}: no data rows")
    header = lines[body_start - 1].strip()
    if header.replace(" ", "") != _COLUMNS:
        raise ScanFormatError(
            f"{path}: line {body_start}: expected column header {_COLUMNS!r}, got {header!r}"
        )
    xs, ss = [], []
    for i, line in enumerate(lines[body_start:], start=body_start + 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        parts = stripped.split(",")
        if len(parts) != 2:
            raise ScanFormatError(f"{path}: line {i}: expected two comma-separated values")
        try:
            xs.append(float(parts[0]))
            ss.append(float(parts[1]))
        except ValueError as exc:
            raise ScanFormatError(f"{path}: line {i}: malformed number") from exc
        if not np.isfinite(ss[-1]) or not np.isfinite(xs[-1]):
            raise ScanFormatError(f"{path}: line {i}: non-finite value")
    x = np.array(xs)
    s = np.array(ss)
    if x.size == 0:
        raise ScanFormatError(f"{path}: no data rows")
    if np.any(np.diff(x) <= 0.0):
        bad = int(np.argmax(np.diff(x) <= 0.0)) + body_start + 1
        raise ScanFormatError(f"{path}: line {bad + 1}: delay axis not strictly increasing")
    return Interferogram(kind=kind, x_um=x, signal=s, meta=meta)


def write_json(path: str | Path, payload: dict) -> Path:
    path = Path(path)
    _atomic_write(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return path


def feature_report(kind: str, omega0: float | None, features) -> dict:
    """Report schema: {kind, omega0_nm, features: [...]} with per-feature
    center_um, fwhm_um, visibility, polarity, classification."""
    return {
        "kind": kind,
        "omega0_nm": (TWO_PI * C_VACUUM / omega0 * 1e9) if omega0 else None,
        "features": [
            {
                "center_um": f.center_um,
                "fwhm_um": f.fwhm_um,
                "visibility": f.visibility,
                "polarity": f.polarity,
                "classification": f.classification,
            }
            for f in features
        ],
    }


def sweep_report(result, predicted_period_nm: float | None, features) -> dict:
    return {
        "points": [{"lambda0_nm": l, "visibility": v} for l, v in result.points],
        "fitted_period_nm": result.fitted_period,
        "fitted_phase_rad": result.fitted_phase,
        "period_ci_nm": result.period_ci,
        "amplitude": result.amplitude,
        "predicted_period_nm": predicted_period_nm,
        "features": [
            {
                "center_um": f.center_um,
                "fwhm_um": f.fwhm_um,
                "visibility": f.visibility,
                "polarity": f.polarity,
                "classification": f.classification,
            }
            for f in features
        ],
    }
