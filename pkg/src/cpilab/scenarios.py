"""Scenario configuration and execution.

A scenario is a JSON document describing the source pair, the sample,
the scan modes to run, and the delay grid. Validation is strict: unknown
keys are rejected with the offending config path, since a typo silently
changing the physics is worse than a hard error.

Bundled presets reproduce the headline measurements: ``fig2a`` (coverslip
without extra dispersion, chirped-pulse + white-light scans), ``fig2b``
(with the calcite blocks), ``fig3`` (SFG spectrogram plus narrowband
detection), ``fig4a``/``fig4b`` (constructive / destructive artifact),
and ``fig4sweep`` (artifact visibility versus operating wavelength).
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from . import analysis, engine, scanio, spectra
from .constants import C_VACUUM, TWO_PI
from .errors import ConfigError, ContractError
from .materials import (
    DispersiveMaterial,
    get_material,
    material_from_dict,
    phase_expansion,
)
from .sample import BulkElement, Interface, LayerStack, transfer_function
from .spectra import ChirpedPulsePair

__all__ = ["ScenarioConfig", "parse_config", "load_config_file", "preset_names",
           "load_preset", "run_scenario", "scenario_hash"]

MODES = ("cpi", "wli", "qoct", "cw_swept", "spectrogram", "sweep")

_PHYSICS_KEYS = ("source", "sample", "mode", "x_grid", "sweep", "filter",
                 "spectrogram", "effective", "materials")


def _require_keys(obj: dict, allowed: set[str], required: set[str], where: str) -> None:
    if not isinstance(obj, dict):
        raise ConfigError(f"{where}: expected an object")
    unknown = set(obj) - allowed
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")
    missing = required - set(obj)
    if missing:
        raise ConfigError(f"{where}: missing keys {sorted(missing)}")


def _number(obj: dict, key: str, where: str, default=None, positive=False):
    if key not in obj or obj[key] is None:
        if default is None and key in obj:
            return None
        return default
    value = obj[key]
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ConfigError(f"{where}.{key}: expected a number")
    if positive and value <= 0:
        raise ConfigError(f"{where}.{key}: must be positive")
    return float(value)


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    raw: dict
    modes: tuple[str, ...]
    materials: dict[str, DispersiveMaterial]
    output_dir: str | None = None


def parse_config(data: dict, name: str = "scenario") -> ScenarioConfig:
    """Validate a scenario document and resolve its materials."""
    allowed = set(_PHYSICS_KEYS) | {"name", "output"}
    _require_keys(data, allowed, {"source", "mode", "x_grid"}, "config")
    name = data.get("name", name)

    mode_raw = data["mode"]
    modes = (mode_raw,) if isinstance(mode_raw, str) else tuple(mode_raw)
    for m in modes:
        if m not in MODES:
            raise ConfigError(f"config.mode: unknown mode {m!r} (choose from {MODES})")
    if not modes:
        raise ConfigError("config.mode: at least one mode required")

    src = data["source"]
    _require_keys(
        src,
        {"lambda_c_nm", "bandwidth_nm", "stretched_ps", "tau_rel_fs", "tl_fs",
         "grid", "lambda0_nm"},
        {"lambda_c_nm", "bandwidth_nm", "stretched_ps"},
        "config.source",
    )
    bw = src["bandwidth_nm"]
    if isinstance(bw, (int, float)):
        bw = [bw, bw]
    if not (isinstance(bw, list) and len(bw) == 2):
        raise ConfigError("config.source.bandwidth_nm: number or [chirped, antichirped]")
    if "grid" in src and src["grid"] is not None:
        _require_keys(src["grid"], {"points", "halfwidth_factor"}, set(), "config.source.grid")

    needs_sample = any(m in modes for m in ("cpi", "wli", "qoct", "cw_swept", "spectrogram", "sweep"))
    if needs_sample and "sample" not in data:
        raise ConfigError("config.sample: required for the requested modes")
    if "sample" in data:
        smp = data["sample"]
        _require_keys(smp, {"interfaces", "gaps", "bulk"}, {"interfaces"}, "config.sample")
        if not isinstance(smp["interfaces"], list) or not smp["interfaces"]:
            raise ConfigError("config.sample.interfaces: non-empty list required")
        for i, iface in enumerate(smp["interfaces"]):
            _require_keys(iface, {"r_real", "r_imag"}, {"r_real"}, f"config.sample.interfaces[{i}]")
        for i, gap in enumerate(smp.get("gaps", []) or []):
            _require_keys(gap, {"d_um", "material"}, {"d_um", "material"},
                          f"config.sample.gaps[{i}]")
        if smp.get("bulk") is not None:
            _require_keys(smp["bulk"], {"material", "length_mm", "passes"},
                          {"material", "length_mm"}, "config.sample.bulk")

    grid = data["x_grid"]
    _require_keys(grid, {"start_um", "stop_um", "step_um", "center"},
                  {"start_um", "stop_um", "step_um"}, "config.x_grid")
    if _number(grid, "step_um", "config.x_grid", positive=True) is None:
        raise ConfigError("config.x_grid.step_um: required")
    if grid.get("center", "zero") not in ("zero", "bulk_delay"):
        raise ConfigError("config.x_grid.center: must be 'zero' or 'bulk_delay'")

    if "sweep" in modes:
        if "sweep" not in data:
            raise ConfigError("config.sweep: required for sweep mode")
        _require_keys(data["sweep"], {"lambda0_list_nm"}, {"lambda0_list_nm"}, "config.sweep")
        lst = data["sweep"]["lambda0_list_nm"]
        if not isinstance(lst, list) or len(lst) < 3:
            raise ConfigError("config.sweep.lambda0_list_nm: need at least 3 wavelengths")

    if any(m in modes for m in ("qoct", "cw_swept")):
        if "effective" not in data:
            raise ConfigError("config.effective: required for qoct / cw_swept modes")
        _require_keys(data["effective"], {"shape", "fwhm_nm"}, {"shape", "fwhm_nm"},
                      "config.effective")
        if data["effective"]["shape"] != "gaussian":
            raise ConfigError("config.effective.shape: only 'gaussian' is supported")

    if "filter" in data and data["filter"] is not None:
        _require_keys(data["filter"], {"center_nm", "fwhm_nm"}, set(), "config.filter")
    if "spectrogram" in data and data["spectrogram"] is not None:
        _require_keys(data["spectrogram"],
                      {"points", "window_factor", "lambda_window_nm"}, set(),
                      "config.spectrogram")
    output_dir = None
    if "output" in data and data["output"] is not None:
        _require_keys(data["output"], {"dir"}, set(), "config.output")
        output_dir = data["output"].get("dir")

    mats: dict[str, DispersiveMaterial] = {}
    for spec in data.get("materials", []) or []:
        mat = material_from_dict(spec)
        mats[mat.name] = mat

    return ScenarioConfig(name=name, raw=data, modes=modes, materials=mats,
                          output_dir=output_dir)


def load_config_file(path: str | Path) -> ScenarioConfig:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return parse_config(data, name=path.stem)


def preset_names() -> list[str]:
    root = resources.files("cpilab").joinpath("presets")
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def load_preset(name: str) -> ScenarioConfig:
    root = resources.files("cpilab").joinpath("presets")
    candidate = root.joinpath(f"{name}.json")
    if not candidate.is_file():
        raise ConfigError(f"unknown scenario {name!r} (presets: {', '.join(preset_names())})")
    return parse_config(json.loads(candidate.read_text()), name=name)


def scenario_hash(config: ScenarioConfig) -> str:
    """Hash of the physics-relevant part of the config (output paths and
    the display name do not contribute)."""
    physics = {k: config.raw[k] for k in _PHYSICS_KEYS if k in config.raw}
    blob = json.dumps(physics, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:12]


# ---------------------------------------------------------------------------
# Builders
# ---------------------------------------------------------------------------


def _material(config: ScenarioConfig, name: str) -> DispersiveMaterial:
    if name in config.materials:
        return config.materials[name]
    return get_material(name)


def build_pair(config: ScenarioConfig) -> ChirpedPulsePair:
    src = config.raw["source"]
    bw = src["bandwidth_nm"]
    if isinstance(bw, (int, float)):
        bw = [bw, bw]
    return ChirpedPulsePair.from_stretched(
        lambda_c=src["lambda_c_nm"] * 1e-9,
        dlambda_chirped=bw[0] * 1e-9,
        dlambda_antichirped=bw[1] * 1e-9,
        stretched_duration=src["stretched_ps"] * 1e-12,
        tau_rel=src.get("tau_rel_fs", 0.0) * 1e-15,
        tl_duration=src.get("tl_fs", 100.0) * 1e-15,
    )


def operating_lambda0_nm(config: ScenarioConfig, override_nm: float | None = None) -> float:
    if override_nm is not None:
        return float(override_nm)
    src = config.raw["source"]
    if src.get("lambda0_nm") is not None:
        return float(src["lambda0_nm"])
    pair = build_pair(config)
    return TWO_PI * C_VACUUM / spectra.operating_frequency(pair) * 1e9


def _grid_spec(config: ScenarioConfig) -> tuple[int, float]:
    grid = config.raw["source"].get("grid") or {}
    points = int(grid.get("points", spectra.DEFAULT_GRID_POINTS))
    factor = float(grid.get("halfwidth_factor", spectra.DEFAULT_HALFWIDTH_FACTOR))
    return points, factor


def build_stack(config: ScenarioConfig) -> LayerStack:
    smp = config.raw["sample"]
    interfaces = tuple(
        Interface(complex(i["r_real"], i.get("r_imag", 0.0))) for i in smp["interfaces"]
    )
    gaps = tuple(
        (g["d_um"] * 1e-6, _material(config, g["material"]))
        for g in (smp.get("gaps") or [])
    )
    bulk = None
    if smp.get("bulk") is not None:
        b = smp["bulk"]
        bulk = BulkElement(
            material=_material(config, b["material"]),
            length=b["length_mm"] * 1e-3,
            passes=int(b.get("passes", 1)),
        )
    return LayerStack(interfaces=interfaces, gaps=gaps, bulk=bulk)


def _mean_bandwidth_nm(config: ScenarioConfig) -> float:
    bw = config.raw["source"]["bandwidth_nm"]
    if isinstance(bw, (int, float)):
        return float(bw)
    return 0.5 * (bw[0] + bw[1])


def build_sources(config: ScenarioConfig, lambda0_nm: float):
    """Source spectra at the operating wavelength.

    The product kernel uses the mean of the two bandwidths (the pulses
    share one chirp rate; their duration difference is bandwidth). The
    white-light comparator uses the chirped pulse's own spectrum, since
    that beam is what the fringe detector sees.
    """
    points, factor = _grid_spec(config)
    bw = config.raw["source"]["bandwidth_nm"]
    if isinstance(bw, (int, float)):
        bw = [bw, bw]
    lam0 = lambda0_nm * 1e-9
    halfwidth = factor * spectra.fwhm_to_domega(lam0, max(bw) * 1e-9)
    mean = _mean_bandwidth_nm(config)
    kernel_pulse = spectra.gaussian_spectrum(lam0, mean * 1e-9, points=points, halfwidth=halfwidth)
    wli_source = spectra.gaussian_spectrum(lam0, bw[0] * 1e-9, points=points, halfwidth=halfwidth)
    return kernel_pulse, wli_source


def x_axis(config: ScenarioConfig, stack: LayerStack | None, omega0: float) -> np.ndarray:
    grid = config.raw["x_grid"]
    start, stop, step = grid["start_um"], grid["stop_um"], grid["step_um"]
    if stop <= start:
        raise ConfigError("config.x_grid: stop_um must exceed start_um")
    center = 0.0
    if grid.get("center", "zero") == "bulk_delay":
        if stack is None or stack.bulk is None:
            raise ConfigError("config.x_grid.center: 'bulk_delay' needs a sample bulk element")
        exp = phase_expansion(stack.bulk.material, omega0)
        # path-delay reading matching the bulk group delay: x = c tau / 2
        center = 0.5 * C_VACUUM * stack.bulk.passes * exp.alpha * stack.bulk.length * 1e6
    n = int(np.floor((stop - start) / step + 1.5))
    return center + start + step * np.arange(n)


# ---------------------------------------------------------------------------
# Execution
# ---------------------------------------------------------------------------


def _artifact_midpoint_visibility(scan: engine.Interferogram) -> tuple[float, float]:
    """Signed visibility at the midpoint of the two interface dips.

    The interface signatures of a two-surface sample are the outermost
    dips (a destructive artifact sits strictly between them). Reading
    the signal at their midpoint keeps the sweep well defined even when
    the artifact phase passes through zero and detection would miss it.
    Returns (midpoint_um, visibility).
    """
    dips = [f for f in analysis.detect_features(scan) if f.polarity == "dip"]
    if len(dips) < 2:
        raise ContractError("need two interface dips to locate the artifact midpoint")
    mid = 0.5 * (dips[0].center_um + dips[-1].center_um)
    base = float(np.median(scan.signal))
    val = float(np.interp(mid, scan.x_um, scan.signal))
    return mid, (val - base) / base


def run_scenario(
    config: ScenarioConfig,
    out_dir: str | Path,
    plot: bool = False,
    lambda0_nm: float | None = None,
    modes: tuple[str, ...] | None = None,
) -> dict:
    """Execute the scenario and write its artifacts.

    Returns a summary dict (also suitable for printing). Deterministic:
    the same config produces byte-identical CSV/JSON outputs.
    """
    out = Path(out_dir if out_dir is not None else (config.output_dir or "."))
    out.mkdir(parents=True, exist_ok=True)
    run_modes = tuple(m for m in config.modes if modes is None or m in modes)
    if not run_modes:
        raise ConfigError(
            f"config.mode: none of {config.modes} runnable here (wanted {modes})"
        )
    chash = scenario_hash(config)
    lam0_nm = operating_lambda0_nm(config, lambda0_nm)
    omega0 = TWO_PI * C_VACUUM / (lam0_nm * 1e-9)
    summary: dict = {"scenario": config.name, "hash": chash, "lambda0_nm": lam0_nm,
                     "outputs": [], "scans": {}}

    stack = build_stack(config) if "sample" in config.raw else None
    kernel_pulse = wli_source = None
    if any(m in run_modes for m in ("cpi", "wli", "qoct", "cw_swept")):
        kernel_pulse, wli_source = build_sources(config, lam0_nm)
    reports: dict = {}

    def emit(scan: engine.Interferogram, tag: str):
        path = out / f"{config.name}_{tag}.csv"
        scanio.write_scan(path, scan, scenario=config.name, scenario_hash=chash)
        summary["outputs"].append(str(path))
        feats = analysis.detect_features(scan)
        reports[tag] = scanio.feature_report(scan.kind, scan.meta.get("omega0"), feats)
        summary["scans"][tag] = _scan_summary(scan, feats, config, stack, lam0_nm)
        if plot:
            from . import plotting

            svg = out / f"{config.name}_{tag}.svg"
            plotting.save_scan_svg(svg, scan)
            summary["outputs"].append(str(svg))
        return scan

    for mode in run_modes:
        if mode == "cpi":
            tf = transfer_function(stack, kernel_pulse.omega_grid, omega0)
            lam_eff = spectra.cpi_product_spectrum(kernel_pulse, kernel_pulse)
            emit(engine.cpi_interferogram(lam_eff, tf, x_axis(config, stack, omega0)), "cpi")
        elif mode == "wli":
            tf = transfer_function(stack, wli_source.omega_grid, omega0)
            emit(engine.wli_interferogram(wli_source, tf, x_axis(config, stack, omega0)), "wli")
        elif mode in ("qoct", "cw_swept"):
            eff = config.raw["effective"]
            dw = spectra.fwhm_to_domega(lam0_nm * 1e-9, eff["fwhm_nm"] * 1e-9)
            grid = kernel_pulse.omega_grid
            values = np.exp(-4.0 * np.log(2.0) * (grid / dw) ** 2)
            tf = transfer_function(stack, grid, omega0)
            if mode == "qoct":
                lam_eff = spectra.qoct_spectrum(omega0, grid, values)
                emit(engine.qoct_interferogram(lam_eff, tf, x_axis(config, stack, omega0)), "qoct")
            else:
                lam_eff = spectra.cw_swept_spectrum(omega0, grid, values)
                emit(engine.cpi_interferogram(lam_eff, tf, x_axis(config, stack, omega0)), "cw_swept")
        elif mode == "spectrogram":
            pair = build_pair(config)
            opts = config.raw.get("spectrogram") or {}
            spec = engine.sfg_spectrogram(
                pair,
                stack,
                x_axis(config, stack, omega0),
                lambda_window_nm=float(opts.get("lambda_window_nm", 0.75)),
                points=int(opts.get("points", 2**16)),
                window_factor=float(opts.get("window_factor", 8.0)),
            )
            filt = config.raw.get("filter") or {}
            center_nm = filt.get("center_nm")
            center_omega = None if center_nm is None else TWO_PI * C_VACUUM / (center_nm * 1e-9)
            filtered = engine.integrate_filtered(
                spec, center_omega=center_omega, fwhm_nm=float(filt.get("fwhm_nm", 0.46))
            )
            emit(filtered, "sfg_filtered")
            if plot:
                from . import plotting

                svg = out / f"{config.name}_spectrogram.svg"
                plotting.save_spectrogram_svg(svg, spec)
                summary["outputs"].append(str(svg))
        elif mode == "sweep":
            swept = _run_sweep(config, stack, out, chash, plot, summary)
            reports["sweep"] = swept

    if reports:
        report_path = out / f"{config.name}_report.json"
        scanio.write_json(report_path, {"scenario": config.name, "hash": chash, **reports})
        summary["outputs"].append(str(report_path))
    return summary


def _scan_summary(scan, feats, config, stack, lam0_nm) -> dict:
    info: dict = {
        "kind": scan.kind,
        "features": [
            {"center_um": f.center_um, "fwhm_um": f.fwhm_um, "visibility": f.visibility,
             "polarity": f.polarity}
            for f in feats
        ],
    }
    # interface signatures are the outermost features; a destructive
    # artifact sits between them and must not enter the separation
    polarity = "peak" if scan.kind == "WLI" else "dip"
    dips = [f for f in feats if f.polarity == polarity]
    if len(dips) >= 2 and stack is not None and stack.gaps:
        sep = dips[-1].center_um - dips[0].center_um
        info["dip_separation_um"] = sep
        info["thickness_um"] = analysis.thickness_from_dips(
            sep, stack.gaps[0][1], lam0_nm * 1e-9
        )
    return info


def _run_sweep(config, stack, out: Path, chash: str, plot: bool, summary: dict) -> dict:
    lambdas = [float(l) for l in config.raw["sweep"]["lambda0_list_nm"]]
    scans = []
    vis_points = []
    for lam_nm in lambdas:
        omega0 = TWO_PI * C_VACUUM / (lam_nm * 1e-9)
        kernel_pulse, _ = build_sources(config, lam_nm)
        tf = transfer_function(stack, kernel_pulse.omega_grid, omega0)
        lam_eff = spectra.cpi_product_spectrum(kernel_pulse, kernel_pulse)
        scan = engine.cpi_interferogram(lam_eff, tf, x_axis(config, stack, omega0))
        scans.append((lam_nm, scan))
        _, vis = _artifact_midpoint_visibility(scan)
        vis_points.append((lam_nm, vis))
    result = analysis.fit_visibility_oscillation(vis_points)
    classified = analysis.classify_features(scans)

    predicted = None
    if stack is not None and stack.gaps:
        d, mat = stack.gaps[0]
        lam_mid = float(np.median(lambdas)) * 1e-9
        omega_mid = TWO_PI * C_VACUUM / lam_mid
        exp = phase_expansion(mat, omega_mid)
        _, predicted = analysis.predict_artifact_flip(omega_mid, exp.alpha, d)

    payload = scanio.sweep_report(result, predicted, classified)
    path = out / f"{config.name}_sweep.json"
    scanio.write_json(path, payload)
    summary["outputs"].append(str(path))
    summary["sweep"] = {
        "fitted_period_nm": result.fitted_period,
        "predicted_period_nm": predicted,
        "n_scans": len(scans),
    }
    if plot:
        from . import plotting

        svg = out / f"{config.name}_sweep.svg"
        plotting.save_sweep_svg(svg, result)
        summary["outputs"].append(str(svg))
    return payload
