"""Shared fixtures: the bundled scenarios are expensive enough that the
suite runs each once per session and every test reads the artifacts."""

from __future__ import annotations

import numpy as np
import pytest

from cpilab import engine, scanio, scenarios, spectra
from cpilab.materials import material_from_dict
from cpilab.sample import transfer_function
from cpilab.constants import C_VACUUM, TWO_PI

COVERGLASS_NG_790_8 = 1.53482  # group index anchoring the coverslip model
DIP_SEPARATION_UM = 286.1


@pytest.fixture(scope="session")
def out_root(tmp_path_factory):
    return tmp_path_factory.mktemp("artifacts")


@pytest.fixture(scope="session")
def paper_glass():
    cfg = scenarios.load_preset("fig2a")
    return material_from_dict(cfg.raw["materials"][0])


@pytest.fixture(scope="session")
def coverslip_d_um():
    cfg = scenarios.load_preset("fig2a")
    return cfg.raw["sample"]["gaps"][0]["d_um"]


@pytest.fixture(scope="session")
def fig2a(out_root):
    cfg = scenarios.load_preset("fig2a")
    summary = scenarios.run_scenario(cfg, out_root / "fig2a")
    scans = {
        tag: scanio.read_scan(out_root / "fig2a" / f"fig2a_{tag}.csv")
        for tag in ("cpi", "wli")
    }
    return {"summary": summary, "scans": scans}


@pytest.fixture(scope="session")
def fig2b(out_root):
    cfg = scenarios.load_preset("fig2b")
    summary = scenarios.run_scenario(cfg, out_root / "fig2b")
    scans = {
        tag: scanio.read_scan(out_root / "fig2b" / f"fig2b_{tag}.csv")
        for tag in ("cpi", "wli")
    }
    return {"summary": summary, "scans": scans}


@pytest.fixture(scope="session")
def fig3_bundle():
    """Spectrogram, its filtered readout, and the matching frequency-domain
    scan on the same delay grid."""
    cfg = scenarios.load_preset("fig3")
    stack = scenarios.build_stack(cfg)
    pair = scenarios.build_pair(cfg)
    lam0_nm = scenarios.operating_lambda0_nm(cfg)
    omega0 = TWO_PI * C_VACUUM / (lam0_nm * 1e-9)
    x = scenarios.x_axis(cfg, stack, omega0)
    spec = engine.sfg_spectrogram(pair, stack, x)
    filtered = engine.integrate_filtered(spec)
    kernel_pulse, _ = scenarios.build_sources(cfg, lam0_nm)
    tf = transfer_function(stack, kernel_pulse.omega_grid, omega0)
    lam_eff = spectra.cpi_product_spectrum(kernel_pulse, kernel_pulse)
    reference = engine.cpi_interferogram(lam_eff, tf, x)
    return {"spectrogram": spec, "filtered": filtered, "reference": reference,
            "stack": stack, "pair": pair, "omega0": omega0}


@pytest.fixture(scope="session")
def fig4sweep(out_root):
    import json

    cfg = scenarios.load_preset("fig4sweep")
    summary = scenarios.run_scenario(cfg, out_root / "fig4sweep")
    report = json.loads((out_root / "fig4sweep" / "fig4sweep_sweep.json").read_text())
    return {"summary": summary, "report": report}


def measure_fwhm(x, y):
    """Width of the single peak of y at half its maximum (linear interp)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    peak = int(np.argmax(y))
    half = 0.5 * y[peak]

    def cross(direction):
        i = peak
        while 0 <= i + direction < y.size and y[i + direction] > half:
            i += direction
        j = i + direction
        frac = (y[i] - half) / (y[i] - y[j])
        return x[i] + frac * (x[j] - x[i])

    return cross(+1) - cross(-1)


def sfg_line_crossings(bundle, sample_delays=(-40.0, 60.0, 220.0, 320.0)):
    """Fit the four spectrogram lines and return their pairwise crossings.

    Peak positions are matched against the instantaneous-frequency
    algebra (sign s, interface j): offset = s * beta * (T - tau_j) with
    T = 2x/c; each matched set is fit linearly and the (+) lines are
    intersected with the (-) lines. Returns a list of
    (j, k, x_um, omega_offset) and the frequency resolution.
    """
    from scipy.signal import find_peaks

    spec = bundle["spectrogram"]
    pair = bundle["pair"]
    tau = bundle["stack"].group_delays(bundle["omega0"])
    beta = pair.beta
    resolution = TWO_PI / (8.0 * max(pair.stretched_durations()))
    omega_axis = TWO_PI * C_VACUUM / (spec.lambda_nm * 1e-9) - 2.0 * spec.meta["omega_c"]

    samples = {}
    for target in sample_delays:
        ix = int(np.argmin(np.abs(spec.x_um - target)))
        x = spec.x_um[ix]
        t_delay = 2.0 * x * 1e-6 / C_VACUUM
        row = spec.intensity[ix]
        idxs, _ = find_peaks(row, height=0.05 * row.max())
        peaks = omega_axis[idxs]
        if len(peaks) != 4:
            raise AssertionError(f"expected 4 SFG lines at x={x}, found {len(peaks)}")
        for s in (+1, -1):
            for j, tau_j in enumerate(tau):
                predicted = s * beta * (t_delay - tau_j)
                nearest = peaks[np.argmin(np.abs(peaks - predicted))]
                if abs(nearest - predicted) > 2.0 * resolution:
                    raise AssertionError("SFG line off its predicted frequency")
                samples.setdefault((s, j), []).append((x, nearest))

    fits = {key: np.polyfit(*zip(*pts), 1) for key, pts in samples.items()}
    crossings = []
    for j in range(len(tau)):
        for k in range(len(tau)):
            a, b = fits[(+1, j)], fits[(-1, k)]
            xc = (b[1] - a[1]) / (a[0] - b[0])
            crossings.append((j, k, float(xc), float(np.polyval(a, xc))))
    return crossings, resolution
