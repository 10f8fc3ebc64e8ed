"""Optional SVG output. Requires matplotlib (install extra ``plot``).

Plots are a convenience view; the CSV/JSON artifacts are the contract.
"""

from __future__ import annotations

from pathlib import Path

from .errors import ConfigError


def _pyplot():
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError as exc:
        raise ConfigError("plot output requires matplotlib (pip install cpi-lab[plot])") from exc
    return plt


def save_scan_svg(path: str | Path, scan) -> Path:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(7, 3.2))
    ax.plot(scan.x_um, scan.signal, lw=0.8)
    ax.set_xlabel("path delay (um)")
    ax.set_ylabel("normalised signal")
    ax.set_title(scan.kind)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
    return Path(path)


def save_spectrogram_svg(path: str | Path, spec) -> Path:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.imshow(
        spec.intensity.T,
        origin="lower",
        aspect="auto",
        cmap="gray_r",
        extent=(spec.x_um[0], spec.x_um[-1], spec.lambda_nm[0], spec.lambda_nm[-1]),
    )
    ax.set_xlabel("path delay (um)")
    ax.set_ylabel("SFG wavelength (nm)")
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
    return Path(path)


def save_sweep_svg(path: str | Path, result) -> Path:
    plt = _pyplot()
    import numpy as np

    lam = np.array([p[0] for p in result.points])
    vis = np.array([p[1] for p in result.points])
    fig, ax = plt.subplots(figsize=(6.4, 3.2))
    ax.plot(lam, vis, "o", ms=4)
    dense = np.linspace(lam.min(), lam.max(), 400)
    lam_ref = lam.mean()
    ax.plot(
        dense,
        result.amplitude
        * np.cos(2.0 * np.pi * (dense - lam_ref) / result.fitted_period + result.fitted_phase),
        lw=0.9,
    )
    ax.axhline(0.0, color="k", lw=0.5)
    ax.set_xlabel("operating wavelength (nm)")
    ax.set_ylabel("artifact visibility")
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
    return Path(path)
