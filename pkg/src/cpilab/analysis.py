"""Feature extraction and artifact identification on normalised scans.

Features are dips or bumps relative to the scan baseline (estimated as
the median of the signal, features occupying a small fraction of the
window). Visibility is signed, (I_C - I_S)/I_S with I_S the baseline
intensity: negative for destructive interference (dips), positive for
constructive. Real interface signatures are always destructive; the
midpoint artifact's sign oscillates with the operating wavelength, so a
wavelength sweep separates the two.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import curve_fit
from scipy.signal import find_peaks, hilbert

from .constants import C_VACUUM
from .engine import Interferogram
from .errors import ContractError
from .materials import DispersiveMaterial, group_index

__all__ = [
    "Feature",
    "SweepResult",
    "wli_envelope",
    "detect_features",
    "visibility",
    "thickness_from_dips",
    "predict_artifact_flip",
    "fit_visibility_oscillation",
    "classify_features",
]


@dataclass(frozen=True)
class Feature:
    center_um: float
    fwhm_um: float
    visibility: float
    polarity: str  # "dip" | "peak"
    classification: str = "unknown"  # "real" | "artifact" | "unknown"


@dataclass(frozen=True)
class SweepResult:
    points: tuple[tuple[float, float], ...]  # (lambda0_nm, visibility)
    fitted_period: float  # nm
    fitted_phase: float  # rad
    period_ci: float  # nm
    amplitude: float


def wli_envelope(scan: Interferogram) -> Interferogram:
    """Envelope of a white-light scan via the analytic signal.

    The fringe pattern around the carrier is one-sided filtered
    (Hilbert transform); the returned scan carries baseline + |envelope|,
    so packets appear as peaks on the common baseline.
    """
    base = float(np.median(scan.signal))
    env = np.abs(hilbert(scan.signal - base))
    return Interferogram(
        kind=scan.kind, x_um=scan.x_um, signal=base + env,
        meta={**scan.meta, "envelope": True},
    )


def _half_crossing(x, dev, idx, half, direction):
    """Linear-interpolated crossing of dev = half walking from idx."""
    i = idx
    while 0 <= i + direction < dev.size and dev[i + direction] > half:
        i += direction
    j = i + direction
    if j < 0 or j >= dev.size:
        return None
    frac = (dev[i] - half) / (dev[i] - dev[j])
    return x[i] + frac * (x[j] - x[i])


def detect_features(scan: Interferogram, min_prominence: float = 0.02) -> list[Feature]:
    """Locate dips and bumps with excursion >= min_prominence.

    White-light scans are envelope-extracted first. Centers are the
    extremum grid locations; widths come from linearly interpolated
    half-excursion crossings. Features without both crossings inside the
    window are dropped. Classification is left "unknown".
    """
    if scan.kind == "WLI" and not scan.meta.get("envelope"):
        scan = wli_envelope(scan)
    s = np.asarray(scan.signal, dtype=float)
    x = np.asarray(scan.x_um, dtype=float)
    base = float(np.median(s))
    if not (0.9 <= base <= 1.1):
        raise ContractError(
            f"scan baseline {base:.3f} is outside 1 +/- 0.1; normalise the scan first"
        )
    features: list[Feature] = []
    for sign, polarity in ((-1.0, "dip"), (1.0, "peak")):
        dev = sign * (s - base)
        idxs, _ = find_peaks(dev, height=min_prominence)
        for idx in idxs:
            half = 0.5 * dev[idx]
            left = _half_crossing(x, dev, idx, half, -1)
            right = _half_crossing(x, dev, idx, half, +1)
            if left is None or right is None:
                continue
            features.append(
                Feature(
                    center_um=float(x[idx]),
                    fwhm_um=float(right - left),
                    visibility=float((s[idx] - base) / base),
                    polarity=polarity,
                )
            )
    features.sort(key=lambda f: f.center_um)
    return features


def visibility(scan: Interferogram, feature: Feature) -> float:
    """Signed visibility (I_C - I_S)/I_S of one feature.

    I_C is the signal at the feature centre; I_S is the shoulder
    intensity, the baseline estimated from the scan outside 3 FWHM of
    every detected feature.
    """
    if scan.kind == "WLI" and not scan.meta.get("envelope"):
        scan = wli_envelope(scan)
    x = np.asarray(scan.x_um, dtype=float)
    s = np.asarray(scan.signal, dtype=float)
    if not (x[0] <= feature.center_um <= x[-1]):
        raise ContractError("feature lies outside the scan")
    shoulder_mask = np.ones_like(x, dtype=bool)
    for f in detect_features(scan):
        shoulder_mask &= np.abs(x - f.center_um) > 3.0 * f.fwhm_um
    if not shoulder_mask.any():
        raise ContractError("no clean shoulder region outside 3 FWHM of all features")
    i_s = float(np.median(s[shoulder_mask]))
    i_c = float(np.interp(feature.center_um, x, s))
    return (i_c - i_s) / i_s


def thickness_from_dips(delta_x_um: float, material: DispersiveMaterial, lambda0_m: float) -> float:
    """Thickness from the separation of the two interface signatures.

    The separation along the path-delay axis equals the round-trip group
    delay difference, so dividing by the group index at the operating
    wavelength recovers the physical thickness: d = delta_x / n_g.
    """
    if delta_x_um <= 0.0:
        raise ContractError("dip separation must be positive")
    return delta_x_um / group_index(material, lambda0_m)


def predict_artifact_flip(omega0: float, alpha: float, d: float) -> tuple[float, float]:
    """Operating-wavelength scale of the artifact's sign oscillation.

    The artifact term is modulated by cos(2 k(w0) d). With
    k(w0 + delta) ~ k(w0) + alpha*delta, the wavelength change flipping
    the sign is pi^2 c / (w0^2 alpha d); a full period is twice that.
    Returns (flip_nm, period_nm).
    """
    if omega0 <= 0.0 or alpha <= 0.0 or d <= 0.0:
        raise ContractError("omega0, alpha and d must all be positive")
    flip = np.pi**2 * C_VACUUM / (omega0**2 * alpha * d)
    return flip * 1e9, 2.0 * flip * 1e9


def fit_visibility_oscillation(points) -> SweepResult:
    """Least-squares cosine fit V(l0) = A cos(2 pi (l0 - lref)/P + phi).

    Initialisation is deterministic: the coarse frequency comes from the
    discrete power spectrum of the points on a fixed trial-frequency
    grid. The period confidence interval is 1.96 sigma from the fit
    covariance.
    """
    pts = [(float(l), float(v)) for l, v in points]
    if len(pts) < 4:
        raise ContractError(f"need at least 4 sweep points, got {len(pts)}")
    lam = np.array([p[0] for p in pts])
    vis = np.array([p[1] for p in pts])
    span = float(lam.max() - lam.min())
    if span <= 0.0:
        raise ContractError("sweep points span zero wavelength range")
    lam_ref = float(lam.mean())
    centred = vis - vis.mean()

    min_gap = float(np.min(np.diff(np.unique(lam))))
    freqs = np.linspace(1.0 / (2.0 * span), 0.5 / min_gap, 2048)
    power = np.abs(np.exp(2j * np.pi * np.outer(freqs, lam - lam_ref)) @ centred)
    f0 = float(freqs[int(np.argmax(power))])
    proj = np.exp(-2j * np.pi * f0 * (lam - lam_ref)) @ centred
    phi0 = float(np.angle(proj))
    a0 = float(np.sqrt(2.0) * centred.std())

    def model(l, a, f, phi):
        return a * np.cos(2.0 * np.pi * f * (l - lam_ref) + phi)

    popt, pcov = curve_fit(model, lam, vis, p0=(a0, f0, phi0), maxfev=20000)
    a_fit, f_fit, phi_fit = popt
    if a_fit < 0.0:
        a_fit, phi_fit = -a_fit, phi_fit + np.pi
    f_fit = abs(f_fit)
    period = 1.0 / f_fit
    if span < 0.5 * period:
        raise ContractError(
            f"sweep span {span:.3g} nm covers less than half the fitted period {period:.3g} nm"
        )
    sigma_f = float(np.sqrt(pcov[1, 1])) if np.isfinite(pcov[1, 1]) else float("inf")
    return SweepResult(
        points=tuple(pts),
        fitted_period=period,
        fitted_phase=float(np.mod(phi_fit, 2.0 * np.pi)),
        period_ci=1.96 * sigma_f / f_fit**2,
        amplitude=float(a_fit),
    )


def classify_features(scans, min_prominence: float = 0.02) -> list[Feature]:
    """Classify features by tracking their visibility across a sweep.

    ``scans`` is a list of (lambda0_nm, Interferogram). Features are
    matched across scans by nearest centre within one FWHM. A matched
    group whose visibility changes sign is an artifact; one that is
    consistently destructive is real; anything else stays unknown.
    """
    scans = list(scans)
    if not scans:
        raise ContractError("no scans supplied")
    per_scan = []
    for _, scan in sorted(scans, key=lambda p: p[0]):
        per_scan.append(detect_features(scan, min_prominence=min_prominence))
    if len(scans) == 1:
        warnings.warn("single-wavelength input: classification left unknown", stacklevel=2)
        return per_scan[0]

    clusters: list[dict] = []
    for feats in per_scan:
        for f in feats:
            home = None
            best = None
            for cl in clusters:
                dist = abs(f.center_um - cl["center"])
                if dist <= max(f.fwhm_um, cl["fwhm"]) and (best is None or dist < best):
                    best, home = dist, cl
            if home is None:
                clusters.append(
                    {"center": f.center_um, "fwhm": f.fwhm_um, "members": [f]}
                )
            else:
                home["members"].append(f)
                home["center"] = float(np.mean([m.center_um for m in home["members"]]))
                home["fwhm"] = float(np.mean([m.fwhm_um for m in home["members"]]))

    out = []
    for cl in sorted(clusters, key=lambda c: c["center"]):
        vs = [m.visibility for m in cl["members"]]
        if len(vs) >= 2 and min(vs) < 0.0 < max(vs):
            label = "artifact"
        elif len(vs) >= 2 and all(v < 0.0 for v in vs):
            label = "real"
        else:
            label = "unknown"
        rep = max(cl["members"], key=lambda m: abs(m.visibility))
        out.append(replace(rep, classification=label))
    return out
