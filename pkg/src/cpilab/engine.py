"""Interferogram and spectrogram synthesis.

Delay convention
----------------
The scan axis x (micrometres) is the path-delay reading of a
double-passed delay line, so the physical reference-arm time delay is
T = 2x/c. All engines share this convention, which makes feature
separations coincide between the scan types: a gap of thickness d and
group index n_g puts its two interface signatures n_g*d apart in x.

Chirped-pulse / quantum-style scans integrate the cross-correlation
kernel

    S(x) = 1 - Re[ int Lambda(W) H(W) H*(-W) exp(-2 i W T) dW ] / N,
    N    = int Lambda(W) |H(W)|^2 dW,

by trapezoid quadrature on the uniform offset grid (deterministic;
accumulations use numpy pairwise summation). Because H(W)H*(-W) cancels
every even-order spectral phase, these scans are blind to group-velocity
dispersion by construction.

White-light scans integrate |exp(i (w0+W) T) + H(W)|^2 against the
source spectrum and keep the carrier fringes; the envelope is extracted
downstream via the analytic signal.

The time-domain engine synthesises the oppositely-chirped fields,
applies the sample response as a spectral filter, forms the two
sum-frequency cross products (with the relative pi from the input beam
splitter, so balanced delays interfere destructively), and records the
intensity spectrum near twice the operating frequency per delay. An
incoherent-sum channel (the two processes added in intensity) is kept
alongside as the exact zero-interference baseline for normalisation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .constants import C_VACUUM, TWO_PI
from .errors import ContractError
from .sample import LayerStack, TransferFunction, evaluate_response
from .spectra import ChirpedPulsePair, EffectiveSpectrum, SourceSpectrum, operating_frequency

__all__ = [
    "Interferogram",
    "Spectrogram",
    "cpi_interferogram",
    "qoct_interferogram",
    "wli_interferogram",
    "sfg_spectrogram",
    "integrate_filtered",
]

_CHUNK = 256  # delay rows per exponential-matrix block


@dataclass(frozen=True)
class Interferogram:
    """Normalised scan: baseline 1, signal >= 0, x in micrometres."""

    kind: str
    x_um: np.ndarray
    signal: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ("CPI", "WLI", "QOCT"):
            raise ContractError(f"unknown interferogram kind {self.kind!r}")
        if np.asarray(self.x_um).size == 0:
            raise ContractError("interferogram delay axis is empty")


@dataclass(frozen=True)
class Spectrogram:
    """Sum-frequency intensity vs path delay and SFG wavelength.

    ``intensity`` is the coherent signal |F1 - F2|^2; ``baseline`` is the
    incoherent sum |F1|^2 + |F2|^2 of the two conversion processes, used
    to normalise filtered interferograms. lambda_nm ascends; it maps the
    uniform SFG frequency bins, so it is uniform to first order in the
    (small) window over centre ratio.
    """

    x_um: np.ndarray
    lambda_nm: np.ndarray
    intensity: np.ndarray
    baseline: np.ndarray
    omega0: float
    meta: dict = field(default_factory=dict)


def _trapezoid_weights(omega_grid: np.ndarray) -> np.ndarray:
    w = np.asarray(omega_grid, dtype=float)
    step = w[1] - w[0]
    if not np.allclose(np.diff(w), step, rtol=1e-9, atol=0.0):
        raise ContractError("frequency grid must be uniform")
    weights = np.full(w.shape, step)
    weights[0] *= 0.5
    weights[-1] *= 0.5
    return weights


def _oscillatory_sum(values: np.ndarray, omega_grid: np.ndarray, factors: np.ndarray) -> np.ndarray:
    """int f(W) exp(-i a W) dW for each a in ``factors`` (trapezoid).

    Uniformly spaced factors advance by a multiplicative phase
    recurrence, re-anchored on an exact exponential at every block so
    rounding drift stays far below the quadrature tolerances;
    non-uniform factors fall back to direct exponentials. Evaluation is
    serial and uses numpy's pairwise summation, so results are
    reproducible bit for bit.
    """
    g = values * _trapezoid_weights(omega_grid)
    f = np.asarray(factors, dtype=float)
    out = np.empty(f.shape, dtype=complex)
    df = np.diff(f)
    if df.size > 1 and np.allclose(df, df[0], rtol=1e-9, atol=0.0):
        q = np.exp(-1j * df[0] * omega_grid)
        for lo in range(0, f.size, _CHUNK):
            hi = min(lo + _CHUNK, f.size)
            block = np.empty((hi - lo, omega_grid.size), dtype=complex)
            block[0] = np.exp(-1j * f[lo] * omega_grid)
            for m in range(1, hi - lo):
                np.multiply(block[m - 1], q, out=block[m])
            out[lo:hi] = block @ g
        return out
    for lo in range(0, f.size, _CHUNK):
        block = f[lo : lo + _CHUNK]
        out[lo : lo + _CHUNK] = np.exp(-1j * np.outer(block, omega_grid)) @ g
    return out


def _check_engine_grids(spectrum: EffectiveSpectrum, tf: TransferFunction, x_um: np.ndarray) -> np.ndarray:
    x = np.asarray(x_um, dtype=float)
    if x.size == 0:
        raise ContractError("empty delay grid")
    if spectrum.omega_grid.shape != tf.omega_grid.shape or not np.array_equal(
        spectrum.omega_grid, tf.omega_grid
    ):
        raise ContractError("effective spectrum and transfer function must share one grid")
    if spectrum.omega0 != tf.omega0:
        raise ContractError("effective spectrum and transfer function disagree on omega0")
    return x


def _cross_correlation_scan(
    spectrum: EffectiveSpectrum, tf: TransferFunction, x_um: np.ndarray, kind: str
) -> Interferogram:
    x = _check_engine_grids(spectrum, tf, x_um)
    lam = spectrum.values
    kernel = tf.H * np.conj(tf.H[::-1])  # H(W) H*(-W), exact reversal
    norm = float(np.trapezoid(lam * np.abs(tf.H) ** 2, tf.omega_grid))
    if norm <= 0.0:
        raise ContractError("effective spectrum has no weight on the sample response")
    # physical delay T = 2 x / c; kernel exp(-2 i W T)
    factors = 4.0 * (x * 1e-6) / C_VACUUM
    osc = _oscillatory_sum(lam * kernel, tf.omega_grid, factors)
    signal = 1.0 - np.real(osc) / norm
    return Interferogram(
        kind=kind,
        x_um=x,
        signal=signal,
        meta={"omega0": tf.omega0, "norm": norm, "mode": spectrum.mode},
    )


def cpi_interferogram(
    spectrum: EffectiveSpectrum, tf: TransferFunction, x_um: np.ndarray
) -> Interferogram:
    """Chirped-pulse scan from the product kernel (or a CW-swept one)."""
    if spectrum.mode == "qoct_given":
        raise ContractError("use qoct_interferogram for a given entangled spectrum")
    return _cross_correlation_scan(spectrum, tf, x_um, kind="CPI")


def qoct_interferogram(
    spectrum: EffectiveSpectrum, tf: TransferFunction, x_um: np.ndarray
) -> Interferogram:
    """Quantum-style scan; same kernel, entangled spectrum taken as given."""
    if spectrum.mode != "qoct_given":
        raise ContractError("qoct_interferogram expects a qoct_given effective spectrum")
    return _cross_correlation_scan(spectrum, tf, x_um, kind="QOCT")


def wli_interferogram(
    source: SourceSpectrum, tf: TransferFunction, x_um: np.ndarray
) -> Interferogram:
    """White-light scan with carrier fringes.

    S(x) = int I(W) |exp(2 i (w0+W) x/c) + H(W)|^2 dW, normalised by
    int I (1 + |H|^2) so the fringe-free background sits at 1. The x
    step must resolve the lambda0/2 carrier (step <= lambda0/8).
    """
    x = _check_engine_grids(
        EffectiveSpectrum("cw_swept", source.omega0, source.omega_grid, source.intensity),
        tf,
        x_um,
    )
    lam0 = TWO_PI * C_VACUUM / source.omega0
    if x.size > 1:
        step = (x[1] - x[0]) * 1e-6
        if step > lam0 / 8.0 * (1.0 + 1e-12):
            raise ContractError(
                f"white-light delay step {step*1e6:.4g} um undersamples the carrier; "
                f"need <= lambda0/8 = {lam0/8*1e6:.4g} um"
            )
    intensity = source.intensity
    norm = float(np.trapezoid(intensity * (1.0 + np.abs(tf.H) ** 2), tf.omega_grid))
    factors = -2.0 * (x * 1e-6) / C_VACUUM  # exp(+2 i W x / c)
    cross = _oscillatory_sum(intensity * np.conj(tf.H), tf.omega_grid, factors)
    carrier = np.exp(2j * source.omega0 * (x * 1e-6) / C_VACUUM)
    signal = 1.0 + 2.0 * np.real(carrier * cross) / norm
    return Interferogram(
        kind="WLI", x_um=x, signal=signal, meta={"omega0": source.omega0, "norm": norm}
    )


# ---------------------------------------------------------------------------
# Time-domain sum-frequency spectrogram
# ---------------------------------------------------------------------------


def sfg_spectrogram(
    pair: ChirpedPulsePair,
    stack: LayerStack,
    x_um: np.ndarray,
    lambda_window_nm: float = 0.75,
    points: int = 2**16,
    window_factor: float = 8.0,
) -> Spectrogram:
    """Synthesise the SFG spectrum versus path delay.

    Sampling rule: the time step must resolve the transform-limited
    duration (dt <= tl/4) and keep the chirp phase step below pi/2 at
    the window edge (beta * t_edge * dt <= pi/2); violations raise.
    """
    x = np.asarray(x_um, dtype=float)
    if x.size == 0:
        raise ContractError("empty delay grid")
    omega_c = TWO_PI * C_VACUUM / pair.lambda_c
    omega0 = operating_frequency(pair)
    dur_c, dur_a = pair.stretched_durations()
    t_half = 0.5 * window_factor * max(dur_c, dur_a)
    nt = int(points)
    dt = 2.0 * t_half / nt
    if dt > pair.tl_duration / 4.0:
        raise ContractError(
            f"time step {dt:.3e} s undersamples the transform-limited duration; "
            f"need <= {pair.tl_duration/4.0:.3e} s"
        )
    if pair.beta * t_half * dt > 0.5 * math.pi:
        raise ContractError("time grid too coarse for the chirp phase at the window edge")

    t = (np.arange(nt) - nt // 2) * dt
    log2 = 2.0 * math.log(2.0)
    env_c = np.exp(-log2 * (t / dur_c) ** 2)
    ta = t - pair.tau_rel
    env_a = np.exp(-log2 * (ta / dur_a) ** 2)
    chirp = 0.5 * pair.beta * t * t
    field_c = env_c * np.exp(1j * chirp)             # engineering sign, exp(+i w t)
    field_a = env_a * np.exp(-1j * (0.5 * pair.beta * ta * ta))

    # Sample-arm fields: apply the stack response as a spectral filter on
    # the band actually carrying energy (chirp band plus envelope margin).
    omega_fft = TWO_PI * np.fft.fftfreq(nt, dt)
    band = 1.1 * pair.beta * t_half + 20.0 * log2 / min(dur_c, dur_a)
    mask = np.abs(omega_fft) <= band
    response = np.zeros(nt, dtype=complex)
    # engineering convention: a physics-convention response H(w) acts as conj(H)
    response[mask] = np.conj(evaluate_response(stack, omega_c + omega_fft[mask]))
    sample_c = np.fft.ifft(np.fft.fft(field_c) * response)
    sample_a = np.fft.ifft(np.fft.fft(field_a) * response)

    # SFG frequency window around 2*omega_c; lambda_window_nm is the half-width
    half_window = TWO_PI * C_VACUUM * (lambda_window_nm * 1e-9) / (pair.lambda_c / 2.0) ** 2
    sel = np.where(np.abs(omega_fft) <= half_window)[0]
    order = np.argsort(omega_fft[sel])
    sel = sel[order]
    omega_sfg = 2.0 * omega_c + omega_fft[sel]
    lambda_nm = TWO_PI * C_VACUUM / omega_sfg * 1e9
    flip = np.argsort(lambda_nm)
    sel = sel[flip]
    lambda_nm = lambda_nm[flip]

    intensity = np.empty((x.size, sel.size))
    baseline = np.empty_like(intensity)
    for lo in range(0, x.size, 64):
        xs = x[lo : lo + 64] * 1e-6
        delays = 2.0 * xs / C_VACUUM  # physical reference delay per scan position
        tt = t[None, :] - delays[:, None]
        env = np.exp(-log2 * (tt / dur_c) ** 2)
        ref_c = env * np.exp(1j * (0.5 * pair.beta * tt * tt))
        tta = tt - pair.tau_rel
        env = np.exp(-log2 * (tta / dur_a) ** 2)
        ref_a = env * np.exp(-1j * (0.5 * pair.beta * tta * tta))
        proc1 = sample_c[None, :] * ref_a
        proc2 = sample_a[None, :] * ref_c
        # relative pi between the two beam-splitter routings
        spec1 = np.fft.fft(proc1, axis=1)[:, sel]
        spec2 = np.fft.fft(proc2, axis=1)[:, sel]
        intensity[lo : lo + 64] = np.abs(spec1 - spec2) ** 2
        baseline[lo : lo + 64] = np.abs(spec1) ** 2 + np.abs(spec2) ** 2

    scale = float(np.max(baseline))
    if scale > 0.0:
        intensity /= scale
        baseline /= scale
    return Spectrogram(
        x_um=x,
        lambda_nm=lambda_nm,
        intensity=intensity,
        baseline=baseline,
        omega0=omega0,
        meta={"omega_c": omega_c, "dt": dt, "points": nt},
    )


def integrate_filtered(
    spectrogram: Spectrogram, center_omega: float | None = None, fwhm_nm: float = 0.46
) -> Interferogram:
    """Narrowband-filtered detection of the spectrogram.

    A Gaussian weight of the given FWHM (default 0.46 nm) is applied
    across the SFG wavelength axis, centred on 2*omega0 unless a centre
    (SFG angular frequency) is supplied; the filtered intensity is
    normalised by the incoherent-sum channel so the baseline sits at 1.
    Delays where no line energy enters the band stay at the baseline.
    """
    if center_omega is None:
        center_omega = 2.0 * spectrogram.omega0
    center_nm = TWO_PI * C_VACUUM / center_omega * 1e9
    lam = spectrogram.lambda_nm
    if not (lam[0] <= center_nm <= lam[-1]):
        raise ContractError(
            f"filter centre {center_nm:.4f} nm outside the spectrogram band "
            f"[{lam[0]:.4f}, {lam[-1]:.4f}] nm"
        )
    weight = np.exp(-4.0 * math.log(2.0) * ((lam - center_nm) / fwhm_nm) ** 2)
    raw = np.trapezoid(spectrogram.intensity * weight, lam, axis=1)
    ref = np.trapezoid(spectrogram.baseline * weight, lam, axis=1)
    # delays with no line energy in the band sit at the baseline; the floor
    # is tied to the total energy scale so numerical tails never divide out
    total = np.trapezoid(spectrogram.baseline, lam, axis=1)
    floor = 1e-9 * float(np.max(total)) if np.max(total) > 0.0 else 1.0
    signal = np.where(ref > floor, raw / np.where(ref > floor, ref, 1.0), 1.0)
    return Interferogram(
        kind="CPI",
        x_um=spectrogram.x_um,
        signal=signal,
        meta={
            "omega0": spectrogram.omega0,
            "filter_center_nm": center_nm,
            "filter_fwhm_nm": fwhm_nm,
            "source": "sfg_spectrogram",
        },
    )
