"""Source spectra, chirped-pulse pairs, and the effective spectrum.

The interferogram kernel integrates an effective spectrum Lambda(W) over
the frequency offset W from the operating frequency w0. Lambda comes in
three flavours:

  * ``cpi_product`` - product I_c(W) I_a(-W) of the chirped and
    anti-chirped pulse spectra, symmetrised so it is exactly even;
  * ``qoct_given`` - a supplied entangled-photon spectrum, passed through;
  * ``cw_swept``   - the sweep distribution G(W) of a pair of CW lasers
    tuned in an anticorrelated way, passed through.

Offset grids are uniform and symmetric about zero, built so that the
reversal W -> -W is the exact index reversal of the array. Default grids
use an odd point count so W = 0 is sampled and the peak-normalisation
I(0) = 1 holds exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import C_VACUUM, TWO_PI
from .errors import ContractError

__all__ = [
    "SourceSpectrum",
    "ChirpedPulsePair",
    "EffectiveSpectrum",
    "make_omega_grid",
    "gaussian_spectrum",
    "operating_frequency",
    "effective_spectrum",
    "cpi_product_spectrum",
    "qoct_spectrum",
    "cw_swept_spectrum",
]

DEFAULT_GRID_POINTS = 8193
DEFAULT_HALFWIDTH_FACTOR = 5.0

EFFECTIVE_MODES = ("cpi_product", "qoct_given", "cw_swept")


def make_omega_grid(points: int, halfwidth: float) -> np.ndarray:
    """Uniform grid of frequency offsets, symmetric about zero.

    Built as (k - (N-1)/2) * dW so that grid[::-1] == -grid exactly in
    floating point, which the parity and symmetrisation operations rely
    on.
    """
    if points < 8:
        raise ContractError("frequency grid needs at least 8 points")
    if halfwidth <= 0.0:
        raise ContractError("frequency grid halfwidth must be positive")
    step = 2.0 * halfwidth / (points - 1)
    return (np.arange(points) - (points - 1) / 2.0) * step


def fwhm_to_domega(lambda_c: float, dlambda_fwhm: float) -> float:
    """Convert a wavelength FWHM to the angular-frequency FWHM 2 pi c dl / l^2."""
    return TWO_PI * C_VACUUM * dlambda_fwhm / lambda_c**2


@dataclass(frozen=True)
class SourceSpectrum:
    """Peak-normalised intensity spectrum on a symmetric offset grid."""

    omega0: float
    omega_grid: np.ndarray
    intensity: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.omega_grid, dtype=float)
        i = np.asarray(self.intensity, dtype=float)
        if w.shape != i.shape or w.ndim != 1:
            raise ContractError("spectrum grid and intensity must be 1-D and congruent")
        if np.any(i < 0.0) or not np.all(np.isfinite(i)):
            raise ContractError("spectral intensity must be finite and nonnegative")
        scale = float(np.max(np.abs(w)))
        if not np.allclose(w[::-1], -w, rtol=0.0, atol=1e-9 * max(scale, 1.0)):
            raise ContractError("spectrum grid must be symmetric about zero")


def gaussian_spectrum(
    lambda_c: float,
    dlambda_fwhm: float,
    points: int = DEFAULT_GRID_POINTS,
    halfwidth: float | None = None,
    halfwidth_factor: float = DEFAULT_HALFWIDTH_FACTOR,
) -> SourceSpectrum:
    """Gaussian intensity spectrum I(W) = exp(-4 ln2 W^2 / dw^2).

    lambda_c and dlambda_fwhm in metres; dw = 2 pi c dlambda / lambda_c^2.
    The grid halfwidth defaults to ``halfwidth_factor`` times dw and must
    be at least twice dw (aliasing guard).
    """
    if dlambda_fwhm <= 0.0 or lambda_c <= 0.0:
        raise ContractError("centre wavelength and bandwidth must be positive")
    domega = fwhm_to_domega(lambda_c, dlambda_fwhm)
    if halfwidth is None:
        halfwidth = halfwidth_factor * domega
    if halfwidth < 2.0 * domega:
        raise ContractError(
            f"grid halfwidth {halfwidth:.3e} rad/s is below twice the spectral "
            f"FWHM {domega:.3e} rad/s; widen the grid"
        )
    grid = make_omega_grid(points, halfwidth)
    intensity = np.exp(-4.0 * math.log(2.0) * (grid / domega) ** 2)
    return SourceSpectrum(omega0=TWO_PI * C_VACUUM / lambda_c, omega_grid=grid, intensity=intensity)


@dataclass(frozen=True)
class ChirpedPulsePair:
    """Parameters of the oppositely-chirped pulse pair.

    beta is the chirp-rate magnitude (rad/s^2); the chirped pulse carries
    +beta and the anti-chirped one -beta. tau_rel is the delay of the
    anti-chirped pulse relative to the chirped one at the input beam
    splitter; tl_duration is the transform-limited intensity FWHM, which
    sets the residual linewidth of the sum-frequency lines.
    """

    lambda_c: float
    dlambda_chirped: float
    dlambda_antichirped: float
    beta: float
    tau_rel: float = 0.0
    tl_duration: float = 100e-15

    def __post_init__(self):
        if self.beta <= 0.0:
            raise ContractError("chirp rate must be positive")
        if self.dlambda_chirped <= 0.0 or self.dlambda_antichirped <= 0.0:
            raise ContractError("pulse bandwidths must be positive")
        if self.tl_duration <= 0.0:
            raise ContractError("transform-limited duration must be positive")

    @classmethod
    def from_stretched(
        cls,
        lambda_c: float,
        dlambda_chirped: float,
        dlambda_antichirped: float,
        stretched_duration: float,
        tau_rel: float = 0.0,
        tl_duration: float = 100e-15,
    ) -> "ChirpedPulsePair":
        """Chirp rate from bandwidth over stretched duration (same rate
        for both pulses; their durations differ only through bandwidth)."""
        if stretched_duration <= 0.0:
            raise ContractError("stretched duration must be positive")
        beta = fwhm_to_domega(lambda_c, dlambda_chirped) / stretched_duration
        return cls(
            lambda_c=lambda_c,
            dlambda_chirped=dlambda_chirped,
            dlambda_antichirped=dlambda_antichirped,
            beta=beta,
            tau_rel=tau_rel,
            tl_duration=tl_duration,
        )

    def bandwidth_omega(self) -> tuple[float, float]:
        return (
            fwhm_to_domega(self.lambda_c, self.dlambda_chirped),
            fwhm_to_domega(self.lambda_c, self.dlambda_antichirped),
        )

    def stretched_durations(self) -> tuple[float, float]:
        """Intensity-FWHM durations implied by bandwidth / chirp rate."""
        dw_c, dw_a = self.bandwidth_omega()
        return dw_c / self.beta, dw_a / self.beta


def operating_frequency(pair: ChirpedPulsePair, chirp_sign: float = 1.0) -> float:
    """Average instantaneous frequency of the overlapped pulse pair.

    With instantaneous frequencies wc + s*beta*t and wc - s*beta*(t - tau)
    the average is time independent: w0 = wc + s*beta*tau/2. Flipping
    ``chirp_sign`` mirrors the tuning direction.
    """
    dw_c, dw_a = pair.bandwidth_omega()
    if abs(pair.beta * pair.tau_rel) >= 0.5 * (dw_c + dw_a):
        raise ContractError(
            "relative delay detunes the pulses beyond their spectral overlap; "
            "|beta*tau_rel| must stay below half the summed bandwidth"
        )
    return TWO_PI * C_VACUUM / pair.lambda_c + chirp_sign * pair.beta * pair.tau_rel / 2.0


@dataclass(frozen=True)
class EffectiveSpectrum:
    """Spectral kernel Lambda(W) entering the interference integrals."""

    mode: str
    omega0: float
    omega_grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if self.mode not in EFFECTIVE_MODES:
            raise ContractError(f"unknown effective-spectrum mode {self.mode!r}")
        v = np.asarray(self.values, dtype=float)
        if np.any(v < 0.0) or not np.all(np.isfinite(v)):
            raise ContractError("effective spectrum must be finite and nonnegative")
        w = np.asarray(self.omega_grid, dtype=float)
        if w.shape != v.shape:
            raise ContractError("effective spectrum grid and values must be congruent")
        scale = float(np.max(np.abs(w))) if w.size else 0.0
        if w.ndim != 1 or scale == 0.0 or not np.allclose(
            w[::-1], -w, rtol=0.0, atol=1e-9 * scale
        ):
            raise ContractError("effective spectrum grid must be symmetric about zero")


def _require_same_grid(a: SourceSpectrum, b: SourceSpectrum) -> None:
    if a.omega_grid.shape != b.omega_grid.shape or not np.array_equal(a.omega_grid, b.omega_grid):
        raise ContractError("source spectra must share one frequency grid")
    if a.omega0 != b.omega0:
        raise ContractError("source spectra must share the operating frequency")


def cpi_product_spectrum(chirped: SourceSpectrum, antichirped: SourceSpectrum) -> EffectiveSpectrum:
    """Lambda(W) = I_c(W) I_a(-W), symmetrised to its even part.

    Only the even part contributes to the (real) interference signal, so
    the kernel is stored symmetric by construction: the reversal uses
    index order, making Lambda(W) == Lambda(-W) exact.
    """
    _require_same_grid(chirped, antichirped)
    product = chirped.intensity * antichirped.intensity[::-1]
    sym = 0.5 * (product + product[::-1])
    return EffectiveSpectrum(
        mode="cpi_product", omega0=chirped.omega0, omega_grid=chirped.omega_grid, values=sym
    )


def qoct_spectrum(omega0: float, omega_grid: np.ndarray, values: np.ndarray) -> EffectiveSpectrum:
    """Entangled-photon spectrum taken as given (bitwise passthrough)."""
    return EffectiveSpectrum(
        mode="qoct_given", omega0=omega0, omega_grid=np.asarray(omega_grid, dtype=float),
        values=np.asarray(values, dtype=float),
    )


def cw_swept_spectrum(omega0: float, omega_grid: np.ndarray, values: np.ndarray) -> EffectiveSpectrum:
    """Sweep distribution G(W) of anticorrelated CW lasers, taken as given."""
    return EffectiveSpectrum(
        mode="cw_swept", omega0=omega0, omega_grid=np.asarray(omega_grid, dtype=float),
        values=np.asarray(values, dtype=float),
    )


def effective_spectrum(mode: str, **inputs) -> EffectiveSpectrum:
    """Mode dispatcher.

    cpi_product: chirped=SourceSpectrum, antichirped=SourceSpectrum
    qoct_given / cw_swept: omega0, omega_grid, values
    """
    if mode == "cpi_product":
        return cpi_product_spectrum(inputs["chirped"], inputs["antichirped"])
    if mode == "qoct_given":
        return qoct_spectrum(inputs["omega0"], inputs["omega_grid"], inputs["values"])
    if mode == "cw_swept":
        return cw_swept_spectrum(inputs["omega0"], inputs["omega_grid"], inputs["values"])
    raise ContractError(f"unknown effective-spectrum mode {mode!r}")
