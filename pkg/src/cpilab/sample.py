"""Layered samples and their compiled reflection transfer function.

A sample is an ordered list of reflecting interfaces separated by
dispersive gaps, optionally behind a bulk dispersive element (e.g. a
pair of calcite blocks in the sample arm). The response is the
single-bounce series

    H(W) = sum_j r_j exp(i 2 sum_{m<j} k_m(w0 + W) d_m)

evaluated pointwise on a frequency-offset grid; multiple internal
reflections (etalon terms) are neglected. A bulk element multiplies H by
the pure phase exp(i passes * k_b(w0 + W) L).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ContractError
from .materials import DispersiveMaterial, _require_symmetric, wavevector

__all__ = [
    "Interface",
    "BulkElement",
    "LayerStack",
    "TransferFunction",
    "transfer_function",
    "with_bulk_dispersion",
]


@dataclass(frozen=True)
class Interface:
    """Reflecting interface with complex amplitude r, |r| <= 1."""

    r: complex

    def __post_init__(self):
        if abs(self.r) > 1.0:
            raise ConfigError(f"reflection amplitude |r| = {abs(self.r):.3f} exceeds 1")


@dataclass(frozen=True)
class BulkElement:
    material: DispersiveMaterial
    length: float
    passes: int = 1

    def __post_init__(self):
        if self.length < 0.0:
            raise ConfigError("bulk element length must be >= 0")
        if self.passes < 1:
            raise ConfigError("bulk element passes must be a positive integer")


@dataclass(frozen=True)
class LayerStack:
    """Interfaces with gaps (thickness, material) between consecutive ones."""

    interfaces: tuple[Interface, ...]
    gaps: tuple[tuple[float, DispersiveMaterial], ...] = ()
    bulk: BulkElement | None = None

    def __post_init__(self):
        if not self.interfaces:
            raise ConfigError("layer stack needs at least one interface")
        if len(self.gaps) != len(self.interfaces) - 1:
            raise ConfigError(
                f"stack with {len(self.interfaces)} interfaces needs "
                f"{len(self.interfaces) - 1} gaps, got {len(self.gaps)}"
            )
        for d, _ in self.gaps:
            if d < 0.0:
                raise ConfigError("gap thickness must be >= 0")

    def group_delays(self, omega0: float) -> np.ndarray:
        """Round-trip group delay of each interface relative to the first,
        from the gap materials' group indices (bulk element excluded)."""
        from .materials import group_index
        from .constants import C_VACUUM, TWO_PI

        lam = TWO_PI * C_VACUUM / omega0
        delays = [0.0]
        acc = 0.0
        for d, mat in self.gaps:
            acc += 2.0 * group_index(mat, lam) * d / C_VACUUM
            delays.append(acc)
        return np.array(delays)


@dataclass(frozen=True)
class TransferFunction:
    """Sampled complex H on a uniform symmetric offset grid about omega0."""

    omega0: float
    omega_grid: np.ndarray
    H: np.ndarray

    def __post_init__(self):
        if np.asarray(self.H).shape != np.asarray(self.omega_grid).shape:
            raise ContractError("transfer function grid and samples must be congruent")


def evaluate_response(stack: LayerStack, omega_abs: np.ndarray) -> np.ndarray:
    """Single-bounce H at absolute angular frequencies (no symmetry demand).

    This is the pointwise evaluator shared by the interferogram kernels
    and the time-domain synthesis; it includes the bulk-element phase.
    """
    w = np.asarray(omega_abs, dtype=float)
    phase = np.zeros_like(w)
    H = np.full_like(w, 0.0, dtype=complex)
    for j, iface in enumerate(stack.interfaces):
        if j > 0:
            d, mat = stack.gaps[j - 1]
            phase = phase + 2.0 * wavevector(mat, w) * d
        H = H + iface.r * np.exp(1j * phase)
    if stack.bulk is not None and stack.bulk.length > 0.0:
        H = H * np.exp(1j * stack.bulk.passes * wavevector(stack.bulk.material, w) * stack.bulk.length)
    return H


def transfer_function(stack: LayerStack, omega_grid: np.ndarray, omega0: float) -> TransferFunction:
    """Compile the stack to H(W) on a symmetric offset grid about omega0."""
    _require_symmetric(omega_grid)
    H = evaluate_response(stack, omega0 + np.asarray(omega_grid, dtype=float))
    return TransferFunction(omega0=omega0, omega_grid=np.asarray(omega_grid, dtype=float), H=H)


def with_bulk_dispersion(
    tf: TransferFunction, material: DispersiveMaterial, length: float, passes: int = 1
) -> TransferFunction:
    """Multiply H by the bulk propagation phase exp(i passes k(w) L).

    Pure phase: |H| is unchanged pointwise.
    """
    if length < 0.0:
        raise ContractError("bulk length must be >= 0")
    if length == 0.0:
        return tf
    phi = passes * wavevector(material, tf.omega0 + tf.omega_grid) * length
    return TransferFunction(omega0=tf.omega0, omega_grid=tf.omega_grid, H=tf.H * np.exp(1j * phi))
