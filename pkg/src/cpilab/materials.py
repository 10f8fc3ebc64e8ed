"""Refractive-index models, group index, and spectral phase of bulk media.

Materials are either constant-index or Sellmeier,

    n^2(lam) = 1 + sum_i B_i lam^2 / (lam^2 - C_i),

with lam in metres internally (coefficients C_i are supplied in um^2 and
converted once). Derivatives of n up to third order are closed-form, so
group index and the wavevector expansion

    k(w0 + d) ~ k0 + alpha d + beta2 d^2/2 + beta3 d^3/6

need no finite-difference step tuning; finite differences are used only
as an independent oracle in the tests.

Every evaluation outside a material's validity range is a hard error.
Extrapolated indices would silently corrupt dispersion results, so they
are never produced.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .constants import C_VACUUM, TWO_PI
from .errors import ConfigError, ContractError, ValidityError

__all__ = [
    "DispersiveMaterial",
    "PhaseExpansion",
    "refractive_index",
    "group_index",
    "wavevector",
    "phase_expansion",
    "spectral_phase",
    "get_material",
    "register_material",
    "material_from_dict",
    "load_materials_file",
    "registry_names",
]


@dataclass(frozen=True)
class DispersiveMaterial:
    """Refractive-index model with an explicit validity range.

    model is "constant" (index ``n``) or "sellmeier" (``terms`` as a
    tuple of (B_i, C_i) pairs, C_i in um^2). ``validity_um`` is the
    inclusive wavelength range in micrometres.
    """

    name: str
    model: str
    validity_um: tuple[float, float]
    n: float | None = None
    terms: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        lo, hi = self.validity_um
        if not (0.0 < lo < hi):
            raise ConfigError(f"material {self.name!r}: bad validity range {self.validity_um}")
        if self.model == "constant":
            if self.n is None or self.n < 1.0:
                raise ConfigError(f"material {self.name!r}: constant index must be >= 1")
        elif self.model == "sellmeier":
            if not self.terms:
                raise ConfigError(f"material {self.name!r}: sellmeier model needs terms")
            for b, c_um2 in self.terms:
                if c_um2 > 0.0 and lo * lo <= c_um2 <= hi * hi:
                    raise ConfigError(
                        f"material {self.name!r}: Sellmeier pole at "
                        f"{math.sqrt(c_um2):.4f} um lies inside validity range"
                    )
        else:
            raise ConfigError(f"material {self.name!r}: unknown model {self.model!r}")


@dataclass(frozen=True)
class PhaseExpansion:
    """Taylor coefficients of k(w) about a carrier frequency w0.

    alpha = dk/dw (inverse group velocity, s/m), beta2 = d2k/dw2 (GVD,
    s^2/m), beta3 = d3k/dw3 (s^3/m).
    """

    omega0: float
    k0: float
    alpha: float
    beta2: float
    beta3: float


def _check_validity(material: DispersiveMaterial, lam_m: np.ndarray | float) -> None:
    lo, hi = material.validity_um
    lam_um = np.asarray(lam_m) * 1e6
    if np.any(lam_um < lo) or np.any(lam_um > hi):
        bad = float(np.min(lam_um)) if np.any(lam_um < lo) else float(np.max(lam_um))
        raise ValidityError(
            f"wavelength {bad:.6g} um outside validity range "
            f"[{lo:g}, {hi:g}] um of material {material.name!r}"
        )


def _index_derivs(material: DispersiveMaterial, lam_m):
    """n and its first three wavelength derivatives (SI, 1/m^k)."""
    lam = np.asarray(lam_m, dtype=float)
    if material.model == "constant":
        z = np.zeros_like(lam)
        return np.full_like(lam, material.n), z, z.copy(), z.copy()
    u = lam * lam
    f = np.ones_like(lam)
    f1 = np.zeros_like(lam)
    f2 = np.zeros_like(lam)
    f3 = np.zeros_like(lam)
    for b, c_um2 in material.terms:
        c = c_um2 * 1e-12  # m^2
        den = u - c
        f += b * u / den
        f1 += -2.0 * b * c * lam / den**2
        f2 += 2.0 * b * c * (3.0 * u + c) / den**3
        f3 += -24.0 * b * c * lam * (u + c) / den**4
    n = np.sqrt(f)
    n1 = f1 / (2.0 * n)
    n2 = f2 / (2.0 * n) - n1 * n1 / n
    n3 = (f3 - 6.0 * n1 * n2) / (2.0 * n)
    return n, n1, n2, n3


def refractive_index(material: DispersiveMaterial, lam_m):
    """Phase index n(lam). lam_m in metres, scalar or array."""
    _check_validity(material, lam_m)
    n = _index_derivs(material, lam_m)[0]
    if np.ndim(lam_m) == 0:
        return float(n)
    return n


def group_index(material: DispersiveMaterial, lam_m):
    """Group index n_g = n - lam dn/dlam, from the analytic derivative."""
    _check_validity(material, lam_m)
    n, n1, _, _ = _index_derivs(material, lam_m)
    ng = n - np.asarray(lam_m) * n1
    if np.ndim(lam_m) == 0:
        return float(ng)
    return ng


def wavevector(material: DispersiveMaterial, omega):
    """k(w) = n(2 pi c / w) * w / c. omega in rad/s, scalar or array."""
    w = np.asarray(omega, dtype=float)
    if np.any(w <= 0.0):
        raise ContractError("wavevector requires positive angular frequencies")
    lam = TWO_PI * C_VACUUM / w
    _check_validity(material, lam)
    n = _index_derivs(material, lam)[0]
    k = n * w / C_VACUUM
    if np.ndim(omega) == 0:
        return float(k)
    return k


def phase_expansion(material: DispersiveMaterial, omega0: float) -> PhaseExpansion:
    """Expand k(w) about omega0 using closed-form index derivatives.

    Chain rule from the wavelength domain:
        alpha = n_g / c
        beta2 = lam^3 n'' / (2 pi c^2)
        beta3 = -lam^4 (3 n'' + lam n''') / (4 pi^2 c^3)
    """
    lam = TWO_PI * C_VACUUM / omega0
    _check_validity(material, lam)
    n, n1, n2, n3 = (float(v) for v in _index_derivs(material, lam))
    ng = n - lam * n1
    return PhaseExpansion(
        omega0=omega0,
        k0=n * omega0 / C_VACUUM,
        alpha=ng / C_VACUUM,
        beta2=lam**3 * n2 / (TWO_PI * C_VACUUM**2),
        beta3=-(lam**4) * (3.0 * n2 + lam * n3) / (TWO_PI**2 * C_VACUUM**3),
    )


def _require_symmetric(omega_grid: np.ndarray) -> None:
    w = np.asarray(omega_grid, dtype=float)
    if w.ndim != 1 or w.size < 2:
        raise ContractError("frequency grid must be a 1-D array with >= 2 points")
    scale = float(np.max(np.abs(w)))
    if scale == 0.0 or not np.allclose(w[::-1], -w, rtol=0.0, atol=1e-9 * scale):
        raise ContractError("frequency grid must be symmetric about zero")


def spectral_phase(
    material: DispersiveMaterial,
    length: float,
    omega0: float,
    omega_grid: np.ndarray,
    parity: str = "full",
) -> np.ndarray:
    """Phase k(w0 + W) * length sampled on a symmetric offset grid W.

    parity selects the full phase, its even part (phi(W)+phi(-W))/2, or
    its odd part (phi(W)-phi(-W))/2. The parity split uses the reversed
    grid indexing, so even/odd symmetry is exact to rounding.
    """
    _require_symmetric(omega_grid)
    if length < 0.0:
        raise ContractError("propagation length must be >= 0")
    if length == 0.0:
        return np.zeros_like(np.asarray(omega_grid, dtype=float))
    phi = wavevector(material, omega0 + np.asarray(omega_grid, dtype=float)) * length
    if parity == "full":
        return phi
    if parity == "even":
        return 0.5 * (phi + phi[::-1])
    if parity == "odd":
        return 0.5 * (phi - phi[::-1])
    raise ContractError(f"unknown parity {parity!r}")


# ---------------------------------------------------------------------------
# Registry and config loading
# ---------------------------------------------------------------------------

_REGISTRY: dict[str, DispersiveMaterial] = {}


def register_material(material: DispersiveMaterial, overwrite: bool = False) -> DispersiveMaterial:
    if material.name in _REGISTRY and not overwrite:
        raise ConfigError(f"material {material.name!r} already registered")
    _REGISTRY[material.name] = material
    return material


def get_material(name: str) -> DispersiveMaterial:
    try:
        return _REGISTRY[name]
    except KeyError:
        known = ", ".join(sorted(_REGISTRY))
        raise ConfigError(f"unknown material {name!r} (known: {known})") from None


def registry_names() -> list[str]:
    return sorted(_REGISTRY)


def material_from_dict(spec: dict) -> DispersiveMaterial:
    """Build a material from its structured-text form.

    Schema: {"name": str, "model": "constant"|"sellmeier",
             "n": float (constant only),
             "terms": [{"b": float, "c_um2": float}, ...] (sellmeier only),
             "validity_um": [lo, hi], "notes": str (optional)}
    """
    if not isinstance(spec, dict):
        raise ConfigError("material definition must be an object")
    allowed = {"name", "model", "n", "terms", "validity_um", "notes"}
    unknown = set(spec) - allowed
    if unknown:
        raise ConfigError(f"material definition has unknown keys: {sorted(unknown)}")
    for key in ("name", "model", "validity_um"):
        if key not in spec:
            raise ConfigError(f"material definition missing key {key!r}")
    validity = spec["validity_um"]
    if not (isinstance(validity, (list, tuple)) and len(validity) == 2):
        raise ConfigError("validity_um must be [lo, hi] in micrometres")
    terms = ()
    if spec["model"] == "sellmeier":
        raw = spec.get("terms")
        if not isinstance(raw, list) or not raw:
            raise ConfigError(f"material {spec['name']!r}: terms must be a non-empty list")
        try:
            terms = tuple((float(t["b"]), float(t["c_um2"])) for t in raw)
        except (KeyError, TypeError) as exc:
            raise ConfigError(
                f"material {spec['name']!r}: each term needs 'b' and 'c_um2'"
            ) from exc
    return DispersiveMaterial(
        name=str(spec["name"]),
        model=str(spec["model"]),
        validity_um=(float(validity[0]), float(validity[1])),
        n=float(spec["n"]) if spec.get("n") is not None else None,
        terms=terms,
    )


def load_materials_file(path: str | Path, overwrite: bool = False) -> list[DispersiveMaterial]:
    """Load material definitions from a JSON file (a list or a single object)."""
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read materials file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"materials file {path} is not valid JSON: {exc}") from exc
    specs = data if isinstance(data, list) else [data]
    return [register_material(material_from_dict(s), overwrite=overwrite) for s in specs]


def _builtin(name, model, validity, n=None, terms=()):
    register_material(
        DispersiveMaterial(name=name, model=model, validity_um=validity, n=n, terms=terms)
    )


# Built-in registry. Sellmeier coefficients are the standard published
# fits (Malitson fused silica, Schott N-BK7, Ghosh calcite ordinary ray,
# the latter with its constant term folded into a C=0 resonance).
_builtin("vacuum", "constant", (0.01, 1000.0), n=1.0)
_builtin(
    "fused_silica",
    "sellmeier",
    (0.21, 3.71),
    terms=(
        (0.6961663, 0.0684043**2),
        (0.4079426, 0.1162414**2),
        (0.8974794, 9.896161**2),
    ),
)
_builtin(
    "bk7",
    "sellmeier",
    (0.30, 2.50),
    terms=(
        (1.03961212, 0.00600069867),
        (0.231792344, 0.0200179144),
        (1.01046945, 103.560653),
    ),
)
_builtin(
    "calcite_o",
    "sellmeier",
    (0.204, 2.172),
    terms=(
        (0.73358749, 0.0),
        (0.96464345, 0.0194325203),
        (1.82831454, 120.0),
    ),
)
