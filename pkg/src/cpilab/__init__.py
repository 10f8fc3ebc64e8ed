"""cpi-lab: chirped-pulse interferometry axial-imaging simulator.

Forward models for chirped-pulse, white-light, and quantum-style axial
scans of layered samples, time-domain sum-frequency spectrograms, and
the analysis tools (feature extraction, thickness recovery, artifact
identification by operating-wavelength sweeps) that go with them.
"""

from .analysis import (
    Feature,
    SweepResult,
    classify_features,
    detect_features,
    fit_visibility_oscillation,
    predict_artifact_flip,
    thickness_from_dips,
    visibility,
    wli_envelope,
)
from .engine import (
    Interferogram,
    Spectrogram,
    cpi_interferogram,
    integrate_filtered,
    qoct_interferogram,
    sfg_spectrogram,
    wli_interferogram,
)
from .errors import ConfigError, ContractError, CpiLabError, ScanFormatError, ValidityError
from .materials import (
    DispersiveMaterial,
    PhaseExpansion,
    get_material,
    group_index,
    load_materials_file,
    phase_expansion,
    refractive_index,
    register_material,
    registry_names,
    spectral_phase,
    wavevector,
)
from .sample import (
    BulkElement,
    Interface,
    LayerStack,
    TransferFunction,
    transfer_function,
    with_bulk_dispersion,
)
from .scanio import read_scan, write_scan
from .scenarios import load_preset, preset_names, run_scenario
from .spectra import (
    ChirpedPulsePair,
    EffectiveSpectrum,
    SourceSpectrum,
    cpi_product_spectrum,
    cw_swept_spectrum,
    effective_spectrum,
    gaussian_spectrum,
    make_omega_grid,
    operating_frequency,
    qoct_spectrum,
)

__version__ = "0.1.0"
