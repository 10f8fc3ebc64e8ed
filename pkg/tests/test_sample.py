import numpy as np
import pytest

from cpilab.constants import C_VACUUM, TWO_PI
from cpilab.errors import ConfigError, ValidityError
from cpilab.materials import get_material, phase_expansion, refractive_index, spectral_phase
from cpilab.sample import (
    BulkElement,
    Interface,
    LayerStack,
    transfer_function,
    with_bulk_dispersion,
)
from cpilab.spectra import make_omega_grid

W0 = TWO_PI * C_VACUUM / 790.8e-9
GRID = make_omega_grid(2049, 1.6e14)


def coverslip(paper_glass, d_um, r1=0.2, r2=0.2, bulk=None):
    return LayerStack(
        interfaces=(Interface(r1), Interface(r2)),
        gaps=((d_um * 1e-6, paper_glass),),
        bulk=bulk,
    )


def test_single_interface_constant_response():
    stack = LayerStack(interfaces=(Interface(0.2),))
    tf = transfer_function(stack, GRID, W0)
    assert np.array_equal(tf.H, np.full(GRID.shape, 0.2 + 0j))


def test_degenerate_gap_sums_amplitudes(paper_glass):
    stack = coverslip(paper_glass, 0.0, r1=0.2, r2=0.15)
    tf = transfer_function(stack, GRID, W0)
    assert np.allclose(tf.H, 0.35, rtol=0, atol=1e-15)


def test_coverslip_center_value_matches_scalar(paper_glass, coverslip_d_um):
    tf = transfer_function(coverslip(paper_glass, coverslip_d_um), GRID, W0)
    n = refractive_index(paper_glass, TWO_PI * C_VACUUM / W0)
    k0 = n * W0 / C_VACUUM
    expected = 0.2 + 0.2 * np.exp(2j * k0 * coverslip_d_um * 1e-6)
    center = tf.H[GRID.size // 2]
    assert center == pytest.approx(expected, rel=1e-12)


def test_bulk_zero_length_is_identity(paper_glass, coverslip_d_um):
    tf = transfer_function(coverslip(paper_glass, coverslip_d_um), GRID, W0)
    tf2 = with_bulk_dispersion(tf, get_material("calcite_o"), 0.0)
    assert np.array_equal(tf.H, tf2.H)


def test_bulk_is_pure_phase(paper_glass, coverslip_d_um):
    tf = transfer_function(coverslip(paper_glass, coverslip_d_um), GRID, W0)
    tf2 = with_bulk_dispersion(tf, get_material("calcite_o"), 80.58e-3)
    assert np.max(np.abs(np.abs(tf2.H) - np.abs(tf.H))) < 1e-12


def test_bulk_phase_equals_spectral_phase(paper_glass, coverslip_d_um):
    tf = transfer_function(coverslip(paper_glass, coverslip_d_um), GRID, W0)
    tf2 = with_bulk_dispersion(tf, get_material("calcite_o"), 80.58e-3, passes=1)
    phi = spectral_phase(get_material("calcite_o"), 80.58e-3, W0, GRID, "full")
    assert np.allclose(tf2.H, tf.H * np.exp(1j * phi), rtol=1e-12, atol=0.0)


def test_stack_bulk_matches_post_hoc_application(paper_glass, coverslip_d_um):
    bulk = BulkElement(get_material("calcite_o"), 80.58e-3, passes=1)
    combined = transfer_function(coverslip(paper_glass, coverslip_d_um, bulk=bulk), GRID, W0)
    separate = with_bulk_dispersion(
        transfer_function(coverslip(paper_glass, coverslip_d_um), GRID, W0),
        get_material("calcite_o"),
        80.58e-3,
    )
    assert np.allclose(combined.H, separate.H, rtol=1e-12, atol=0.0)


def test_linearity_in_reflection_amplitudes(paper_glass, coverslip_d_um):
    h_full = transfer_function(coverslip(paper_glass, coverslip_d_um, r2=0.2), GRID, W0).H
    h_front = transfer_function(coverslip(paper_glass, coverslip_d_um, r2=0.0), GRID, W0).H
    h_scaled = transfer_function(coverslip(paper_glass, coverslip_d_um, r2=0.1), GRID, W0).H
    assert np.allclose(h_scaled - h_front, 0.5 * (h_full - h_front), rtol=1e-12, atol=1e-15)


def test_magnitude_oscillation_period(paper_glass):
    # |H|^2 of a thin two-surface stack oscillates with period pi/(alpha d)
    d = 2e-6
    tf = transfer_function(coverslip(paper_glass, d * 1e6), GRID, W0)
    phase = np.unwrap(np.angle((tf.H - 0.2) / 0.2))
    slope = np.polyfit(GRID, phase, 1)[0]
    alpha = phase_expansion(paper_glass, W0).alpha
    assert slope == pytest.approx(2.0 * alpha * d, rel=1e-3)
    assert TWO_PI / slope == pytest.approx(np.pi / (alpha * d), rel=1e-3)


def test_grid_refinement_reproduces_shared_nodes(paper_glass, coverslip_d_um):
    coarse = make_omega_grid(1025, 1e14)
    fine = make_omega_grid(2049, 1e14)
    stack = coverslip(paper_glass, coverslip_d_um)
    h_coarse = transfer_function(stack, coarse, W0).H
    h_fine = transfer_function(stack, fine, W0).H
    assert np.array_equal(h_fine[::2], h_coarse)


def test_magnitude_bound(paper_glass, coverslip_d_um):
    tf = transfer_function(coverslip(paper_glass, coverslip_d_um), GRID, W0)
    assert np.max(np.abs(tf.H)) <= 0.4 + 1e-12


def test_gap_material_validity_enforced():
    silica = get_material("fused_silica")
    stack = LayerStack(
        interfaces=(Interface(0.2), Interface(0.2)), gaps=((100e-6, silica),)
    )
    wide = make_omega_grid(64, 0.9 * W0)  # reaches far outside validity
    with pytest.raises(ValidityError):
        transfer_function(stack, wide, W0)


def test_inconsistent_stack_rejected(paper_glass):
    with pytest.raises(ConfigError, match="gaps"):
        LayerStack(interfaces=(Interface(0.2), Interface(0.2)), gaps=())
    with pytest.raises(ConfigError, match="exceeds 1"):
        Interface(1.2)
    with pytest.raises(ConfigError, match="at least one"):
        LayerStack(interfaces=())
