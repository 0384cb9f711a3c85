"""
Configurational-coordinate lineshapes: displacements, Franck-Condon
overlaps, thermal weights and broadened spectra
"""
import math

import numpy as np
import pytest
from scipy import constants as codata
from scipy.integrate import trapezoid
from scipy.signal import find_peaks

from src.core.constants import CONSTANTS
from src.core.errors import ConsistencyError, DomainError, ResourceGuardError, TruncationError
from src.domain.schemas import GeometryPair, Relation, Shell, VibronicModel
from src.engine.spectra import (
    composite_spectrum,
    effective_frequency,
    fc_overlap,
    fc_table,
    huang_rhys,
    lineshape,
    mass_weighted_displacement,
    mode_weights,
    stick_spectrum,
    thermal_weights,
)


def _delta_Q_for(S: float, omega: float) -> float:
    return math.sqrt(2.0 * S * CONSTANTS.hbar2_over_amu_A2_meV / omega)


def _shell(m: int, R: float, multiplicity: int = 12) -> Shell:
    return Shell(m=m, m_prime=m, R=R, multiplicity=multiplicity,
                 relation=Relation.SAME, sublattice=Relation.SAME)


# ---------------------------------------------------------------------------
# displacements and effective modes
# ---------------------------------------------------------------------------

def test_displacement_of_single_atom():
    pair = GeometryPair(labels=["C"], masses=[12.0], ground=[(0.0, 0.0, 0.0)], excited=[(0.1, 0.0, 0.0)])
    delta_Q, projections = mass_weighted_displacement(pair)
    assert delta_Q == pytest.approx(math.sqrt(12.0) * 0.1)
    assert projections is None


def test_identical_geometries_have_no_displacement():
    positions = [(0.0, 0.0, 0.0), (0.89, 0.89, 0.89)]
    pair = GeometryPair(labels=["C", "C"], masses=[12.0, 12.0], ground=positions, excited=positions)
    assert mass_weighted_displacement(pair)[0] == 0.0


def test_mode_projections():
    pair = GeometryPair(
        labels=["B", "N"], masses=[11.0, 14.0],
        ground=[(0.0, 0.0, 0.0), (2.0, 0.0, 0.0)],
        excited=[(0.05, 0.0, 0.0), (2.0, -0.02, 0.0)],
    )
    modes = np.zeros((2, 2, 3))
    modes[0, 0, 0] = 1.0
    modes[1, 1, 1] = 1.0
    delta_Q, projections = mass_weighted_displacement(pair, modes)
    assert projections == pytest.approx([math.sqrt(11.0) * 0.05, -math.sqrt(14.0) * 0.02])
    assert delta_Q**2 == pytest.approx(np.sum(projections**2))
    weights = mode_weights(projections)
    assert weights.sum() == pytest.approx(1.0)


def test_mismatched_atom_lists():
    pair = GeometryPair(labels=["C", "C"], masses=[12.0], ground=[(0.0, 0.0, 0.0)], excited=[(0.0, 0.0, 0.0)])
    with pytest.raises(ConsistencyError):
        mass_weighted_displacement(pair)


def test_effective_frequency_examples():
    assert effective_frequency([45.0], [1.0]) == pytest.approx(45.0)
    assert effective_frequency([20.0, 40.0], [0.5, 0.5]) == pytest.approx(math.sqrt(1000.0))
    assert effective_frequency([33.0, 33.0, 33.0], [0.2, 0.3, 0.5]) == pytest.approx(33.0)
    with pytest.raises(DomainError):
        effective_frequency([20.0, 40.0], [0.5, 0.6])


def test_huang_rhys_examples():
    assert huang_rhys(0.0, 60.0) == 0.0
    assert huang_rhys(1.6693, 60.0) == pytest.approx(20.0, abs=0.01)


def test_huang_rhys_unit_bridge():
    """S = Ω·ΔQ²/2ħ evaluated in SI gives exactly one"""
    energy_meV = 50.0
    omega = energy_meV * 1e-3 * codata.e / codata.hbar
    amu = codata.physical_constants["atomic mass constant"][0]
    delta_Q = math.sqrt(2.0 * codata.hbar / omega) / (math.sqrt(amu) * 1e-10)
    assert huang_rhys(delta_Q, energy_meV) == pytest.approx(1.0, abs=1e-9)


# ---------------------------------------------------------------------------
# Franck-Condon overlaps
# ---------------------------------------------------------------------------

def _oscillator_states(alpha: float, x: np.ndarray, n_levels: int) -> list:
    states = [(alpha / math.pi) ** 0.25 * np.exp(-alpha * x * x / 2.0)]
    previous = np.zeros_like(x)
    for n in range(n_levels - 1):
        nxt = (math.sqrt(2.0 / (n + 1)) * math.sqrt(alpha) * x * states[n]
               - math.sqrt(n / (n + 1)) * previous)
        previous = states[n]
        states.append(nxt)
    return states


def _overlaps_by_quadrature(n_e, n_g, omega_e, omega_g, delta_Q):
    x = np.arange(-8.0, 10.0, 0.002)
    excited = _oscillator_states(omega_e / CONSTANTS.hbar2_over_amu_A2_meV, x, n_e)
    ground = _oscillator_states(omega_g / CONSTANTS.hbar2_over_amu_A2_meV, x - delta_Q, n_g)
    return np.array([[np.sum(e * g) * 0.002 for g in ground] for e in excited])


@pytest.mark.parametrize(
    "omega_e, omega_g, delta_Q",
    [(60.0, 60.0, 1.0), (66.0, 70.0, 0.5), (40.0, 55.0, 1.2), (30.0, 20.0, 0.3)],
)
def test_fc_table_matches_quadrature(omega_e, omega_g, delta_Q):
    table = fc_table(4, 12, omega_e, omega_g, delta_Q)
    expected = _overlaps_by_quadrature(4, 12, omega_e, omega_g, delta_Q)
    assert np.allclose(table, expected, atol=1e-8)


def test_fc_equal_frequencies_give_poisson():
    S, omega = 1.0, 50.0
    table = fc_table(1, 15, omega, omega, _delta_Q_for(S, omega))
    poisson = [math.exp(-S + n * math.log(S) - math.lgamma(n + 1)) for n in range(15)]
    assert table[0] ** 2 == pytest.approx(poisson, abs=1e-12)


def test_fc_table_matches_quadrature_random_draws():
    """m, n ≤ 20 over 50 random oscillator pairs"""
    rng = np.random.default_rng(20240107)
    worst = 0.0
    for _ in range(50):
        omega_e, omega_g = rng.uniform(25.0, 90.0, 2)
        delta_Q = rng.uniform(0.0, 1.2)
        table = fc_table(21, 21, omega_e, omega_g, delta_Q)
        expected = _overlaps_by_quadrature(21, 21, omega_e, omega_g, delta_Q)
        worst = max(worst, float(np.abs(table - expected).max()))
    assert worst < 1e-8


@pytest.mark.parametrize("S", [0.5, 5.0, 20.0])
def test_fc_zero_temperature_row_is_poisson(S):
    omega = 50.0
    table = fc_table(1, 61, omega, omega, _delta_Q_for(S, omega))
    poisson = np.array([math.exp(-S + n * math.log(S) - math.lgamma(n + 1)) for n in range(61)])
    assert np.abs(table[0] ** 2 / poisson - 1.0).max() < 1e-8


@pytest.mark.parametrize("omega_e, omega_g, delta_Q", [(66.0, 70.0, 0.5), (40.0, 55.0, -1.2), (30.0, 20.0, 0.9)])
def test_fc_mirror_symmetry(omega_e, omega_g, delta_Q):
    forward = fc_table(21, 21, omega_e, omega_g, delta_Q)
    mirrored = fc_table(21, 21, omega_g, omega_e, -delta_Q)
    assert np.allclose(np.abs(mirrored.T), np.abs(forward), rtol=0, atol=1e-10)


def test_fc_rows_are_complete():
    table = fc_table(6, 201, 50.0, 60.0, _delta_Q_for(3.0, 60.0))
    assert (table**2).sum(axis=1) == pytest.approx(np.ones(6), abs=1e-8)


def test_fc_identity_without_displacement():
    assert np.allclose(fc_table(6, 6, 45.0, 45.0, 0.0), np.eye(6), atol=1e-12)


def test_fc_overlap_reads_table():
    assert fc_overlap(2, 5, 66.0, 70.0, 0.5) == pytest.approx(fc_table(3, 6, 66.0, 70.0, 0.5)[2, 5])
    with pytest.raises(DomainError):
        fc_overlap(-1, 0, 66.0, 70.0, 0.5)


def test_fc_level_cap():
    with pytest.raises(ResourceGuardError):
        fc_table(202, 1, 60.0, 60.0, 1.0)


def test_fc_table_is_read_only(fresh_cache):
    table = fc_table(2, 3, 60.0, 60.0, 1.0)
    with pytest.raises(ValueError):
        table[0, 0] = 1.0


# ---------------------------------------------------------------------------
# thermal weights and lineshapes
# ---------------------------------------------------------------------------

def test_thermal_weights():
    assert thermal_weights(30.0, 0.0).tolist() == [1.0]
    assert thermal_weights(30.0, 5.0).tolist() == [1.0]
    w = thermal_weights(40.0, 300.0)
    assert w.sum() == pytest.approx(1.0)
    x = 40e-3 / (CONSTANTS.boltzmann_eV_per_K * 300.0)
    assert w[1] / w[0] == pytest.approx(math.exp(-x))
    with pytest.raises(DomainError):
        thermal_weights(40.0, -1.0)


def test_stick_weights_sum_to_one():
    model = VibronicModel.from_displacement(0.75, 45.0, 43.0, 1.9)
    energies, weights, zero_phonon = stick_spectrum(model, 5.0)
    assert weights.sum() == pytest.approx(1.0, abs=1e-7)
    assert energies[zero_phonon] == pytest.approx([1.9])
    assert energies.min() < 1.9


def test_undisplaced_model_is_single_lorentzian():
    model = VibronicModel.from_displacement(0.0, 40.0, 40.0, 2.0)
    spectrum = lineshape(model, T=0.0, zpl_lorentzian_gamma=3.0, sideband_gaussian_sigma=30.0)
    assert trapezoid(spectrum.intensity, spectrum.energy) == pytest.approx(1.0)
    assert spectrum.zpl_weight == pytest.approx(1.0)
    assert spectrum.energy[spectrum.intensity.argmax()] == pytest.approx(2.0, abs=1e-6)
    window = 2.0 / math.pi * math.atan(0.5 / 0.003)
    assert spectrum.intensity.max() == pytest.approx(1.0 / (math.pi * 0.003) / window, rel=1e-3)


def test_strong_coupling_hides_zero_phonon_line():
    model = VibronicModel.from_displacement(_delta_Q_for(20.0, 40.0), 40.0, 40.0, 4.5)
    grid = np.arange(1.5, 5.0, 0.001)
    spectrum = lineshape(model, 5.0, grid, 3.0, 30.0)
    assert spectrum.zpl_weight < 1e-8
    peaks, _ = find_peaks(spectrum.intensity, prominence=0.01 * spectrum.intensity.max())
    assert len(peaks) == 1
    # sideband maximum sits near E_zpl − S·ħΩ
    assert spectrum.energy[peaks[0]] == pytest.approx(4.5 - 0.8, abs=0.05)


@pytest.mark.parametrize("S", [0.5, 2.0, 5.0])
def test_first_moment_gives_stokes_shift(S):
    omega = 40.0
    model = VibronicModel.from_displacement(_delta_Q_for(S, omega), omega, omega, 2.5)
    spectrum = lineshape(model, T=0.0, zpl_lorentzian_gamma=3.0, sideband_gaussian_sigma=30.0)
    mean = trapezoid(spectrum.energy * spectrum.intensity, spectrum.energy)
    assert (model.E_zpl - mean) * 1e3 == pytest.approx(S * omega, rel=0.05)


def test_low_temperature_matches_ground_state():
    model = VibronicModel.from_displacement(0.5, 30.0, 30.0, 2.2)
    cold = lineshape(model, T=0.0)
    five_kelvin = lineshape(model, T=5.0)
    assert np.allclose(five_kelvin.intensity, cold.intensity, rtol=0, atol=1e-12)


def test_narrow_grid_truncates():
    model = VibronicModel.from_displacement(_delta_Q_for(2.0, 50.0), 50.0, 50.0, 2.0)
    with pytest.raises(TruncationError):
        lineshape(model, grid=np.linspace(1.95, 2.05, 101))


def test_broadening_must_be_positive():
    model = VibronicModel.from_displacement(0.2, 40.0, 40.0, 2.0)
    with pytest.raises(DomainError):
        lineshape(model, zpl_lorentzian_gamma=0.0)


def test_inconsistent_huang_rhys_rejected():
    with pytest.raises(ValueError):
        VibronicModel(delta_Q=1.0, omega_g=40.0, omega_e=40.0, S_g=1.0, S_e=1.0, E_zpl=2.0)


# ---------------------------------------------------------------------------
# composite spectra
# ---------------------------------------------------------------------------

def test_composite_of_one_shell_is_its_lineshape():
    model = VibronicModel.from_displacement(0.25, 40.0, 40.0, 2.1)
    grid = np.arange(1.5, 2.4, 0.001)
    single = lineshape(model, 5.0, grid, 3.0, 30.0)
    composite = composite_spectrum([(_shell(7, 9.6), model)], 5.0, grid, 3.0, 30.0)
    assert np.allclose(composite.intensity, single.intensity, rtol=1e-12, atol=1e-12)
    assert list(composite.components) == ["m7"]


def test_weak_coupling_resolves_neighbouring_shells():
    omega = 40.0
    delta_Q = _delta_Q_for(0.5, omega)
    shells = [
        (_shell(1, 5.0), VibronicModel.from_displacement(delta_Q, omega, omega, 2.000)),
        (_shell(2, 5.5), VibronicModel.from_displacement(delta_Q, omega, omega, 2.010)),
    ]
    grid = np.arange(1.4, 2.3, 0.0002)
    spectrum = composite_spectrum(shells, 5.0, grid, 3.0, 30.0)
    window = (spectrum.energy >= 1.995) & (spectrum.energy <= 2.015)
    peaks, _ = find_peaks(spectrum.intensity[window])
    assert len(peaks) == 2
    assert spectrum.energy[window][peaks] == pytest.approx([2.000, 2.010], abs=5e-4)
    total = spectrum.components["m1"] + spectrum.components["m2"]
    assert np.allclose(total, spectrum.intensity)


def test_strong_coupling_merges_neighbouring_shells():
    omega = 40.0
    delta_Q = _delta_Q_for(20.0, omega)
    shells = [
        (_shell(1, 5.0), VibronicModel.from_displacement(delta_Q, omega, omega, 4.500)),
        (_shell(2, 5.5), VibronicModel.from_displacement(delta_Q, omega, omega, 4.510)),
    ]
    grid = np.arange(1.5, 5.0, 0.001)
    spectrum = composite_spectrum(shells, 5.0, grid, 3.0, 30.0)
    peaks, _ = find_peaks(spectrum.intensity, prominence=0.01 * spectrum.intensity.max())
    assert len(peaks) == 1


def test_composite_weights_by_multiplicity():
    model_a = VibronicModel.from_displacement(0.2, 40.0, 40.0, 2.0)
    model_b = VibronicModel.from_displacement(0.2, 40.0, 40.0, 2.2)
    grid = np.arange(1.5, 2.7, 0.001)
    spectrum = composite_spectrum(
        [(_shell(1, 5.0, multiplicity=24), model_a), (_shell(2, 5.5, multiplicity=8), model_b)],
        5.0, grid, 3.0, 30.0,
    )
    area_a = trapezoid(spectrum.components["m1"], grid)
    area_b = trapezoid(spectrum.components["m2"], grid)
    assert area_a / area_b == pytest.approx(3.0, rel=1e-9)
    with pytest.raises(DomainError):
        composite_spectrum([])
