"""
1D configurational-coordinate photoluminescence lineshapes

Mass-weighted displacement ΔQ (amu^½·Å), effective phonon energies ħΩ
(meV), Huang-Rhys factors, Franck-Condon overlaps of displaced oscillators
with different frequencies, thermal averaging over excited-state levels and
Lorentzian/Gaussian broadening. Lines sit at E_zpl + mħΩ_e − nħΩ_g, so the
sideband extends below the ZPL. The ω³ emission prefactor is not applied;
every Spectrum is a unit-area lineshape.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import trapezoid

from src.core.cache import cache_manager
from src.core.config import settings
from src.core.constants import CONSTANTS
from src.core.errors import ConsistencyError, DomainError, ResourceGuardError, TruncationError
from src.domain.schemas import GeometryPair, Shell, Spectrum, VibronicModel

logger = logging.getLogger(__name__)

# Boltzmann tail dropped from the thermal level sum
_THERMAL_TAIL = 1e-12


def mass_weighted_displacement(
    pair: GeometryPair, modes: Optional[np.ndarray] = None
) -> Tuple[float, Optional[np.ndarray]]:
    """
    Total mass-weighted displacement between two geometries.

    Args:
        pair: Ground/excited geometries with shared atom list
        modes: Optional (K, N, 3) orthonormal mass-weighted normal modes

    Returns:
        (ΔQ, ΔQ_k) where ΔQ² = Σ_a m_a |ΔR_a|² and ΔQ_k are the projections
        on the supplied modes (None without modes)
    """
    n_atoms = len(pair.labels)
    if not (len(pair.masses) == len(pair.ground) == len(pair.excited) == n_atoms):
        raise ConsistencyError(
            f"atom lists disagree: {n_atoms} labels, {len(pair.masses)} masses, "
            f"{len(pair.ground)} ground and {len(pair.excited)} excited positions"
        )
    delta_R = np.asarray(pair.excited, dtype=float) - np.asarray(pair.ground, dtype=float)
    sqrt_m = np.sqrt(np.asarray(pair.masses, dtype=float))[:, None]
    weighted = sqrt_m * delta_R
    delta_Q = float(np.sqrt(np.sum(weighted**2)))
    if modes is None:
        return delta_Q, None
    modes = np.asarray(modes, dtype=float)
    if modes.shape[1:] != (n_atoms, 3):
        raise ConsistencyError(f"mode array shape {modes.shape} does not match {n_atoms} atoms")
    return delta_Q, np.einsum("kai,ai->k", modes, weighted)


def mode_weights(delta_Q_k: Sequence[float]) -> np.ndarray:
    """p_k = ΔQ_k² / Σ ΔQ_k²"""
    q2 = np.asarray(delta_Q_k, dtype=float) ** 2
    total = q2.sum()
    if total <= 0:
        raise DomainError("mode projections are all zero")
    return q2 / total


def effective_frequency(mode_frequencies: Sequence[float], weights: Sequence[float]) -> float:
    """Ω = √(Σ p_k ω_k²); weights must be nonnegative and sum to 1"""
    w = np.asarray(weights, dtype=float)
    omega = np.asarray(mode_frequencies, dtype=float)
    if w.shape != omega.shape or w.size == 0:
        raise DomainError("frequencies and weights must be nonempty and of equal length")
    if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-9:
        raise DomainError(f"weights must be >= 0 and sum to 1, got sum {w.sum():.12g}")
    return float(np.sqrt(np.sum(w * omega**2)))


def huang_rhys(delta_Q: float, omega: float) -> float:
    """
    S = Ω·ΔQ²/(2ħ).

    Args:
        delta_Q: amu^½·Å
        omega: ħΩ in meV
    """
    if delta_Q < 0 or omega <= 0:
        raise DomainError(f"need delta_Q >= 0 and omega > 0, got {delta_Q}, {omega}")
    return omega * delta_Q**2 / (2.0 * CONSTANTS.hbar2_over_amu_A2_meV)


def _stiffness(omega: float) -> float:
    """Oscillator constant Ω/ħ in 1/(amu·Å²) for ħΩ in meV"""
    return omega / CONSTANTS.hbar2_over_amu_A2_meV


def _fc_recursion(n_e: int, n_g: int, omega_e: float, omega_g: float, delta_Q: float) -> np.ndarray:
    ae, ag = _stiffness(omega_e), _stiffness(omega_g)
    s = ae + ag
    a = (ae - ag) / s
    e = 2.0 * math.sqrt(ae * ag) / s
    b_e = math.sqrt(2.0) * delta_Q * ag * math.sqrt(ae) / s
    b_g = math.sqrt(2.0) * delta_Q * ae * math.sqrt(ag) / s

    table = np.zeros((n_e, n_g))
    table[0, 0] = math.sqrt(e) * math.exp(-ae * ag * delta_Q**2 / (2.0 * s))
    # row 0 by recursion in the ground-state index
    for n in range(n_g - 1):
        prev = table[0, n - 1] if n > 0 else 0.0
        table[0, n + 1] = (-a * math.sqrt(n) * prev - b_g * table[0, n]) / math.sqrt(n + 1)
    # remaining rows by recursion in the excited-state index
    sqrt_n = np.sqrt(np.arange(n_g))
    for m in range(n_e - 1):
        shifted = np.concatenate([[0.0], table[m, :-1]])
        prev = table[m - 1] if m > 0 else 0.0
        table[m + 1] = (
            a * math.sqrt(m) * prev + b_e * table[m] + e * sqrt_n * shifted
        ) / math.sqrt(m + 1)
    return table


def fc_table(n_e: int, n_g: int, omega_e: float, omega_g: float, delta_Q: float) -> np.ndarray:
    """
    Franck-Condon amplitudes ⟨χ_em|χ_gn⟩ for m < n_e, n < n_g.

    Built by two-index recursion from the analytic ⟨0|0⟩ seed; the result
    is cached and read-only.

    Raises:
        ResourceGuardError: a level index above FC_LEVEL_CAP
    """
    cap = settings.FC_LEVEL_CAP
    if n_e < 1 or n_g < 1:
        raise DomainError("table needs at least one level per state")
    if n_e - 1 > cap or n_g - 1 > cap:
        raise ResourceGuardError(f"vibrational level {max(n_e, n_g) - 1} above cap {cap}")
    if omega_e <= 0 or omega_g <= 0:
        raise DomainError(f"frequencies must be positive, got {omega_e}, {omega_g}")

    def compute():
        table = _fc_recursion(n_e, n_g, omega_e, omega_g, delta_Q)
        table.setflags(write=False)
        return table

    return cache_manager.get_or_compute(
        compute, op="fc_table", n_e=n_e, n_g=n_g,
        omega_e=omega_e, omega_g=omega_g, delta_Q=delta_Q,
    )


def fc_overlap(m: int, n: int, omega_e: float, omega_g: float, delta_Q: float) -> float:
    """Overlap ⟨χ_em|χ_gn⟩ of excited level m with ground level n"""
    if m < 0 or n < 0:
        raise DomainError(f"levels must be >= 0, got m={m}, n={n}")
    return float(fc_table(m + 1, n + 1, omega_e, omega_g, delta_Q)[m, n])


def thermal_weights(omega_e: float, T: float) -> np.ndarray:
    """
    Boltzmann occupations of excited-state levels, tail below 1e-12 dropped.

    Returns:
        Renormalized weights w_0..w_M
    """
    if T < 0:
        raise DomainError(f"temperature must be >= 0, got {T}")
    if T == 0:
        return np.ones(1)
    x = omega_e * 1e-3 / (CONSTANTS.boltzmann_eV_per_K * T)
    # tail beyond level M is exp(-x(M+1))
    n_levels = max(1, math.ceil(-math.log(_THERMAL_TAIL) / x))
    if n_levels - 1 > settings.FC_LEVEL_CAP:
        raise ResourceGuardError(
            f"T = {T} K populates more than {settings.FC_LEVEL_CAP} levels of {omega_e} meV"
        )
    w = np.exp(-x * np.arange(n_levels))
    return w / w.sum()


def default_grid(model: VibronicModel, step_meV: Optional[float] = None) -> np.ndarray:
    """E_zpl ± max(10·S·ħΩ, 0.5 eV) on a uniform grid, clipped to positive energies"""
    step = (step_meV or settings.GRID_STEP_MEV) * 1e-3
    half = max(10.0 * max(model.S_g * model.omega_g, model.S_e * model.omega_e) * 1e-3, 0.5)
    lo = max(model.E_zpl - half, step)
    n = int(round((model.E_zpl + half - lo) / step)) + 1
    return lo + step * np.arange(n)


def _lorentzian(x: np.ndarray, gamma: float) -> np.ndarray:
    return gamma / np.pi / (x**2 + gamma**2)


def _gaussian(x: np.ndarray, sigma: float) -> np.ndarray:
    return np.exp(-0.5 * (x / sigma) ** 2) / (sigma * math.sqrt(2.0 * math.pi))


def stick_spectrum(model: VibronicModel, T: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Line positions and weights before broadening.

    Returns:
        (energies in eV, weights, zero-phonon mask) where the mask marks
        the m → m lines

    Raises:
        TruncationError: FC weight of a level not converged within the cap
    """
    w = thermal_weights(model.omega_e, T)
    cap = settings.FC_LEVEL_CAP
    table = fc_table(len(w), cap + 1, model.omega_e, model.omega_g, model.delta_Q)
    target = 1.0 - settings.FC_WEIGHT_TOLERANCE

    energies, weights, zero_phonon = [], [], []
    for m, w_m in enumerate(w):
        probs = table[m] ** 2
        cumulative = np.cumsum(probs)
        if cumulative[-1] < target:
            raise TruncationError(
                f"FC weight of level {m} reaches only {cumulative[-1]:.10f} within {cap} levels"
            )
        n_max = int(np.searchsorted(cumulative, target)) + 1
        n = np.arange(n_max)
        energies.append(model.E_zpl + (m * model.omega_e - n * model.omega_g) * 1e-3)
        weights.append(w_m * probs[:n_max])
        zero_phonon.append(n == m)
    logger.debug(f"{len(w)} thermal levels, up to {max(len(e) for e in energies)} ground levels")
    return np.concatenate(energies), np.concatenate(weights), np.concatenate(zero_phonon)


def lineshape(
    model: VibronicModel,
    T: Optional[float] = None,
    grid: Optional[np.ndarray] = None,
    zpl_lorentzian_gamma: Optional[float] = None,
    sideband_gaussian_sigma: Optional[float] = None,
) -> Spectrum:
    """
    Normalized luminescence lineshape of one vibronic model.

    Args:
        model: Vibronic parameters
        T: Temperature in K (settings.TEMPERATURE_K)
        grid: Uniform energy grid in eV (default_grid)
        zpl_lorentzian_gamma: Lorentzian HWHM for m → m lines, meV
        sideband_gaussian_sigma: Gaussian std for phonon lines, meV

    Returns:
        Unit-area Spectrum

    Raises:
        TruncationError: grid captures less than CAPTURE_THRESHOLD of the weight
    """
    T = settings.TEMPERATURE_K if T is None else T
    gamma = (settings.ZPL_GAMMA_MEV if zpl_lorentzian_gamma is None else zpl_lorentzian_gamma)
    sigma = (settings.SIDEBAND_SIGMA_MEV if sideband_gaussian_sigma is None else sideband_gaussian_sigma)
    if gamma <= 0 or sigma <= 0:
        raise DomainError(f"broadening must be positive, got gamma={gamma}, sigma={sigma}")
    grid = default_grid(model) if grid is None else np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 3 or np.any(np.diff(grid) <= 0):
        raise DomainError("grid must be increasing with at least 3 points")

    centres, weights, zero_phonon = stick_spectrum(model, T)
    inside = (centres >= grid[0]) & (centres <= grid[-1])
    captured = float(weights[inside].sum() / weights.sum())
    if captured < settings.CAPTURE_THRESHOLD:
        raise TruncationError(
            f"grid [{grid[0]:.4f}, {grid[-1]:.4f}] eV captures {captured:.6f} of the "
            f"line weight (< {settings.CAPTURE_THRESHOLD})"
        )

    intensity = np.zeros_like(grid)
    offsets = grid[None, :] - centres[:, None]
    intensity += weights[zero_phonon] @ _lorentzian(offsets[zero_phonon], gamma * 1e-3)
    intensity += weights[~zero_phonon] @ _gaussian(offsets[~zero_phonon], sigma * 1e-3)
    intensity /= trapezoid(intensity, grid)

    return Spectrum(
        energy=grid,
        intensity=intensity,
        temperature=T,
        gamma_meV=gamma,
        sigma_meV=sigma,
        zpl_weight=float(weights[zero_phonon].sum()),
        captured_weight=captured,
        provenance=model.label or "model",
    )


def composite_spectrum(
    shell_models: List[Tuple[Shell, VibronicModel]],
    T: Optional[float] = None,
    grid: Optional[np.ndarray] = None,
    zpl_lorentzian_gamma: Optional[float] = None,
    sideband_gaussian_sigma: Optional[float] = None,
    threads: Optional[int] = None,
) -> Spectrum:
    """
    Multiplicity-weighted sum of per-shell lineshapes on a common grid.

    Components are kept per shell (key 'm<index>'), scaled by their share of
    the total so that they add up to the returned intensity.
    """
    if not shell_models:
        raise DomainError("composite spectrum needs at least one shell")
    if grid is None:
        grids = [default_grid(model) for _, model in shell_models]
        step = grids[0][1] - grids[0][0]
        lo = min(g[0] for g in grids)
        hi = max(g[-1] for g in grids)
        grid = lo + step * np.arange(int(round((hi - lo) / step)) + 1)

    def one(item):
        _, model = item
        return lineshape(model, T, grid, zpl_lorentzian_gamma, sideband_gaussian_sigma)

    with ThreadPoolExecutor(max_workers=max(1, threads or settings.THREADS)) as pool:
        spectra = list(pool.map(one, shell_models))

    multiplicities = np.array([shell.multiplicity for shell, _ in shell_models], dtype=float)
    shares = multiplicities / multiplicities.sum()
    intensity = np.zeros_like(spectra[0].intensity)
    components = {}
    for (shell, _), spectrum, share in zip(shell_models, spectra, shares):
        part = share * spectrum.intensity
        intensity += part
        components[f"m{shell.m}"] = part
    area = trapezoid(intensity, spectra[0].energy)
    intensity /= area
    components = {k: v / area for k, v in components.items()}

    return Spectrum(
        energy=spectra[0].energy,
        intensity=intensity,
        temperature=spectra[0].temperature,
        gamma_meV=spectra[0].gamma_meV,
        sigma_meV=spectra[0].sigma_meV,
        zpl_weight=float(np.dot(shares, [s.zpl_weight for s in spectra])),
        captured_weight=float(min(s.captured_weight for s in spectra)),
        provenance="composite",
        components=components,
    )
