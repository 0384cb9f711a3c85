"""
Field and radiation response of a DAP

Stark shifts and their quadratic fit, dipole-dipole coupling against the
NV spin-spin reference, and radiative lifetimes.
"""
import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq

from src.core.config import settings
from src.core.constants import CONSTANTS, ev_to_hz
from src.core.errors import DomainError, FitError
from src.core.utils import log_grid
from src.domain.schemas import (
    InteractionMap,
    InteractionQuery,
    InteractionRange,
    LifetimeInput,
    StarkModel,
)

logger = logging.getLogger(__name__)

DEFAULT_THRESHOLDS_HZ = (100e6, 1e6)


def stark_shift(model: StarkModel, E: float) -> float:
    """ΔE_zpl = −Δμ·E − ½·Δα·E² in eV for a field E in V/Å"""
    return -model.delta_mu * E - 0.5 * model.delta_alpha * E * E


def stark_curve(model: StarkModel, fields: Sequence[float]) -> List[Tuple[float, float]]:
    """(E, ΔE_zpl) pairs, including the model offset"""
    return [(float(E), model.offset + stark_shift(model, E)) for E in fields]


def fit_stark(points: Sequence[Tuple[float, float]]) -> StarkModel:
    """
    Quadratic least-squares fit of a Stark curve.

    ΔE = c0 + c1·E + c2·E², so Δμ = −c1 and Δα = −2·c2. Standard errors
    come from the residual variance (zero for exactly determined fits).

    Args:
        points: (field in V/Å, shift in eV) pairs

    Raises:
        FitError: fewer than three distinct fields
    """
    data = np.asarray(points, dtype=float)
    if data.ndim != 2 or data.shape[0] < 3:
        raise FitError("Stark fit needs at least three points")
    E, shift = data[:, 0], data[:, 1]
    design = np.column_stack([np.ones_like(E), E, E**2])
    if np.linalg.matrix_rank(design) < 3:
        raise FitError(f"Stark fit needs three distinct fields, got {len(np.unique(E))}")
    coef, *_ = np.linalg.lstsq(design, shift, rcond=None)
    residuals = shift - design @ coef
    dof = data.shape[0] - 3
    variance = float(residuals @ residuals) / dof if dof > 0 else 0.0
    covariance = variance * np.linalg.inv(design.T @ design)
    model = StarkModel(
        delta_mu=float(-coef[1]),
        delta_alpha=float(-2.0 * coef[2]),
        offset=float(coef[0]),
        delta_mu_stderr=float(math.sqrt(covariance[1, 1])),
        delta_alpha_stderr=float(2.0 * math.sqrt(covariance[2, 2])),
        residual_rms=float(np.sqrt(np.mean(residuals**2))),
        n_points=int(data.shape[0]),
    )
    logger.debug(f"Stark fit: Δμ = {model.delta_mu:.6g} e·Å, Δα = {model.delta_alpha:.6g} e·Å²/V")
    return model


def stark_tunability(model: StarkModel, E_max: float) -> float:
    """Span of the ZPL over fields in [−E_max, E_max], in THz"""
    if E_max <= 0:
        raise DomainError(f"E_max must be positive, got {E_max}")
    fields = [-E_max, E_max]
    if model.delta_alpha != 0:
        extremum = -model.delta_mu / model.delta_alpha
        if abs(extremum) < E_max:
            fields.append(extremum)
    shifts = [stark_shift(model, E) for E in fields]
    return ev_to_hz(max(shifts) - min(shifts)) / 1e12


def _unit(direction: Sequence[float]) -> np.ndarray:
    d = np.asarray(direction, dtype=float)
    norm = np.linalg.norm(d)
    if norm == 0:
        raise DomainError("separation direction must be nonzero")
    return d / norm


def dipole_interaction(q: InteractionQuery) -> float:
    """
    Dipole-dipole coupling V/h in Hz.

    V = [μ1·μ2 − 3(μ1·r̂)(μ2·r̂)] / (4πε₀ ε_r r³)
    """
    if q.r <= 0:
        raise DomainError(f"separation must be positive, got {q.r}")
    mu1, mu2, r_hat = np.asarray(q.mu1), np.asarray(q.mu2), _unit(q.direction)
    angular = mu1 @ mu2 - 3.0 * (mu1 @ r_hat) * (mu2 @ r_hat)
    return ev_to_hz(CONSTANTS.coulomb_eV_angstrom * angular / (q.eps_r * q.r**3))


def spin_spin_reference(r: float) -> float:
    """NV-NV magnetic coupling μ₀(gμ_B)²/(4πh r³) in Hz for r in Å"""
    if r <= 0:
        raise DomainError(f"separation must be positive, got {r}")
    r_m = r * 1e-10
    g_mu = CONSTANTS.g_nv * CONSTANTS.bohr_magneton
    return CONSTANTS.vacuum_permeability * g_mu**2 / (4.0 * math.pi * CONSTANTS.planck_Js * r_m**3)


def interaction_range(coupling, threshold: float, r_lo: float = 1e-2, r_hi: float = 1e8) -> float:
    """
    Distance (Å) where |coupling(r)| drops to threshold (Hz).

    Root of log|coupling| − log threshold on a logarithmic bracket.
    """
    if threshold <= 0:
        raise DomainError(f"threshold must be positive, got {threshold}")

    def f(log_r: float) -> float:
        return math.log(abs(coupling(math.exp(log_r)))) - math.log(threshold)

    lo, hi = math.log(r_lo), math.log(r_hi)
    if f(lo) < 0 or f(hi) > 0:
        raise DomainError(f"threshold {threshold:g} Hz not reached within [{r_lo:g}, {r_hi:g}] Å")
    return math.exp(brentq(f, lo, hi, xtol=1e-14, rtol=1e-14))


def interaction_map(
    mu1: float,
    mu2: float,
    eps_r: float,
    r_min: float,
    r_max: float,
    n_points: int = 61,
    thresholds: Sequence[float] = DEFAULT_THRESHOLDS_HZ,
) -> InteractionMap:
    """
    Side-by-side parallel dipoles against the spin-spin reference.

    Args:
        mu1, mu2: Dipole magnitudes in e·Å
        eps_r: Host dielectric constant
        r_min, r_max: Distance range in Å (log grid)
        n_points: Grid size
        thresholds: Coupling strengths (Hz) whose ranges are reported
    """
    grid = log_grid(r_min, r_max, n_points)

    def dap(r: float) -> float:
        return dipole_interaction(
            InteractionQuery(mu1=(0.0, 0.0, mu1), mu2=(0.0, 0.0, mu2), r=r,
                             direction=(1.0, 0.0, 0.0), eps_r=eps_r)
        )

    V = [dap(r) for r in grid]
    spin = [spin_spin_reference(r) for r in grid]
    # both curves fall as 1/r³, so their ratio is a constant
    ratio = abs(V[0]) / spin[0]
    ranges = [
        InteractionRange(
            threshold_Hz=t,
            dap_range_nm=interaction_range(dap, t) / 10.0,
            spin_range_nm=interaction_range(spin_spin_reference, t) / 10.0,
        )
        for t in thresholds
    ]
    return InteractionMap(
        r_nm=(grid / 10.0).tolist(),
        V_Hz=V,
        spin_spin_Hz=spin,
        coupling_ratio=ratio,
        range_factor=ratio ** (1.0 / 3.0),
        ranges=ranges,
    )


def radiative_lifetime(data: LifetimeInput, convention: Optional[str] = None) -> float:
    """
    Radiative lifetime in s.

    'as-printed':            τ = 3ε₀hc³ / (2 n_r ω³ |μ|²)
    'standard-3pi-eps0-hbar': τ = 3πε₀ħc³ / (n_r ω³ |μ|²)

    With h = 2πħ the two coincide; both are kept so the convention is
    explicit in every manifest.
    """
    convention = convention or settings.LIFETIME_CONVENTION
    omega = data.energy_eV / CONSTANTS.hbar_eVs
    mu = data.mu_opt * CONSTANTS.elementary_charge * 1e-10
    eps0, c = CONSTANTS.vacuum_permittivity, CONSTANTS.speed_of_light
    if convention == "as-printed":
        return 3.0 * eps0 * CONSTANTS.planck_Js * c**3 / (2.0 * data.n_r * omega**3 * mu**2)
    if convention == "standard-3pi-eps0-hbar":
        return 3.0 * math.pi * eps0 * CONSTANTS.hbar_Js * c**3 / (data.n_r * omega**3 * mu**2)
    raise DomainError(f"unknown lifetime convention '{convention}'")


def lifetime_ratio(a: LifetimeInput, b: LifetimeInput, convention: Optional[str] = None) -> float:
    """τ(a) / τ(b)"""
    return radiative_lifetime(a, convention) / radiative_lifetime(b, convention)
