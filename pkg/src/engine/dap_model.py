"""
DAP transition-energy model

ZPL energy of a donor-acceptor pair at separation R:

    E(R) = E_g − (E_D + E_A) + e²/(4πε₀ ε_r R) + J(R)

J(R) is the envelope-overlap correction for hydrogenic 1s donor/acceptor
states of radii a_D, a_A. All energies in eV, lengths in Å.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence, Tuple

import numpy as np
from mpmath import mp

from src.core.config import settings
from src.core.constants import CONSTANTS
from src.core.errors import DomainError, FitError
from src.domain.schemas import (
    DapModelParams,
    LatticeSpec,
    Relation,
    SeriesFit,
    ZplPoint,
    ZplSeries,
)
from src.engine.lattice import first_shells
from src.engine.materials import effective_bohr_radius

logger = logging.getLogger(__name__)

# relative exponent mismatch |A − B|/(A + B) bounds for two_center_coulomb
_EQUAL_EXPONENT_TOL = 1e-7
_EXTENDED_PRECISION_TOL = 1e-2


def _check_positive(**values: float) -> None:
    for name, value in values.items():
        if not value > 0:
            raise DomainError(f"{name} must be positive, got {value}")


def coulomb_term(R: float, eps_r: float) -> float:
    """Screened pair Coulomb energy e²/(4πε₀ ε_r R) in eV"""
    _check_positive(R=R, eps_r=eps_r)
    return CONSTANTS.coulomb_eV_angstrom / (eps_r * R)


def one_center_potential(R: float, a: float) -> float:
    """
    ⟨1s_a| 1/|r − R| |1s_a⟩ in 1/Å.

    (1/R)·[1 − (1 + R/a)·e^{−2R/a}]
    """
    x = R / a
    return (1.0 - (1.0 + x) * math.exp(-2.0 * x)) / R


def _unequal_exponents(R, A, B, exp):
    A2, B2 = A * A, B * B
    term_A = exp(-A * R) * (
        B2 * B2 * (B2 - 3 * A2) / ((B2 - A2) ** 3 * R) + A * B2 * B2 / (2 * (B2 - A2) ** 2)
    )
    term_B = exp(-B * R) * (
        A2 * A2 * (A2 - 3 * B2) / ((A2 - B2) ** 3 * R) + B * A2 * A2 / (2 * (A2 - B2) ** 2)
    )
    return 1 / R - term_A - term_B


def two_center_coulomb(R: float, a_D: float, a_A: float) -> float:
    """
    Coulomb interaction of two unit 1s charge clouds a distance R apart, 1/Å.

    Densities decay as e^{−Ar}, e^{−Br} with A = 2/a_D, B = 2/a_A. The
    unequal-exponent closed form divides by (B² − A²)³; for nearly equal
    exponents it is evaluated in extended precision.
    """
    A, B = 2.0 / a_D, 2.0 / a_A
    mismatch = abs(A - B) / (A + B)
    if mismatch < _EQUAL_EXPONENT_TOL:
        # symmetric in A, B: the mean-exponent form is off by O(mismatch²)
        k = 0.5 * (A + B)
        return 1.0 / R - math.exp(-k * R) * (
            1.0 / R + 11.0 * k / 16.0 + 3.0 * k**2 * R / 16.0 + k**3 * R**2 / 48.0
        )
    if mismatch < _EXTENDED_PRECISION_TOL:
        # about 3·log10(1/mismatch) digits cancel
        digits = 20 + 3 * math.ceil(-math.log10(mismatch))
        with mp.workdps(digits):
            return float(_unequal_exponents(mp.mpf(R), mp.mpf(A), mp.mpf(B), mp.exp))
    return _unequal_exponents(R, A, B, math.exp)


def j_correction(R: float, a_D: float, a_A: float, eps_r: float) -> float:
    """
    Envelope-overlap correction J(R) in eV.

    The four-term bracket averaged over both 1s envelopes: the two
    one-centre attractions, minus the two-centre repulsion, minus 1/R.
    Vanishes exponentially as R grows.

    Args:
        R: Pair separation in Å
        a_D: Donor envelope radius in Å
        a_A: Acceptor envelope radius in Å
        eps_r: Static dielectric constant

    Returns:
        J(R) in eV
    """
    _check_positive(R=R, a_D=a_D, a_A=a_A, eps_r=eps_r)
    bracket = (
        one_center_potential(R, a_D)
        + one_center_potential(R, a_A)
        - two_center_coulomb(R, a_D, a_A)
        - 1.0 / R
    )
    return CONSTANTS.coulomb_eV_angstrom / eps_r * bracket


def envelope_radii(params: DapModelParams) -> Tuple[float, float]:
    """(a_D, a_A), derived from the binding energies where not set"""
    eps = params.host.eps_r
    a_D = params.donor.a_bohr or effective_bohr_radius(params.donor.E_bind, eps)
    a_A = params.acceptor.a_bohr or effective_bohr_radius(params.acceptor.E_bind, eps)
    return a_D, a_A


def zpl_energy(params: DapModelParams, R: float, include_J: bool = False) -> float:
    """E_g − (E_A + E_D) + coulomb_term(R) [+ J(R)] in eV"""
    host = params.host
    energy = host.E_g - (params.acceptor.E_bind + params.donor.E_bind) + coulomb_term(R, host.eps_r)
    if include_J:
        a_D, a_A = envelope_radii(params)
        energy += j_correction(R, a_D, a_A, host.eps_r)
    return energy


def zpl_series(
    params: DapModelParams,
    lattice: LatticeSpec,
    relation: Relation,
    n_shells: int,
    include_J: bool = False,
    threads: Optional[int] = None,
) -> ZplSeries:
    """ZPL energies for the first n_shells shells of the given relation"""
    shells = first_shells(lattice, relation, n_shells)
    with ThreadPoolExecutor(max_workers=max(1, threads or settings.THREADS)) as pool:
        energies = list(pool.map(lambda s: zpl_energy(params, s.R, include_J), shells))
    points = [ZplPoint(m=s.m, R=s.R, energy=e) for s, e in zip(shells, energies)]
    logger.debug(
        f"ZPL series {params.donor.name}-{params.acceptor.name}: "
        f"{points[0].energy:.4f} .. {points[-1].energy:.4f} eV over {len(points)} shells"
    )
    return ZplSeries(points=points, provenance="model", include_J=include_J)


def model_valid_shells(
    series: ZplSeries, a_D: float, a_A: float, limit: Optional[int] = None
) -> ZplSeries:
    """
    Keep the shells whose separation exceeds both envelope radii.

    Inside max(a_D, a_A) the two bound carriers overlap and the pair picture
    behind the model breaks down.
    """
    cutoff = max(a_D, a_A)
    points = [p for p in series.points if p.R > cutoff]
    if limit is not None:
        points = points[:limit]
    return series.model_copy(update={"points": points})


def shell_spacings(series: ZplSeries) -> List[float]:
    """Consecutive ZPL differences |E_m − E_{m+1}| in meV"""
    energies = [p.energy for p in series.points]
    return [abs(a - b) * 1e3 for a, b in zip(energies, energies[1:])]


def fit_series(
    points: Sequence[Tuple[float, float]], r_b: float, E_g: float
) -> SeriesFit:
    """
    Least-squares line of ZPL energy against r_b/R_m.

    Args:
        points: (R_m in Å, energy in eV) pairs
        r_b: Host bond length in Å
        E_g: Host band gap in eV

    Returns:
        Slope, intercept, E_g − intercept and residual diagnostics

    Raises:
        FitError: fewer than two distinct separations
    """
    data = np.asarray(points, dtype=float)
    if data.ndim != 2 or data.shape[0] < 2:
        raise FitError("fit_series needs at least two points")
    if np.any(data[:, 0] <= 0):
        raise DomainError("separations must be positive")
    x = r_b / data[:, 0]
    design = np.column_stack([x, np.ones_like(x)])
    if np.linalg.matrix_rank(design) < 2:
        raise FitError("degenerate abscissae: all R_m identical")
    (slope, intercept), *_ = np.linalg.lstsq(design, data[:, 1], rcond=None)
    residuals = data[:, 1] - design @ np.array([slope, intercept])
    fit = SeriesFit(
        slope=float(slope),
        intercept=float(intercept),
        binding_sum=float(E_g - intercept),
        residual_rms=float(np.sqrt(np.mean(residuals**2))),
        residual_max=float(np.max(np.abs(residuals))),
        n_points=int(data.shape[0]),
    )
    logger.debug(f"Series fit: slope {fit.slope:.6f} eV, intercept {fit.intercept:.6f} eV")
    if fit.residual_max > 0.05:
        logger.warning(f"Series fit residual up to {fit.residual_max * 1e3:.1f} meV")
    return fit
