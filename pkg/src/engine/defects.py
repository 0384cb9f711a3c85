"""
Formation energies and charge transition levels

E_f[X^q](E_F) = E_tot[X^q] − E_tot[bulk] − Σ n_i μ_i + q·(E_VBM + E_F) + E_corr

Levels are referenced to the VBM. Finite-size effects are handled by the
point-charge Madelung term and a linear extrapolation in 1/L.
"""
import logging
from collections import defaultdict
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.core.constants import CONSTANTS
from src.core.errors import ConsistencyError, DomainError, FitError, LookupFailure
from src.domain.schemas import (
    ChemicalPotentialSet,
    DefectRole,
    DiluteLimit,
    HostMaterial,
    TotalEnergyRecord,
    TransitionLevel,
)

logger = logging.getLogger(__name__)

BULK_LABEL = "bulk"


def formation_energy(
    record: TotalEnergyRecord,
    bulk_E_tot: float,
    chempots: ChemicalPotentialSet,
    E_F: float = 0.0,
    E_corr: Optional[float] = None,
    e_vbm: float = 0.0,
) -> float:
    """
    Formation energy of one charge state in eV.

    Args:
        record: Defect supercell record
        bulk_E_tot: Pristine supercell energy in eV
        chempots: Chemical potential per species
        E_F: Fermi level above the VBM in eV
        E_corr: Finite-size correction; defaults to record.E_corr, else 0
        e_vbm: VBM reference energy in eV

    Raises:
        LookupFailure: a species of record.n_i has no chemical potential
    """
    reservoir = 0.0
    for species, count in record.n_i.items():
        if species not in chempots.mu:
            raise LookupFailure(f"no chemical potential for species '{species}' ({record.label})")
        reservoir += count * chempots.mu[species]
    if E_corr is None:
        E_corr = record.E_corr or 0.0
    return record.E_tot - bulk_E_tot - reservoir + record.q * (e_vbm + E_F) + E_corr


def format_level(level: float, E_g: float) -> str:
    """'E_V + x' or 'E_C - y', whichever edge is nearer"""
    if level <= E_g / 2.0:
        return f"E_V + {level:.2f}"
    return f"E_C - {E_g - level:.2f}"


def transition_level(
    q1: int,
    q2: int,
    E_f_q1: float,
    E_f_q2: float,
    E_g: float,
    defect: str = "",
) -> TransitionLevel:
    """
    ε(q1/q2) = (E_f(q1) − E_f(q2)) / (q2 − q1), formation energies at E_F = 0.

    (+/0) levels yield a donor binding energy E_g − ε, (0/−) levels an
    acceptor binding energy ε.
    """
    if q1 == q2:
        raise DomainError(f"transition level needs two different charge states, got {q1}")
    return level_entry(q1, q2, (E_f_q1 - E_f_q2) / (q2 - q1), E_g, defect)


def level_entry(q1: int, q2: int, level: float, E_g: float, defect: str = "") -> TransitionLevel:
    """TransitionLevel for a known level position above the VBM"""
    pair = {q1, q2}
    kind, binding = None, None
    if pair == {1, 0}:
        kind, binding = DefectRole.DONOR, E_g - level
    elif pair == {0, -1}:
        kind, binding = DefectRole.ACCEPTOR, level
    return TransitionLevel(
        defect=defect,
        q1=max(q1, q2),
        q2=min(q1, q2),
        level=level,
        reference=format_level(level, E_g),
        in_gap=0.0 <= level <= E_g,
        kind=kind,
        binding_energy=binding,
    )


def madelung_correction(q: int, eps_r: float, L: float, lattice_madelung_constant: float = 2.8373) -> float:
    """Point-charge image correction q²·α_M·e²/(4πε₀·2·ε_r·L) in eV"""
    if eps_r <= 0 or L <= 0:
        raise DomainError(f"eps_r and L must be positive, got {eps_r}, {L}")
    return q * q * lattice_madelung_constant * CONSTANTS.coulomb_eV_angstrom / (2.0 * eps_r * L)


def dilute_extrapolation(points: Sequence[Tuple[float, float]]) -> DiluteLimit:
    """
    Linear fit of value against 1/L; the intercept is the dilute limit.

    error_estimate is the residual standard deviation √(SSR/(n−2)), zero
    for two sizes.

    Raises:
        FitError: fewer than two distinct sizes
    """
    data = np.asarray(points, dtype=float)
    if data.ndim != 2 or data.shape[0] < 2:
        raise FitError("dilute extrapolation needs at least two sizes")
    if np.any(data[:, 0] <= 0):
        raise DomainError("supercell sizes must be positive")
    x = 1.0 / data[:, 0]
    design = np.column_stack([np.ones_like(x), x])
    if np.linalg.matrix_rank(design) < 2:
        raise FitError("dilute extrapolation needs two distinct sizes")
    (limit, slope), *_ = np.linalg.lstsq(design, data[:, 1], rcond=None)
    residuals = data[:, 1] - design @ np.array([limit, slope])
    dof = data.shape[0] - 2
    error = float(np.sqrt(residuals @ residuals / dof)) if dof > 0 else 0.0
    return DiluteLimit(limit=float(limit), slope=float(slope), error_estimate=error, n_points=int(data.shape[0]))


def ctl_table(
    records: Sequence[TotalEnergyRecord],
    chempots: ChemicalPotentialSet,
    host: HostMaterial,
    apply_madelung: bool = True,
) -> List[TransitionLevel]:
    """
    Table-style transition levels for every defect in `records`.

    Records labelled 'bulk' supply the pristine energy per supercell size.
    Adjacent charge states of each defect give one level per size; several
    sizes are extrapolated to the dilute limit. Records without an explicit
    E_corr get the Madelung term when apply_madelung is set.

    Raises:
        ConsistencyError: no bulk record for a supercell size in use
    """
    bulk: Dict[float, float] = {r.L: r.E_tot for r in records if r.label == BULK_LABEL}
    by_label: Dict[str, Dict[float, Dict[int, TotalEnergyRecord]]] = defaultdict(lambda: defaultdict(dict))
    for r in records:
        if r.label != BULK_LABEL:
            by_label[r.label][r.L][r.q] = r

    rows: List[TransitionLevel] = []
    for label in sorted(by_label):
        sizes = by_label[label]
        charges = sorted({q for per_size in sizes.values() for q in per_size}, reverse=True)
        for q_hi, q_lo in zip(charges, charges[1:]):
            per_size: List[Tuple[float, float]] = []
            for L in sorted(sizes):
                if q_hi not in sizes[L] or q_lo not in sizes[L]:
                    continue
                if L not in bulk:
                    raise ConsistencyError(f"no bulk record for L = {L} Å ({label})")

                def E_f(record: TotalEnergyRecord) -> float:
                    correction = record.E_corr
                    if correction is None:
                        correction = (
                            madelung_correction(record.q, host.eps_r, L, host.madelung_constant)
                            if apply_madelung else 0.0
                        )
                    return formation_energy(record, bulk[L], chempots, 0.0, correction, host.e_vbm)

                level = transition_level(q_hi, q_lo, E_f(sizes[L][q_hi]), E_f(sizes[L][q_lo]), host.E_g)
                per_size.append((L, level.level))
            if not per_size:
                continue
            if len(per_size) == 1:
                value, error = per_size[0][1], None
            else:
                limit = dilute_extrapolation(per_size)
                value, error = limit.limit, limit.error_estimate
            row = level_entry(q_hi, q_lo, value, host.E_g, defect=label).model_copy(
                update={"error_estimate": error, "n_sizes": len(per_size)}
            )
            rows.append(row)
            logger.debug(f"{label} ({q_hi}/{q_lo}) = {row.reference} over {len(per_size)} sizes")
    return rows
