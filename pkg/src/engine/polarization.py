"""
Static dipoles from ground/excited charge snapshots

The cell dipole Σ Z_i R_i − Σ deg_n r̄_n is defined only up to the lattice
vectors e·a_i (a Wannier centre may be placed in any periodic image).
Dipoles are taken as μ = d_ground − d_excited on the branch closest to a
physically motivated hint.
"""
import itertools
import logging
from typing import Optional, Sequence, Tuple

import numpy as np

from src.core.constants import CONSTANTS, debye_to_eA
from src.core.errors import ConsistencyError, DomainError
from src.domain.schemas import ChargeSnapshot, DipoleResult, OrientationAverage

logger = logging.getLogger(__name__)

# second-best branch within this factor of the best raises the ambiguity flag
AMBIGUITY_RATIO = 1.1

NV_DIPOLE_DEBYE = 0.8


def _cell(snapshot: ChargeSnapshot) -> np.ndarray:
    return np.asarray(snapshot.cell, dtype=float)


def dipole_sum(snapshot: ChargeSnapshot) -> np.ndarray:
    """
    Σ Z_i R_i − Σ deg_n r̄_n in e·Å.

    Raises:
        ConsistencyError: ionic minus electronic charge differs from net_charge
    """
    Z = np.array([n.Z for n in snapshot.nuclei], dtype=float)
    deg = np.array([c.degeneracy for c in snapshot.centers], dtype=float)
    balance = Z.sum() - deg.sum()
    if abs(balance - snapshot.net_charge) > 1e-9:
        raise ConsistencyError(
            f"charge balance {balance:g} e (nuclei {Z.sum():g}, centres {deg.sum():g}) "
            f"differs from declared net charge {snapshot.net_charge:g}"
        )
    ionic = Z @ np.array([n.position for n in snapshot.nuclei], dtype=float).reshape(-1, 3)
    electronic = deg @ np.array([c.position for c in snapshot.centers], dtype=float).reshape(-1, 3)
    return ionic - electronic


def cell_polarization(snapshot: ChargeSnapshot) -> Tuple[np.ndarray, np.ndarray]:
    """
    Polarization of one snapshot.

    Returns:
        (P in e/Å², quanta) where row i of quanta is e·a_i/Ω
    """
    volume = snapshot.volume
    return dipole_sum(snapshot) / volume, _cell(snapshot) / volume


def _default_hint(snapshot: ChargeSnapshot) -> np.ndarray:
    if snapshot.donor is not None and snapshot.acceptor is not None:
        return np.asarray(snapshot.donor, dtype=float) - np.asarray(snapshot.acceptor, dtype=float)
    return np.zeros(3)


def resolve_branch(
    raw: np.ndarray, lattice: np.ndarray, hint: np.ndarray
) -> Tuple[np.ndarray, np.ndarray, bool]:
    """
    Pick the lattice shift n minimizing |raw + n·A − hint|.

    Returns:
        (shifted dipole, n, ambiguity flag)
    """
    fractional = np.linalg.solve(lattice.T, hint - raw)
    centre = np.rint(fractional).astype(int)
    candidates = []
    for delta in itertools.product((-1, 0, 1), repeat=3):
        n = centre + np.array(delta)
        mu = raw + n @ lattice
        candidates.append((float(np.linalg.norm(mu - hint)), tuple(int(v) for v in n), mu))
    candidates.sort(key=lambda c: (c[0], c[1]))
    best, second = candidates[0], candidates[1]
    ambiguous = second[0] <= AMBIGUITY_RATIO * best[0]
    return best[2], np.array(best[1]), ambiguous


def dipole_from_snapshots(
    ground: ChargeSnapshot,
    excited: ChargeSnapshot,
    hint: Optional[Sequence[float]] = None,
) -> DipoleResult:
    """
    Branch-resolved dipole μ = d_ground − d_excited.

    Args:
        ground: Snapshot after recombination
        excited: Snapshot with the bound electron-hole pair
        hint: Expected dipole in e·Å; defaults to e·(R_D − R_A) from the
            ground snapshot header, else zero (smallest branch)

    Raises:
        ConsistencyError: cells or nucleus counts differ, charge imbalance
    """
    if not np.allclose(_cell(ground), _cell(excited), rtol=0, atol=1e-9):
        raise ConsistencyError("ground and excited snapshots have different cells")
    if len(ground.nuclei) != len(excited.nuclei):
        raise ConsistencyError(
            f"nucleus counts differ: {len(ground.nuclei)} vs {len(excited.nuclei)}"
        )
    raw = dipole_sum(ground) - dipole_sum(excited)
    target = _default_hint(ground) if hint is None else np.asarray(hint, dtype=float)
    mu, shift, ambiguous = resolve_branch(raw, _cell(ground), target)
    if ambiguous:
        logger.warning(
            f"Polarization branch ambiguous: |μ| = {np.linalg.norm(mu):.4f} e·Å, "
            f"shift {shift.tolist()}, hint {target.tolist()}"
        )
    return DipoleResult.from_vector(mu, branch_shift=shift, ambiguity_flag=ambiguous)


def point_charge_dipole(R_m: float, axis: Sequence[float] = (0.0, 0.0, 1.0)) -> DipoleResult:
    """Dipole of magnitude e·R_m along `axis`"""
    if R_m <= 0:
        raise DomainError(f"R_m must be positive, got {R_m}")
    axis = np.asarray(axis, dtype=float)
    norm = np.linalg.norm(axis)
    if norm == 0:
        raise DomainError("pair axis must be nonzero")
    return DipoleResult.from_vector(R_m * axis / norm)


def nv_reference_dipole() -> DipoleResult:
    """NV⁻ ground-state dipole, 0.8 D along z"""
    return DipoleResult.from_vector((0.0, 0.0, debye_to_eA(NV_DIPOLE_DEBYE)))


def orientation_average(results: Sequence[DipoleResult]) -> OrientationAverage:
    """Mean vector, mean magnitude and spread over orientation configurations"""
    if not results:
        raise DomainError("no dipoles to average")
    vectors = np.array([r.vector for r in results], dtype=float)
    magnitudes = np.linalg.norm(vectors, axis=1)
    return OrientationAverage(
        mean_vector=tuple(vectors.mean(axis=0).tolist()),
        mean_magnitude=float(magnitudes.mean()),
        std_magnitude=float(magnitudes.std()),
        mean_magnitude_debye=float(magnitudes.mean()) * CONSTANTS.debye_per_eAngstrom,
        n_orientations=len(results),
    )
