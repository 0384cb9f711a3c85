"""
Donor-acceptor shell enumeration in diamond-structure and zincblende hosts

Sites are handled in integer units of a0/4: the fcc sublattice holds the
all-even triples with component sum ≡ 0 (mod 4), the (¼,¼,¼) sublattice the
all-odd triples with sum ≡ 3 (mod 4). Squared separations are therefore
exact integers N with R = (a0/4)·√N; N ≡ 0 (mod 8) on the same sublattice
and N ≡ 3 (mod 8) across sublattices.
"""
import logging
import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional

import numpy as np

from src.core.cache import cache_manager
from src.core.config import settings
from src.core.errors import DomainError, ResourceGuardError
from src.domain.schemas import (
    DefectSpecies,
    HostMaterial,
    LatticeKind,
    LatticeSpec,
    OrbitGroup,
    PairGeometry,
    Relation,
    Shell,
)

logger = logging.getLogger(__name__)


def _on_sublattice(n: np.ndarray, sublattice: Relation) -> np.ndarray:
    """Mask of integer triples (rows of n) lying on the given sublattice"""
    if sublattice == Relation.SAME:
        return np.all(n % 2 == 0, axis=-1) & (n.sum(axis=-1) % 4 == 0)
    return np.all(n % 2 == 1, axis=-1) & (n.sum(axis=-1) % 4 == 3)


def _sublattice_of(norm_sq: int) -> Relation:
    return Relation.SAME if norm_sq % 8 == 0 else Relation.OPPOSITE


def _m_prime(norm_sq: int) -> int:
    if norm_sq % 8 == 0:
        return norm_sq // 8
    return (norm_sq + 5) // 8


def _slice_norms(n1: int, nmax: int, limit_sq: int, sublattices: tuple) -> Counter:
    """Squared-norm histogram of all sites with first component n1"""
    r = np.arange(-nmax, nmax + 1)
    n2, n3 = np.meshgrid(r, r, indexing="ij")
    n = np.stack([np.full(n2.size, n1), n2.ravel(), n3.ravel()], axis=-1)
    norms = (n * n).sum(axis=-1)
    keep = (norms > 0) & (norms <= limit_sq)
    mask = np.zeros_like(keep)
    for sublattice in sublattices:
        mask |= _on_sublattice(n, sublattice)
    values, counts = np.unique(norms[keep & mask], return_counts=True)
    return Counter(dict(zip(values.tolist(), counts.tolist())))


def _enumerate(a0: float, relation: Relation, R_max: float, threads: int) -> List[Shell]:
    tolerance = settings.SHELL_TOLERANCE * a0
    nmax = math.ceil(4.0 * R_max / a0) + 4
    limit_sq = math.floor((4.0 * (R_max + tolerance) / a0) ** 2)
    sublattices = (Relation.SAME, Relation.OPPOSITE) if relation == Relation.ANY else (relation,)

    histogram: Counter = Counter()
    slices = range(-nmax, nmax + 1)
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        for part in pool.map(lambda n1: _slice_norms(n1, nmax, limit_sq, sublattices), slices):
            histogram.update(part)

    shells: List[Shell] = []
    cluster_R = None
    for norm_sq in sorted(histogram):
        R = a0 / 4.0 * math.sqrt(norm_sq)
        if cluster_R is not None and R - cluster_R <= tolerance:
            # distances closer than the tolerance share a shell
            last = shells[-1]
            shells[-1] = last.model_copy(
                update={"multiplicity": last.multiplicity + histogram[norm_sq]}
            )
            continue
        cluster_R = R
        shells.append(
            Shell(
                m=len(shells) + 1,
                m_prime=_m_prime(norm_sq),
                R=R,
                multiplicity=histogram[norm_sq],
                relation=relation,
                sublattice=_sublattice_of(norm_sq),
            )
        )
    return shells


def enumerate_shells(
    lattice: LatticeSpec,
    relation: Relation,
    R_max: float,
    threads: Optional[int] = None,
) -> List[Shell]:
    """
    Enumerate all separation shells up to R_max.

    Args:
        lattice: Host lattice (a0 and kind)
        relation: same-sublattice, opposite-sublattice or any
        R_max: Largest separation in Å
        threads: Worker count for the slice scan (defaults to settings.THREADS)

    Returns:
        Shells sorted by increasing R with 1-based rank m

    Raises:
        DomainError: R_max <= 0
        ResourceGuardError: R_max beyond SHELL_RMAX_CELLS·a0
    """
    relation = Relation(relation)
    if R_max <= 0:
        raise DomainError(f"R_max must be positive, got {R_max}")
    if R_max > settings.SHELL_RMAX_CELLS * lattice.a0:
        raise ResourceGuardError(
            f"R_max = {R_max} Å exceeds {settings.SHELL_RMAX_CELLS:g}·a0 = "
            f"{settings.SHELL_RMAX_CELLS * lattice.a0:g} Å"
        )
    shells = cache_manager.get_or_compute(
        lambda: _enumerate(lattice.a0, relation, R_max, threads or settings.THREADS),
        op="enumerate_shells", a0=lattice.a0, relation=relation.value, R_max=R_max,
        tolerance=settings.SHELL_TOLERANCE,
    )
    logger.debug(f"{len(shells)} {relation.value} shells within {R_max:.3f} Å")
    return list(shells)


def first_shells(lattice: LatticeSpec, relation: Relation, n_shells: int) -> List[Shell]:
    """The first n_shells shells, growing R_max until enough are found"""
    if n_shells < 1:
        raise DomainError(f"n_shells must be >= 1, got {n_shells}")
    R_max = lattice.a0 * math.sqrt(n_shells / 2.0 + 1.0)
    while True:
        R_max = min(R_max, settings.SHELL_RMAX_CELLS * lattice.a0)
        shells = enumerate_shells(lattice, relation, R_max)
        if len(shells) >= n_shells:
            return shells[:n_shells]
        if R_max >= settings.SHELL_RMAX_CELLS * lattice.a0:
            raise ResourceGuardError(f"fewer than {n_shells} shells within the enumeration guard")
        R_max *= 1.5


def _is_three_square_sum(n: int) -> bool:
    """Legendre: n is a sum of three squares unless n = 4^a(8b+7)"""
    while n > 0 and n % 4 == 0:
        n //= 4
    return n % 8 != 7


def shell_distance_closed_form(m_prime: int, relation: Relation, a0: float) -> Optional[float]:
    """
    Closed-form separation for quadratic-form integer m'.

    Returns:
        a0·√(m'/2) (same) or a0·√(m'/2 − 5/16) (opposite); None where the
        same-sublattice form has no sites
    """
    relation = Relation(relation)
    if m_prime < 1:
        raise DomainError(f"m_prime must be >= 1, got {m_prime}")
    if relation == Relation.SAME:
        if not _is_three_square_sum(2 * m_prime):
            return None
        return a0 * math.sqrt(m_prime / 2.0)
    if relation == Relation.OPPOSITE:
        return a0 * math.sqrt(m_prime / 2.0 - 5.0 / 16.0)
    raise DomainError("closed form needs a definite relation (same- or opposite-sublattice)")


def quadratic_form_multiplicity(m_prime: int, relation: Relation) -> int:
    """
    Count integer solutions of the shell's quadratic form.

    same: i² + j² + k² = 2m' over all integers (units of a0/2).
    opposite: odd o_i with Σo_i² = 8m' − 5 and Σo_i ≡ 3 (mod 4).
    """
    relation = Relation(relation)
    if m_prime < 1:
        raise DomainError(f"m_prime must be >= 1, got {m_prime}")
    target = 2 * m_prime if relation == Relation.SAME else 8 * m_prime - 5
    k = math.isqrt(target)
    count = 0
    for i in range(-k, k + 1):
        for j in range(-k, k + 1):
            rest = target - i * i - j * j
            if rest < 0:
                continue
            root = math.isqrt(rest)
            if root * root != rest:
                continue
            for l in {root, -root}:
                if relation == Relation.SAME:
                    count += 1
                elif i % 2 and j % 2 and l % 2 and (i + j + l) % 4 == 3:
                    count += 1
    return count


def _vectors_with_norm(norm_sq: int, sublattice: Relation) -> np.ndarray:
    k = math.isqrt(norm_sq)
    rows = []
    r = np.arange(-k, k + 1)
    for n1 in range(-k, k + 1):
        rest = norm_sq - n1 * n1 - r * r
        ok = rest >= 0
        n2 = r[ok]
        n3 = np.sqrt(rest[ok]).round().astype(int)
        exact = n3 * n3 == rest[ok]
        for sign in (1, -1):
            rows.append(np.stack([np.full(exact.sum(), n1), n2[exact], sign * n3[exact]], axis=-1))
    n = np.unique(np.concatenate(rows), axis=0)
    return n[_on_sublattice(n, sublattice)]


def pair_orientations(shell: Shell) -> PairGeometry:
    """
    All displacement vectors of a shell, grouped into cubic orbits.

    The lattice constant is recovered from R and m', so the shell alone
    determines the geometry.
    """
    norm_sq = 8 * shell.m_prime if shell.sublattice == Relation.SAME else 8 * shell.m_prime - 5
    a0 = 4.0 * shell.R / math.sqrt(norm_sq)
    n = _vectors_with_norm(norm_sq, shell.sublattice)
    keys = Counter(tuple(sorted(abs(int(c)) for c in row)) for row in n)
    return PairGeometry(
        shell=shell,
        vectors=[tuple(float(c) * a0 / 4.0 for c in row) for row in n],
        orbits=[OrbitGroup(key=key, count=count) for key, count in sorted(keys.items())],
    )


def relation_for_pair(host: HostMaterial, donor: DefectSpecies, acceptor: DefectSpecies) -> Relation:
    """
    Sublattice relation of a donor-acceptor pair.

    Chemically identical sublattices (diamond) admit both, so 'any';
    otherwise same or opposite by the substituted species.
    """
    if host.lattice_kind == LatticeKind.DIAMOND or host.sublattices[0] == host.sublattices[1]:
        return Relation.ANY
    return Relation.SAME if donor.site == acceptor.site else Relation.OPPOSITE
