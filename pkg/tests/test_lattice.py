"""
Shell enumeration against the closed forms and worked examples
"""
import math

import numpy as np
import pytest

from src.core.errors import DomainError, ResourceGuardError
from src.domain.schemas import LatticeKind, LatticeSpec, Relation
from src.engine.lattice import (
    enumerate_shells,
    first_shells,
    pair_orientations,
    quadratic_form_multiplicity,
    relation_for_pair,
    shell_distance_closed_form,
)

SIC = LatticeSpec(a0=4.362, kind=LatticeKind.ZINCBLENDE)
DIAMOND = LatticeSpec(a0=3.543, kind=LatticeKind.DIAMOND)
M_PRIME_MAX = 50


@pytest.mark.parametrize("relation", [Relation.SAME, Relation.OPPOSITE])
@pytest.mark.parametrize("lattice", [SIC, DIAMOND], ids=["zincblende", "diamond"])
def test_enumeration_matches_closed_form(lattice, relation, fresh_cache):
    """Every realized shell up to m' = 50 has the closed-form distance and count"""
    if relation == Relation.SAME:
        R_max = lattice.a0 * math.sqrt(M_PRIME_MAX / 2.0)
    else:
        R_max = lattice.a0 * math.sqrt(M_PRIME_MAX / 2.0 - 5.0 / 16.0)
    shells = enumerate_shells(lattice, relation, R_max)

    expected = []
    for m_prime in range(1, M_PRIME_MAX + 1):
        R = shell_distance_closed_form(m_prime, relation, lattice.a0)
        if R is None:
            continue
        expected.append((m_prime, R, quadratic_form_multiplicity(m_prime, relation)))

    assert [s.m_prime for s in shells] == [e[0] for e in expected]
    for shell, (m_prime, R, count) in zip(shells, expected):
        assert shell.R == pytest.approx(R, rel=1e-12)
        assert shell.multiplicity == count
    assert [s.m for s in shells] == list(range(1, len(shells) + 1))


def test_same_sublattice_gaps():
    # 2m' = 4^a(8b+7) has no three-square representation
    gaps = [m for m in range(1, M_PRIME_MAX + 1)
            if shell_distance_closed_form(m, Relation.SAME, 1.0) is None]
    assert gaps == [14, 30, 46]
    assert quadratic_form_multiplicity(14, Relation.SAME) == 0


def test_opposite_first_shell_is_bond():
    shell = first_shells(SIC, Relation.OPPOSITE, 1)[0]
    assert shell.R == pytest.approx(SIC.nearest_neighbor_distance)
    assert shell.multiplicity == 4
    assert shell.m_prime == 1


def test_same_first_shells_sic():
    shells = first_shells(SIC, Relation.SAME, 3)
    assert [s.multiplicity for s in shells] == [12, 6, 24]
    assert shells[0].R == pytest.approx(4.362 / math.sqrt(2.0))
    assert shells[1].R == pytest.approx(4.362)


def test_diamond_any_relation_interleaves():
    shells = first_shells(DIAMOND, Relation.ANY, 8)
    # squared separations in units of (a0/4)^2
    norms = [round((4.0 * s.R / DIAMOND.a0) ** 2) for s in shells]
    assert norms == [3, 8, 11, 16, 19, 24, 27, 32]
    assert [s.multiplicity for s in shells] == [4, 12, 12, 6, 12, 24, 16, 12]
    assert shells[-1].R == pytest.approx(5.01, abs=0.01)
    assert [s.sublattice for s in shells[:2]] == [Relation.OPPOSITE, Relation.SAME]
    assert all(s.relation == Relation.ANY for s in shells)


def test_enumeration_is_sorted_and_unique():
    shells = enumerate_shells(SIC, Relation.ANY, 15.0)
    radii = [s.R for s in shells]
    assert radii == sorted(radii)
    assert len(set(radii)) == len(radii)
    assert radii[-1] <= 15.0


def test_thread_count_does_not_change_result(fresh_cache):
    single = enumerate_shells(SIC, Relation.OPPOSITE, 12.0, threads=1)
    fresh_cache.clear()
    pooled = enumerate_shells(SIC, Relation.OPPOSITE, 12.0, threads=4)
    assert single == pooled


@pytest.mark.parametrize("relation", [Relation.SAME, Relation.OPPOSITE, Relation.ANY])
def test_doubling_lattice_constant_doubles_radii(relation, fresh_cache):
    shells = enumerate_shells(SIC, relation, 14.0)
    doubled = enumerate_shells(LatticeSpec(a0=2.0 * SIC.a0, kind=SIC.kind), relation, 28.0)
    assert [(s.m, s.m_prime, s.multiplicity, s.sublattice) for s in doubled] == [
        (s.m, s.m_prime, s.multiplicity, s.sublattice) for s in shells
    ]
    assert [s.R for s in doubled] == [2.0 * s.R for s in shells]


@pytest.mark.parametrize("relation", [Relation.SAME, Relation.OPPOSITE, Relation.ANY])
def test_enumeration_independent_of_search_margin(relation, fresh_cache):
    inner = enumerate_shells(SIC, relation, 12.0)
    outer = enumerate_shells(SIC, relation, 25.0)
    assert len(outer) > len(inner)
    assert outer[: len(inner)] == inner


def test_repeated_enumeration_hits_cache(fresh_cache):
    first = enumerate_shells(SIC, Relation.OPPOSITE, 10.0)
    second = enumerate_shells(SIC, Relation.OPPOSITE, 10.0)
    stats = fresh_cache.get_stats()
    assert first == second
    assert stats["hits"] == 1
    assert stats["misses"] == 1
    assert stats["total_entries"] == 1


def test_enumeration_guard():
    with pytest.raises(ResourceGuardError):
        enumerate_shells(SIC, Relation.SAME, 51 * SIC.a0)
    with pytest.raises(DomainError):
        enumerate_shells(SIC, Relation.SAME, 0.0)


def test_closed_form_needs_definite_relation():
    with pytest.raises(DomainError):
        shell_distance_closed_form(3, Relation.ANY, 4.0)
    with pytest.raises(DomainError):
        shell_distance_closed_form(0, Relation.SAME, 4.0)


@pytest.mark.parametrize("relation, n", [(Relation.SAME, 6), (Relation.OPPOSITE, 6)])
def test_pair_orientations_cover_shell(relation, n):
    for shell in first_shells(SIC, relation, n):
        geometry = pair_orientations(shell)
        vectors = np.array(geometry.vectors)
        assert len(vectors) == shell.multiplicity
        assert np.allclose(np.linalg.norm(vectors, axis=1), shell.R)
        assert sum(o.count for o in geometry.orbits) == shell.multiplicity


def test_pair_orientations_orbit_split():
    # 35 = 1 + 9 + 25 is the only split into odd squares
    shell = [s for s in first_shells(SIC, Relation.OPPOSITE, 6) if s.m_prime == 5][0]
    geometry = pair_orientations(shell)
    assert [o.key for o in geometry.orbits] == [(1, 3, 5)]
    assert geometry.orbits[0].count == 24


def test_relation_for_pair(database):
    sic, diamond = database.host("3C-SiC"), database.host("diamond")
    n_c = database.defect("N_C", "3C-SiC")
    assert relation_for_pair(sic, n_c, database.defect("Al_Si", "3C-SiC")) == Relation.OPPOSITE
    assert relation_for_pair(sic, n_c, database.defect("B_C", "3C-SiC")) == Relation.SAME
    assert relation_for_pair(
        diamond, database.defect("N_C", "diamond"), database.defect("B_C", "diamond")
    ) == Relation.ANY
