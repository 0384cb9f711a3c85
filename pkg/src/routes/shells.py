"""
Lattice shell routes for dapkit
"""
import logging

from src.core.config import settings
from src.core.data_loader import get_data_loader
from src.core.errors import UsageError
from src.core.router import CommandResult, CommandRouter
from src.core.utils import parse_length
from src.domain.requests import ShellsRequest
from src.domain.schemas import HostMaterial, LatticeSpec, MaterialsDatabase, Relation
from src.engine.lattice import enumerate_shells, first_shells, relation_for_pair

logger = logging.getLogger(__name__)

router = CommandRouter(tags=["Lattice"])

DEFAULT_SHELL_COUNT = 10


def resolve_relation(request: ShellsRequest, database: MaterialsDatabase, host: HostMaterial) -> Relation:
    """Explicit --relation, else the relation of the named pair, else any"""
    if request.relation is not None:
        return Relation(request.relation)
    if (request.donor is None) != (request.acceptor is None):
        raise UsageError("shells: --donor and --acceptor go together")
    if request.donor is not None:
        return relation_for_pair(
            host,
            database.defect(request.donor, host.name),
            database.defect(request.acceptor, host.name),
        )
    return Relation.ANY


@router.command("shells", ShellsRequest)
def list_shells(request: ShellsRequest) -> CommandResult:
    """
    Enumerate donor-acceptor separation shells of a host lattice.

    Either every shell within --rmax or the first --shells shells
    (10 when neither is given).
    """
    database = get_data_loader().default_materials()
    host = database.host(request.host or settings.DEFAULT_HOST)
    relation = resolve_relation(request, database, host)
    lattice = LatticeSpec.for_host(host)

    if request.rmax is not None:
        shells = enumerate_shells(lattice, relation, parse_length(request.rmax))
    else:
        shells = first_shells(lattice, relation, request.shells or DEFAULT_SHELL_COUNT)
    logger.info(f"{len(shells)} {relation.value} shells in {host.name}")

    return CommandResult(
        schema_name="shells",
        header=["m", "R_angstrom", "multiplicity", "relation", "m_prime", "sublattice"],
        rows=[
            (s.m, s.R, s.multiplicity, s.relation.value, s.m_prime, s.sublattice.value)
            for s in shells
        ],
        result={"host": host.name, "relation": relation.value, "shells": shells},
    )
