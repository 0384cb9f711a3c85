"""
Zero-phonon line routes for dapkit
"""
import logging
from typing import Optional, Tuple

from pydantic import ValidationError

from src.core.config import settings
from src.core.data_loader import get_data_loader
from src.core.errors import DomainError
from src.core.router import CommandResult, CommandRouter
from src.domain.requests import ZplFitRequest, ZplSeriesRequest
from src.domain.schemas import DapModelParams, LatticeSpec, MaterialsDatabase, Relation
from src.engine.dap_model import envelope_radii, fit_series, model_valid_shells, zpl_series
from src.engine.lattice import relation_for_pair

logger = logging.getLogger(__name__)

router = CommandRouter(tags=["ZPL"])


def resolve_pair(
    database: MaterialsDatabase,
    host_name: str,
    donor_name: str,
    acceptor_name: str,
    relation: Optional[str] = None,
) -> Tuple[DapModelParams, Relation]:
    """
    Model parameters and sublattice relation of a named pair.

    Raises:
        LookupFailure: unknown host or defect
        DomainError: roles swapped or E_D + E_A >= E_g
    """
    host = database.host(host_name)
    donor = database.defect(donor_name, host.name)
    acceptor = database.defect(acceptor_name, host.name)
    try:
        params = DapModelParams(host=host, donor=donor, acceptor=acceptor)
    except ValidationError as e:
        raise DomainError(f"{donor_name}-{acceptor_name} in {host_name}: {e.errors()[0]['msg']}")
    if relation is not None:
        return params, Relation(relation)
    return params, relation_for_pair(host, donor, acceptor)


@router.command("zpl-series", ZplSeriesRequest)
def series(request: ZplSeriesRequest) -> CommandResult:
    """
    Model ZPL energies of a donor-acceptor pair over the first shells.

    The relation follows the substituted sites unless --relation is given.
    """
    database = get_data_loader().default_materials()
    params, relation = resolve_pair(
        database, request.host, request.donor, request.acceptor, request.relation
    )
    result = zpl_series(
        params, LatticeSpec.for_host(params.host), relation, request.shells, request.with_j
    )
    a_D, a_A = envelope_radii(params)
    valid = model_valid_shells(result, a_D, a_A)
    if len(valid.points) < len(result.points):
        logger.info(
            f"{len(result.points) - len(valid.points)} shells lie inside "
            f"max(a_D, a_A) = {max(a_D, a_A):.3f} Å"
        )

    return CommandResult(
        schema_name="zpl-series",
        header=["m", "R_angstrom", "zpl_eV"],
        rows=[(p.m, p.R, p.energy) for p in result.points],
        result={"relation": relation.value, "series": result, "a_D": a_D, "a_A": a_A},
    )


@router.command("zpl-fit", ZplFitRequest)
def fit(request: ZplFitRequest) -> CommandResult:
    """Fit ZPL energies against r_b/R_m; the intercept gives E_D + E_A"""
    loader = get_data_loader()
    data = loader.load_series(request.input)
    host = loader.default_materials().host(request.host or settings.DEFAULT_HOST)
    result = fit_series([(p.R, p.energy) for p in data.points], host.r_b, host.E_g)
    logger.info(f"E_D + E_A = {result.binding_sum:.4f} eV from {result.n_points} points")
    return CommandResult(
        schema_name="zpl-fit",
        result={"host": host.name, "provenance": data.provenance, **result.model_dump()},
    )
