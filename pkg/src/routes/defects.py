"""
Charge transition level routes for dapkit
"""
import logging
from typing import List

from src.core.data_loader import get_data_loader
from src.core.router import CommandResult, CommandRouter
from src.domain.requests import CtlRequest
from src.domain.schemas import TransitionLevel
from src.engine.defects import ctl_table

logger = logging.getLogger(__name__)

router = CommandRouter(tags=["Defects"])

CTL_HEADER = [
    "defect", "q1", "q2", "level_eV", "reference", "kind",
    "binding_energy_eV", "in_gap", "error_estimate_eV", "n_sizes",
]


def ctl_rows(levels: List[TransitionLevel]) -> list:
    return [
        (t.defect, t.q1, t.q2, t.level, t.reference, t.kind, t.binding_energy,
         t.in_gap, t.error_estimate, t.n_sizes)
        for t in levels
    ]


@router.command("ctl", CtlRequest)
def ctl(request: CtlRequest) -> CommandResult:
    """
    Charge transition levels from supercell total energies.

    Rows labelled 'bulk' give the pristine energy per supercell size;
    several sizes are extrapolated to the dilute limit.
    """
    loader = get_data_loader()
    records = loader.load_records(request.records)
    chempots = loader.load_chempots(request.chempots)
    host = loader.default_materials().host(request.host)
    levels = ctl_table(records, chempots, host, apply_madelung=not request.no_madelung)
    logger.info(f"{len(levels)} transition levels for {host.name}")
    return CommandResult(
        schema_name="ctl", header=CTL_HEADER, rows=ctl_rows(levels),
        result={"host": host.name, "levels": levels},
    )
