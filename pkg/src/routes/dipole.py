"""
Static dipole routes for dapkit
"""
import logging

from src.core.data_loader import get_data_loader
from src.core.router import CommandResult, CommandRouter
from src.domain.requests import DipoleRequest
from src.engine.polarization import dipole_from_snapshots, nv_reference_dipole

logger = logging.getLogger(__name__)

router = CommandRouter(tags=["Polarization"])


@router.command("dipole", DipoleRequest)
def dipole(request: DipoleRequest) -> CommandResult:
    """
    Branch-resolved static dipole from ground and excited snapshots.

    μ = d_ground − d_excited, shifted by lattice vectors onto the branch
    nearest --hint (default e·(R_D − R_A) from the ground snapshot header).
    """
    loader = get_data_loader()
    ground = loader.load_snapshot(request.ground)
    excited = loader.load_snapshot(request.excited)
    result = dipole_from_snapshots(ground, excited, request.hint)
    nv = nv_reference_dipole()
    logger.info(f"|μ| = {result.magnitude:.4f} e·Å ({result.magnitude_debye:.2f} D)")

    return CommandResult(
        schema_name="dipole",
        result={
            "vector_eA": result.vector,
            "magnitude_eA": result.magnitude,
            "magnitude_debye": result.magnitude_debye,
            "branch_shift": result.branch_shift,
            "ambiguity_flag": result.ambiguity_flag,
            "ratio_to_nv": result.magnitude / nv.magnitude,
        },
    )
