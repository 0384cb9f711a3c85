"""
Field and radiation response routes for dapkit
"""
import logging

from src.core.config import settings
from src.core.constants import ev_to_nm
from src.core.data_loader import get_data_loader
from src.core.router import CommandResult, CommandRouter
from src.core.utils import parse_length
from src.domain.requests import InteractionMapRequest, LifetimeRequest, StarkFitRequest
from src.domain.schemas import LifetimeInput
from src.engine.response import fit_stark, interaction_map, radiative_lifetime, stark_tunability

logger = logging.getLogger(__name__)

router = CommandRouter(tags=["Response"])


@router.command("stark-fit", StarkFitRequest)
def stark_fit(request: StarkFitRequest) -> CommandResult:
    """Quadratic fit of a Stark curve: Δμ, Δα and the ZPL tunability"""
    points = get_data_loader().load_stark(request.input)
    model = fit_stark(points)
    E_max = request.emax or max(abs(E) for E, _ in points)
    tunability = stark_tunability(model, E_max)
    logger.info(f"Δμ = {model.delta_mu:.4f} e·Å, tunability {tunability:.3f} THz over ±{E_max:g} V/Å")
    return CommandResult(
        schema_name="stark-fit",
        result={**model.model_dump(), "E_max_V_per_A": E_max, "tunability_THz": tunability},
    )


@router.command("interaction-map", InteractionMapRequest)
def interaction(request: InteractionMapRequest) -> CommandResult:
    """
    Coupling of two side-by-side DAP dipoles against NV spin-spin coupling.

    CSV holds the curves; the JSON form adds the coupling ratio and the
    100 MHz / 1 MHz interaction ranges.
    """
    result = interaction_map(
        request.mu1, request.mu2, request.eps,
        parse_length(request.rmin), parse_length(request.rmax), request.points,
    )
    for r in result.ranges:
        logger.info(
            f"{r.threshold_Hz:.3g} Hz reached at {r.dap_range_nm:.1f} nm (DAP), "
            f"{r.spin_range_nm:.2f} nm (spin-spin)"
        )
    return CommandResult(
        schema_name="interaction-map",
        header=["r_nm", "V_Hz", "spin_spin_Hz"],
        rows=list(zip(result.r_nm, result.V_Hz, result.spin_spin_Hz)),
        result=result,
    )


@router.command("lifetime", LifetimeRequest)
def lifetime(request: LifetimeRequest) -> CommandResult:
    """Radiative lifetime τ = 3ε₀hc³ / (2 n_r ω³ |μ|²)"""
    data = LifetimeInput(energy_eV=request.energy_eV, mu_opt=request.mu_eA, n_r=request.nr)
    convention = request.convention or settings.LIFETIME_CONVENTION
    tau = radiative_lifetime(data, convention)
    return CommandResult(
        schema_name="lifetime",
        result={
            "tau_s": tau,
            "tau_ns": tau * 1e9,
            "convention": convention,
            "energy_eV": data.energy_eV,
            "wavelength_nm": ev_to_nm(data.energy_eV),
            "mu_eA": data.mu_opt,
            "n_r": data.n_r,
        },
    )
