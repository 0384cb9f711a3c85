"""
Figure and table recipes for dapkit

Each recipe runs from the shipped example inputs and emits plot-ready rows.
"""
import logging
from pathlib import Path

import numpy as np

from src.core.config import settings
from src.core.data_loader import get_data_loader
from src.core.errors import UsageError
from src.core.router import CommandResult, CommandRouter
from src.domain.requests import ReproduceRequest
from src.domain.schemas import LatticeSpec, StarkModel
from src.engine.dap_model import fit_series, zpl_series
from src.engine.defects import ctl_table
from src.engine.lattice import first_shells, pair_orientations
from src.engine.polarization import point_charge_dipole
from src.engine.response import fit_stark, interaction_map, stark_curve, stark_tunability
from src.routes.defects import CTL_HEADER, ctl_rows
from src.routes.spectra import pick_case, render_case, spectrum_summary, spectrum_table
from src.routes.zpl import resolve_pair

logger = logging.getLogger(__name__)

router = CommandRouter(tags=["Reproduce"])

FIG1B_DIPOLES_EA = (15.0, 5.0)
FIG1B_RANGE_A = (10.0, 1e4)
FIG1B_HOST = "3C-SiC"

BORON_NITROGEN = (("diamond", "N_C", "B_C"), ("3C-SiC", "N_C", "B_C"))
FIG3_PAIRS = BORON_NITROGEN + (("3C-SiC", "N_C", "Al_Si"),)
FIGURE_SHELLS = 10

# illustrative Stark curve for the diamond B-N m5 shell, field along [100]
FIG4_SHELL = 5
FIG4_DELTA_ALPHA = 20.0  # e·Å²/V
FIG4_FIELDS_V_PER_A = np.linspace(-0.01, 0.01, 21)

# composite-spectrum broadening and temperature
FIG5_GAMMA_MEV = 3.0
FIG5_SIGMA_MEV = 30.0
FIG5_TEMPERATURE_K = 5.0

TABLE1_INPUTS = (
    ("diamond", "records-diamond.example.csv"),
    ("3C-SiC", "records-sic.example.csv"),
)
CHEMPOTS_FILE = "chempots.example"


def fig1b() -> CommandResult:
    """DAP dipole-dipole coupling for 15 and 5 e·Å against NV spin-spin coupling"""
    eps_r = get_data_loader().default_materials().host(FIG1B_HOST).eps_r
    maps = [interaction_map(mu, mu, eps_r, *FIG1B_RANGE_A) for mu in FIG1B_DIPOLES_EA]
    header = ["r_nm"] + [f"V_{mu:g}eA_Hz" for mu in FIG1B_DIPOLES_EA] + ["spin_spin_Hz"]
    rows = [
        (r, *(m.V_Hz[i] for m in maps), maps[0].spin_spin_Hz[i])
        for i, r in enumerate(maps[0].r_nm)
    ]
    summary = {
        f"{mu:g}eA": {"coupling_ratio": m.coupling_ratio, "range_factor": m.range_factor, "ranges": m.ranges}
        for mu, m in zip(FIG1B_DIPOLES_EA, maps)
    }
    return CommandResult(schema_name="fig1b", header=header, rows=rows,
                         result={"host": FIG1B_HOST, "eps_r": eps_r, **summary})


def fig2() -> CommandResult:
    """Point-charge dipole e·R_m per shell for B-N pairs in diamond and 3C-SiC"""
    database = get_data_loader().default_materials()
    rows = []
    for host_name, donor, acceptor in BORON_NITROGEN:
        params, relation = resolve_pair(database, host_name, donor, acceptor)
        for shell in first_shells(LatticeSpec.for_host(params.host), relation, FIGURE_SHELLS):
            d = point_charge_dipole(shell.R)
            rows.append((host_name, f"{acceptor}-{donor}", shell.m, shell.R,
                         shell.multiplicity, d.magnitude, d.magnitude_debye))
    header = ["host", "pair", "m", "R_angstrom", "multiplicity", "dipole_eA", "dipole_debye"]
    return CommandResult(schema_name="fig2", header=header, rows=rows)


def fig3() -> CommandResult:
    """Model ZPL against r_b/R_m with the linear fit of each pair"""
    database = get_data_loader().default_materials()
    rows, fits = [], {}
    for host_name, donor, acceptor in FIG3_PAIRS:
        params, relation = resolve_pair(database, host_name, donor, acceptor)
        series = zpl_series(params, LatticeSpec.for_host(params.host), relation, FIGURE_SHELLS)
        r_b = params.host.r_b
        fit = fit_series([(p.R, p.energy) for p in series.points], r_b, params.host.E_g)
        label = f"{acceptor}-{donor}@{host_name}"
        fits[label] = fit
        for p in series.points:
            rows.append((host_name, f"{acceptor}-{donor}", p.m, p.R, r_b / p.R, p.energy,
                         fit.intercept + fit.slope * r_b / p.R))
    header = ["host", "pair", "m", "R_angstrom", "rb_over_R", "zpl_eV", "fit_eV"]
    return CommandResult(schema_name="fig3", header=header, rows=rows, result=fits)


def fig4() -> CommandResult:
    """Stark curve of the diamond B-N m5 shell from its point-charge dipole, plus the fit"""
    database = get_data_loader().default_materials()
    params, relation = resolve_pair(database, *BORON_NITROGEN[0])
    shell = first_shells(LatticeSpec.for_host(params.host), relation, FIG4_SHELL)[-1]
    # orientation with the largest projection on the field axis
    delta_mu = max(v[0] for v in pair_orientations(shell).vectors)
    model = StarkModel(delta_mu=delta_mu, delta_alpha=FIG4_DELTA_ALPHA)
    curve = stark_curve(model, FIG4_FIELDS_V_PER_A)
    fitted = fit_stark(curve)
    rows = [
        (E, dE, -delta_mu * E, fitted.offset - fitted.delta_mu * E - 0.5 * fitted.delta_alpha * E * E)
        for E, dE in curve
    ]
    E_max = float(FIG4_FIELDS_V_PER_A[-1])
    return CommandResult(
        schema_name="fig4",
        header=["field_V_per_A", "delta_E_eV", "first_order_eV", "fit_eV"],
        rows=rows,
        result={"shell": shell, "fit": fitted, "tunability_THz": stark_tunability(fitted, E_max)},
    )


def fig5(case_name: str) -> CommandResult:
    """Composite luminescence spectrum of one shipped case at 5 K"""
    loader = get_data_loader()
    case = pick_case(loader.load_vibronic(settings.VIBRONIC_CONFIG), case_name)
    spectrum, models = render_case(
        case, loader.default_materials(), True,
        FIG5_TEMPERATURE_K, FIG5_GAMMA_MEV, FIG5_SIGMA_MEV,
    )
    header, rows = spectrum_table(spectrum)
    return CommandResult(schema_name="fig5", header=header, rows=rows,
                         result=spectrum_summary(spectrum, case, models))


def table1() -> CommandResult:
    """Charge transition levels of the six shipped defects"""
    loader = get_data_loader()
    database = loader.default_materials()
    data_dir = Path(settings.DATA_DIR)
    chempots = loader.load_chempots(str(data_dir / CHEMPOTS_FILE))
    rows, levels = [], {}
    for host_name, records_file in TABLE1_INPUTS:
        host = database.host(host_name)
        table = ctl_table(loader.load_records(str(data_dir / records_file)), chempots, host)
        levels[host_name] = table
        rows.extend((host_name, *row) for row in ctl_rows(table))
    return CommandResult(schema_name="table1", header=["host"] + CTL_HEADER, rows=rows, result=levels)


RECIPES = {
    "fig1b": fig1b,
    "fig2": fig2,
    "fig3": fig3,
    "fig4": fig4,
    "table1": table1,
}


@router.command("reproduce", ReproduceRequest)
def reproduce(request: ReproduceRequest) -> CommandResult:
    """Regenerate the data behind a figure or table (fig1b, fig2, fig3, fig4, fig5, table1)"""
    logger.info(f"Recipe {request.recipe}")
    if request.recipe == "fig5":
        if request.case is None:
            raise UsageError("reproduce fig5: --case is required")
        return fig5(request.case)
    if request.case is not None:
        raise UsageError(f"reproduce {request.recipe}: --case applies to fig5 only")
    return RECIPES[request.recipe]()
