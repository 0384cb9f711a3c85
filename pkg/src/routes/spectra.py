"""
Photoluminescence lineshape routes for dapkit
"""
import logging
from typing import List, Optional, Tuple

import numpy as np

from src.core.config import settings
from src.core.data_loader import get_data_loader
from src.core.errors import ConfigError, LookupFailure
from src.core.router import CommandResult, CommandRouter
from src.domain.requests import PlSpectrumRequest
from src.domain.schemas import LatticeSpec, MaterialsDatabase, Shell, Spectrum, VibronicCase, VibronicModel
from src.engine.dap_model import zpl_energy
from src.engine.lattice import first_shells
from src.engine.spectra import composite_spectrum, default_grid, lineshape
from src.routes.zpl import resolve_pair

logger = logging.getLogger(__name__)

router = CommandRouter(tags=["Spectra"])


def pick_case(cases: dict, name: Optional[str]) -> VibronicCase:
    if name is None:
        return next(iter(cases.values()))
    if name not in cases:
        raise LookupFailure(f"unknown case '{name}' (known: {', '.join(sorted(cases))})")
    return cases[name]


def case_models(
    case: VibronicCase, database: MaterialsDatabase, composite: bool = False
) -> List[Tuple[Optional[Shell], VibronicModel]]:
    """
    Vibronic models of a case, one per shell.

    A case pinned to a pair and shell gets its ZPL from the DAP model; a
    fixed E_zpl overrides that, and neighbouring shells then keep their
    model spacing relative to it.
    """
    has_pair = None not in (case.host, case.donor, case.acceptor, case.shell)
    if not has_pair and (composite or case.E_zpl is None):
        raise ConfigError(
            f"case '{case.name}' needs host, donor, acceptor and shell"
            + (" for a composite spectrum" if composite else " or a fixed E_zpl")
        )

    def model(E_zpl: float, m: Optional[int]) -> VibronicModel:
        label = case.name if m is None else f"{case.name}:m{m}"
        return VibronicModel.from_displacement(case.delta_Q, case.omega_g, case.omega_e, E_zpl, label)

    if not has_pair:
        return [(None, model(case.E_zpl, None))]

    params, relation = resolve_pair(database, case.host, case.donor, case.acceptor)
    neighbours = case.neighbours if composite else 0
    shells = first_shells(LatticeSpec.for_host(params.host), relation, case.shell + neighbours)
    centre = shells[case.shell - 1]
    offset = 0.0 if case.E_zpl is None else case.E_zpl - zpl_energy(params, centre.R)
    selected = shells[max(0, case.shell - 1 - neighbours):]
    return [(s, model(zpl_energy(params, s.R) + offset, s.m)) for s in selected]


def spectrum_table(spectrum: Spectrum) -> Tuple[List[str], list]:
    """CSV header and rows, one component column per shell"""
    keys = list(spectrum.components)
    header = ["energy_eV", "intensity_per_eV"] + [f"intensity_{k}" for k in keys]
    columns = [spectrum.energy, spectrum.intensity] + [spectrum.components[k] for k in keys]
    return header, [tuple(float(c[i]) for c in columns) for i in range(len(spectrum.energy))]


def spectrum_summary(spectrum: Spectrum, case: VibronicCase, models) -> dict:
    return {
        "case": case.name,
        "illustrative": case.illustrative,
        "temperature_K": spectrum.temperature,
        "gamma_meV": spectrum.gamma_meV,
        "sigma_meV": spectrum.sigma_meV,
        "zpl_weight": spectrum.zpl_weight,
        "captured_weight": spectrum.captured_weight,
        "peak_eV": float(spectrum.energy[spectrum.intensity.argmax()]),
        "models": [
            {"m": shell.m if shell else None, "R_angstrom": shell.R if shell else None,
             "multiplicity": shell.multiplicity if shell else None, **m.model_dump()}
            for shell, m in models
        ],
    }


def render_case(
    case: VibronicCase,
    database: MaterialsDatabase,
    composite: bool,
    T: Optional[float] = None,
    gamma: Optional[float] = None,
    sigma: Optional[float] = None,
    step: Optional[float] = None,
) -> Tuple[Spectrum, list]:
    models = case_models(case, database, composite)
    if composite:
        grid = None if step is None else _joint_grid([m for _, m in models], step)
        spectrum = composite_spectrum(models, T, grid, gamma, sigma)
    else:
        grid = None if step is None else default_grid(models[0][1], step)
        spectrum = lineshape(models[0][1], T, grid, gamma, sigma)
    return spectrum, models


def _joint_grid(models: List[VibronicModel], step_meV: float) -> np.ndarray:
    grids = [default_grid(m, step_meV) for m in models]
    lo, hi = min(g[0] for g in grids), max(g[-1] for g in grids)
    step = step_meV * 1e-3
    return lo + step * np.arange(int(round((hi - lo) / step)) + 1)


@router.command("pl-spectrum", PlSpectrumRequest)
def pl_spectrum(request: PlSpectrumRequest) -> CommandResult:
    """
    Luminescence lineshape of one vibronic case.

    --composite sums the case's shell and its neighbours weighted by
    multiplicity, each at its DAP-model ZPL.
    """
    loader = get_data_loader()
    cases = loader.load_vibronic(request.model or settings.VIBRONIC_CONFIG)
    case = pick_case(cases, request.case)
    database = loader.default_materials() if case.host is not None else None
    spectrum, models = render_case(
        case, database, request.composite, request.T, request.gamma, request.sigma, request.step
    )
    logger.info(
        f"{case.name}: {len(models)} shell(s), ZPL weight {spectrum.zpl_weight:.3g}, "
        f"{len(spectrum.energy)} grid points"
    )
    header, rows = spectrum_table(spectrum)
    return CommandResult(
        schema_name="pl-spectrum", header=header, rows=rows,
        result=spectrum_summary(spectrum, case, models),
    )
