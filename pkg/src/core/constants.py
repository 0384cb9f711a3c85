"""
Physical constants and unit conventions

Internal units: energies in eV, lengths in Å, dipoles in e·Å, masses in amu.
SI only appears at the boundaries (frequencies in Hz, lifetimes in s).
"""
from pydantic import BaseModel, ConfigDict, Field
from scipy import constants as codata


class PhysicalConstants(BaseModel):
    """CODATA values fixed when the package is imported"""

    model_config = ConfigDict(frozen=True)

    coulomb_eV_angstrom: float = Field(..., description="e²/4πε₀ in eV·Å")
    hbar_eVs: float = Field(..., description="ħ in eV·s")
    planck_eVs: float = Field(..., description="h in eV·s")
    debye_per_eAngstrom: float = Field(..., description="Debye per e·Å")
    boltzmann_eV_per_K: float = Field(..., description="k_B in eV/K")
    speed_of_light: float = Field(..., description="c in m/s")
    vacuum_permittivity: float = Field(..., description="ε₀ in F/m")
    vacuum_permeability: float = Field(..., description="μ₀ in N/A²")
    bohr_magneton: float = Field(..., description="μ_B in J/T")
    elementary_charge: float = Field(..., description="e in C")
    planck_Js: float = Field(..., description="h in J·s")
    hbar_Js: float = Field(..., description="ħ in J·s")
    amu_kg: float = Field(..., description="atomic mass constant in kg")
    hz_per_eV: float = Field(..., description="E/h conversion, Hz per eV")
    hbar2_over_amu_A2_meV: float = Field(..., description="ħ²/(amu·Å²) in meV")
    g_nv: float = Field(2.003, description="NV-centre electron g-factor")

    @classmethod
    def from_codata(cls) -> "PhysicalConstants":
        e = codata.e
        eps0 = codata.epsilon_0
        amu = codata.physical_constants["atomic mass constant"][0]
        debye_Cm = 1e-21 / codata.c
        return cls(
            coulomb_eV_angstrom=e / (4 * codata.pi * eps0) * 1e10,
            hbar_eVs=codata.hbar / e,
            planck_eVs=codata.h / e,
            debye_per_eAngstrom=e * 1e-10 / debye_Cm,
            boltzmann_eV_per_K=codata.k / e,
            speed_of_light=codata.c,
            vacuum_permittivity=eps0,
            vacuum_permeability=codata.mu_0,
            bohr_magneton=codata.physical_constants["Bohr magneton"][0],
            elementary_charge=e,
            planck_Js=codata.h,
            hbar_Js=codata.hbar,
            amu_kg=amu,
            hz_per_eV=e / codata.h,
            hbar2_over_amu_A2_meV=codata.hbar**2 / (amu * 1e-20) / e * 1e3,
        )


# Global constants instance
CONSTANTS = PhysicalConstants.from_codata()


def eA_to_debye(value: float) -> float:
    """Convert a dipole from e·Å to Debye"""
    return value * CONSTANTS.debye_per_eAngstrom


def debye_to_eA(value: float) -> float:
    """Convert a dipole from Debye to e·Å"""
    return value / CONSTANTS.debye_per_eAngstrom


def ev_to_hz(energy_eV: float) -> float:
    return energy_eV * CONSTANTS.hz_per_eV


def ev_to_nm(energy_eV: float) -> float:
    """Photon wavelength in nm for a photon energy in eV"""
    return CONSTANTS.planck_eVs * CONSTANTS.speed_of_light / energy_eV * 1e9
