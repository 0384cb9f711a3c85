"""
Request schemas for CLI subcommands

Each model lists the options of one subcommand; the router derives the
argparse flags from the field names (`with_j` -> `--with-j`).
"""
from typing import Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

RelationName = Literal["same-sublattice", "opposite-sublattice", "any"]
RecipeName = Literal["fig1b", "fig2", "fig3", "fig4", "fig5", "table1"]


class ShellsRequest(BaseModel):
    """Request for shell enumeration"""
    host: Optional[str] = Field(None, description="Host name in the materials database")
    relation: Optional[RelationName] = Field(
        None, description="Sublattice relation (default: from --donor/--acceptor, else any)"
    )
    donor: Optional[str] = Field(None, description="Donor name, used to pick the relation")
    acceptor: Optional[str] = Field(None, description="Acceptor name, used to pick the relation")
    rmax: Optional[str] = Field(None, description="Largest separation, e.g. '20', '2nm'")
    shells: Optional[int] = Field(None, description="Number of shells instead of --rmax", ge=1)

    model_config = ConfigDict(
        json_schema_extra={
            "example": {"host": "3C-SiC", "relation": "opposite-sublattice", "rmax": "12"}
        }
    )

    @model_validator(mode="after")
    def _one_extent(self) -> "ShellsRequest":
        if self.rmax is not None and self.shells is not None:
            raise ValueError("give either --rmax or --shells, not both")
        return self


class ZplSeriesRequest(BaseModel):
    """Request for a model ZPL series"""
    host: str = Field(..., description="Host name")
    donor: str = Field(..., description="Donor defect name, e.g. N_C")
    acceptor: str = Field(..., description="Acceptor defect name, e.g. Al_Si")
    shells: int = Field(10, description="Number of shells", ge=1)
    with_j: bool = Field(False, description="Add the J(R) overlap correction")
    relation: Optional[RelationName] = Field(
        None, description="Override the relation derived from the defect sites"
    )

    model_config = ConfigDict(
        json_schema_extra={
            "example": {"host": "3C-SiC", "donor": "N_C", "acceptor": "Al_Si", "shells": 10}
        }
    )


class ZplFitRequest(BaseModel):
    """Request for a ZPL series fit"""
    input: str = Field(..., description="CSV with columns m,R_angstrom,zpl_eV")
    host: Optional[str] = Field(None, description="Host supplying r_b and E_g")

    model_config = ConfigDict(
        json_schema_extra={"example": {"input": "series.csv", "host": "3C-SiC"}}
    )


class PlSpectrumRequest(BaseModel):
    """Request for a luminescence lineshape"""
    model: Optional[str] = Field(None, description="Vibronic config (TOML)")
    case: Optional[str] = Field(None, description="[model.<name>] table; default the first")
    T: Optional[float] = Field(None, description="Temperature in K", ge=0)
    gamma: Optional[float] = Field(None, description="ZPL Lorentzian HWHM in meV", gt=0)
    sigma: Optional[float] = Field(None, description="Sideband Gaussian std in meV", gt=0)
    step: Optional[float] = Field(None, description="Grid step in meV", gt=0)
    composite: bool = Field(False, description="Sum neighbouring shells by multiplicity")

    model_config = ConfigDict(
        json_schema_extra={"example": {"model": "data/vibronic.example", "case": "aln-sic", "T": 5}}
    )


class DipoleRequest(BaseModel):
    """Request for a branch-resolved dipole"""
    ground: str = Field(..., description="Ground-state snapshot")
    excited: str = Field(..., description="Excited-state snapshot")
    hint: Optional[Tuple[float, float, float]] = Field(
        None, description="Expected dipole in e·Å"
    )

    model_config = ConfigDict(
        json_schema_extra={"example": {"ground": "data/ground.example.snap",
                                       "excited": "data/excited.example.snap"}}
    )


class StarkFitRequest(BaseModel):
    """Request for a quadratic Stark fit"""
    input: str = Field(..., description="CSV with columns field_V_per_A,delta_E_eV")
    emax: Optional[float] = Field(None, description="Field span for the tunability, V/Å", gt=0)


class InteractionMapRequest(BaseModel):
    """Request for the dipole-dipole interaction map"""
    mu1: float = Field(15.0, description="First dipole in e·Å", gt=0)
    mu2: float = Field(15.0, description="Second dipole in e·Å", gt=0)
    eps: float = Field(9.72, description="Host dielectric constant", ge=1)
    rmin: str = Field("1nm", description="Smallest distance")
    rmax: str = Field("1um", description="Largest distance")
    points: int = Field(61, description="Grid points", ge=2)

    model_config = ConfigDict(
        json_schema_extra={"example": {"mu1": 15, "mu2": 15, "eps": 9.72, "rmin": "1nm", "rmax": "1um"}}
    )


class LifetimeRequest(BaseModel):
    """Request for a radiative lifetime"""
    energy_eV: float = Field(..., description="Transition energy in eV", gt=0)
    mu_eA: float = Field(..., description="Optical transition dipole in e·Å", gt=0)
    nr: float = Field(..., description="Refractive index", gt=0)
    convention: Optional[Literal["as-printed", "standard-3pi-eps0-hbar"]] = Field(
        None, description="Lifetime formula"
    )


class CtlRequest(BaseModel):
    """Request for a charge transition level table"""
    records: str = Field(..., description="Total-energy records CSV")
    chempots: str = Field(..., description="Chemical potentials (TOML [chempot])")
    host: str = Field(..., description="Host name")
    no_madelung: bool = Field(False, description="Skip the point-charge correction")

    model_config = ConfigDict(
        json_schema_extra={"example": {"records": "data/records-sic.example.csv",
                                       "chempots": "data/chempots.example", "host": "3C-SiC"}}
    )


class ReproduceRequest(BaseModel):
    """Request for a figure or table recipe"""
    recipe: RecipeName = Field(..., description="Recipe name", json_schema_extra={"positional": True})
    case: Optional[str] = Field(None, description="fig5 case (bn-diamond, bp-diamond, bn-sic, aln-sic)")
