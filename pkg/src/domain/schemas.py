"""
Pydantic schemas for dapkit

Defines the data contracts shared by the engines, the file loaders and the
CLI: host/defect parameters, shells, vibronic models, spectra, charge
snapshots, field-response models, total-energy records and run manifests.
"""
from __future__ import annotations

from datetime import datetime
from enum import Enum
from typing import Dict, List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.core.constants import CONSTANTS

Vector3 = Tuple[float, float, float]


class LatticeKind(str, Enum):
    """Supported host crystal structures"""
    DIAMOND = "diamond-structure"
    ZINCBLENDE = "zincblende"


class DefectRole(str, Enum):
    DONOR = "donor"
    ACCEPTOR = "acceptor"


class Relation(str, Enum):
    """Sublattice relation between the two ends of a pair"""
    SAME = "same-sublattice"
    OPPOSITE = "opposite-sublattice"
    ANY = "any"


# ---------------------------------------------------------------------------
# materials
# ---------------------------------------------------------------------------

class HostMaterial(BaseModel):
    """One host crystal"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str = Field(..., description="Host label, e.g. 'diamond', '3C-SiC'")
    E_g: float = Field(..., description="Band gap in eV", gt=0)
    eps_r: float = Field(..., description="Static dielectric constant", ge=1)
    a0: float = Field(..., description="Cubic lattice constant in Å", gt=0)
    r_b: float = Field(..., description="Nearest-neighbour bond length in Å", gt=0)
    n_r: float = Field(..., description="Refractive index", gt=0)
    lattice_kind: LatticeKind = Field(..., description="Crystal structure")
    sublattices: Tuple[str, str] = Field(
        ..., description="Species on the (0,0,0) and (1/4,1/4,1/4) sublattices"
    )
    e_vbm: float = Field(0.0, description="Valence-band maximum reference energy in eV")
    madelung_constant: float = Field(
        2.8373, description="Madelung constant of the supercell lattice", gt=0
    )

    @model_validator(mode="after")
    def _check_bond_length(self) -> "HostMaterial":
        expected = self.a0 * np.sqrt(3.0) / 4.0
        if abs(self.r_b - expected) > 0.01 * expected:
            raise ValueError(
                f"r_b = {self.r_b} Å is not within 1% of a0*sqrt(3)/4 = {expected:.4f} Å"
            )
        return self


class DefectSpecies(BaseModel):
    """Substitutional donor or acceptor in a given host"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str = Field(..., description="Defect label, e.g. 'B_C', 'Al_Si'")
    host: str = Field(..., description="Name of the host this entry belongs to")
    role: DefectRole = Field(..., description="donor or acceptor")
    site: str = Field(..., description="Host species the impurity replaces")
    E_bind: float = Field(..., description="Binding energy in eV", gt=0)
    a_bohr: Optional[float] = Field(
        None, description="Effective envelope radius in Å (derived when omitted)", gt=0
    )

    @property
    def key(self) -> str:
        return f"{self.name}@{self.host}"


class MaterialsDatabase(BaseModel):
    """Hosts and defect species keyed by name"""

    model_config = ConfigDict(frozen=True)

    hosts: Dict[str, HostMaterial] = Field(default_factory=dict)
    defects: Dict[str, DefectSpecies] = Field(
        default_factory=dict, description="Keyed '<name>@<host>'"
    )
    source: Optional[str] = Field(None, description="Path the database was read from")

    def host(self, name: str) -> HostMaterial:
        from src.core.errors import LookupFailure

        if name not in self.hosts:
            raise LookupFailure(
                f"unknown host '{name}' (known: {', '.join(sorted(self.hosts))})"
            )
        return self.hosts[name]

    def defect(self, name: str, host: str) -> DefectSpecies:
        from src.core.errors import LookupFailure

        key = f"{name}@{host}"
        if key not in self.defects:
            raise LookupFailure(f"unknown defect '{name}' in host '{host}'")
        return self.defects[key]


# ---------------------------------------------------------------------------
# lattice
# ---------------------------------------------------------------------------

class LatticeSpec(BaseModel):
    """fcc lattice with a two-site basis"""

    model_config = ConfigDict(frozen=True)

    a0: float = Field(..., description="Cubic lattice constant in Å", gt=0)
    kind: LatticeKind = Field(LatticeKind.ZINCBLENDE)

    @property
    def basis(self) -> Tuple[Vector3, Vector3]:
        q = self.a0 / 4.0
        return (0.0, 0.0, 0.0), (q, q, q)

    @property
    def nearest_neighbor_distance(self) -> float:
        return self.a0 * np.sqrt(3.0) / 4.0

    @classmethod
    def for_host(cls, host: HostMaterial) -> "LatticeSpec":
        return cls(a0=host.a0, kind=host.lattice_kind)


class Shell(BaseModel):
    """One donor-acceptor separation shell"""

    model_config = ConfigDict(frozen=True)

    m: int = Field(..., description="1-based rank among realized distances", ge=1)
    m_prime: int = Field(..., description="Quadratic-form integer of the shell", ge=1)
    R: float = Field(..., description="Pair separation R_m in Å", gt=0)
    multiplicity: int = Field(..., description="Number of sites at this distance", gt=0)
    relation: Relation = Field(..., description="Relation the shell was enumerated for")
    sublattice: Relation = Field(
        ..., description="same- or opposite-sublattice: where the sites of this shell sit"
    )


class OrbitGroup(BaseModel):
    model_config = ConfigDict(frozen=True)

    key: Tuple[int, int, int] = Field(
        ..., description="Sorted absolute components in units of a0/4"
    )
    count: int = Field(..., gt=0)


class PairGeometry(BaseModel):
    """All displacement vectors of a shell"""

    model_config = ConfigDict(frozen=True)

    shell: Shell
    vectors: List[Vector3] = Field(..., description="Displacements in Å")
    orbits: List[OrbitGroup] = Field(..., description="Cubic point-group orbit partition")


# ---------------------------------------------------------------------------
# dap_model
# ---------------------------------------------------------------------------

class DapModelParams(BaseModel):
    """Host plus donor/acceptor pair entering the ZPL model"""

    model_config = ConfigDict(frozen=True)

    host: HostMaterial
    donor: DefectSpecies
    acceptor: DefectSpecies

    @model_validator(mode="after")
    def _check_pair(self) -> "DapModelParams":
        if self.donor.role != DefectRole.DONOR:
            raise ValueError(f"{self.donor.name} is not a donor")
        if self.acceptor.role != DefectRole.ACCEPTOR:
            raise ValueError(f"{self.acceptor.name} is not an acceptor")
        if self.donor.E_bind + self.acceptor.E_bind >= self.host.E_g:
            raise ValueError("E_D + E_A must be smaller than E_g")
        return self


class ZplPoint(BaseModel):
    model_config = ConfigDict(frozen=True)

    m: int = Field(..., ge=1)
    R: float = Field(..., description="Pair separation in Å", gt=0)
    energy: float = Field(..., description="ZPL energy in eV")


class ZplSeries(BaseModel):
    """ZPL energies against shell distance"""

    model_config = ConfigDict(frozen=True)

    points: List[ZplPoint]
    provenance: Literal["model", "external-data"] = "model"
    include_J: bool = False


class SeriesFit(BaseModel):
    """Least-squares line of ZPL energy against r_b/R_m"""

    slope: float = Field(..., description="eV per unit r_b/R_m")
    intercept: float = Field(..., description="Infinite-separation ZPL in eV")
    binding_sum: float = Field(..., description="E_g - intercept in eV")
    residual_rms: float
    residual_max: float
    n_points: int


# ---------------------------------------------------------------------------
# spectra
# ---------------------------------------------------------------------------

class GeometryPair(BaseModel):
    """Ground and excited geometries with a shared atom list"""

    labels: List[str]
    masses: List[float] = Field(..., description="Atomic masses in amu")
    ground: List[Vector3] = Field(..., description="Ground-state positions in Å")
    excited: List[Vector3] = Field(..., description="Excited-state positions in Å")

    @field_validator("masses")
    @classmethod
    def _positive_masses(cls, masses: List[float]) -> List[float]:
        if any(m <= 0 for m in masses):
            raise ValueError("masses must be positive")
        return masses


class VibronicModel(BaseModel):
    """Effective 1D configurational-coordinate model of one transition"""

    model_config = ConfigDict(frozen=True)

    delta_Q: float = Field(..., description="Mass-weighted displacement in amu^1/2·Å", ge=0)
    omega_g: float = Field(..., description="Ground-state ħΩ in meV", gt=0)
    omega_e: float = Field(..., description="Excited-state ħΩ in meV", gt=0)
    S_g: float = Field(..., description="Ground-state Huang-Rhys factor", ge=0)
    S_e: float = Field(..., description="Excited-state Huang-Rhys factor", ge=0)
    E_zpl: float = Field(..., description="Zero-phonon line in eV")
    label: Optional[str] = None

    @model_validator(mode="after")
    def _check_huang_rhys(self) -> "VibronicModel":
        bridge = 2.0 * CONSTANTS.hbar2_over_amu_A2_meV
        for S, omega, name in ((self.S_g, self.omega_g, "S_g"), (self.S_e, self.omega_e, "S_e")):
            expected = omega * self.delta_Q**2 / bridge
            if abs(S - expected) > 1e-10 * max(abs(expected), 1e-300):
                raise ValueError(f"{name} = {S} inconsistent with Ω·ΔQ²/2ħ = {expected}")
        return self

    @classmethod
    def from_displacement(
        cls, delta_Q: float, omega_g: float, omega_e: float, E_zpl: float,
        label: Optional[str] = None,
    ) -> "VibronicModel":
        bridge = 2.0 * CONSTANTS.hbar2_over_amu_A2_meV
        return cls(
            delta_Q=delta_Q, omega_g=omega_g, omega_e=omega_e, E_zpl=E_zpl,
            S_g=omega_g * delta_Q**2 / bridge, S_e=omega_e * delta_Q**2 / bridge,
            label=label,
        )


class VibronicCase(BaseModel):
    """One `[model.<name>]` table of a vibronic config"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str
    delta_Q: float = Field(..., ge=0)
    omega_g: float = Field(..., gt=0)
    omega_e: float = Field(..., gt=0)
    E_zpl: Optional[float] = Field(
        None, description="Fixed ZPL in eV; derived from the DAP model when omitted"
    )
    host: Optional[str] = None
    donor: Optional[str] = None
    acceptor: Optional[str] = None
    shell: Optional[int] = Field(None, ge=1, description="Shell index m the case describes")
    neighbours: int = Field(
        1, ge=0, description="Shells on each side included in composite spectra"
    )
    illustrative: bool = True


class Spectrum(BaseModel):
    """Normalized luminescence lineshape on a uniform grid"""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    energy: np.ndarray = Field(..., description="Photon energies in eV")
    intensity: np.ndarray = Field(..., description="Lineshape in 1/eV, unit area")
    temperature: float = Field(..., ge=0)
    gamma_meV: float
    sigma_meV: float
    zpl_weight: float = Field(..., description="Thermal zero-phonon weight")
    captured_weight: float = Field(..., description="Stick weight inside the grid")
    provenance: str = "model"
    components: Dict[str, np.ndarray] = Field(
        default_factory=dict, description="Per-shell contributions on the same grid"
    )


# ---------------------------------------------------------------------------
# polarization
# ---------------------------------------------------------------------------

class Nucleus(BaseModel):
    model_config = ConfigDict(frozen=True)

    Z: float = Field(..., description="Ionic (valence) charge in e")
    position: Vector3


class WannierCenter(BaseModel):
    model_config = ConfigDict(frozen=True)

    degeneracy: Literal[1, 2] = 2
    position: Vector3


class ChargeSnapshot(BaseModel):
    """Cell, nuclei and Wannier centres of one electronic state"""

    model_config = ConfigDict(frozen=True)

    cell: Tuple[Vector3, Vector3, Vector3] = Field(..., description="Rows are a1, a2, a3 in Å")
    net_charge: float = 0.0
    nuclei: List[Nucleus]
    centers: List[WannierCenter]
    donor: Optional[Vector3] = None
    acceptor: Optional[Vector3] = None

    @field_validator("cell")
    @classmethod
    def _nonsingular(cls, cell):
        if abs(np.linalg.det(np.asarray(cell, dtype=float))) < 1e-9:
            raise ValueError("cell vectors are linearly dependent")
        return cell

    @property
    def volume(self) -> float:
        return float(abs(np.linalg.det(np.asarray(self.cell, dtype=float))))


class DipoleResult(BaseModel):
    """Branch-resolved dipole moment"""

    model_config = ConfigDict(frozen=True)

    vector: Vector3 = Field(..., description="Dipole in e·Å")
    magnitude_debye: float
    branch_shift: Tuple[int, int, int] = (0, 0, 0)
    ambiguity_flag: bool = False

    @property
    def magnitude(self) -> float:
        return float(np.linalg.norm(self.vector))

    @classmethod
    def from_vector(cls, vector, branch_shift=(0, 0, 0), ambiguity_flag=False) -> "DipoleResult":
        v = tuple(float(x) for x in vector)
        return cls(
            vector=v,
            magnitude_debye=float(np.linalg.norm(v)) * CONSTANTS.debye_per_eAngstrom,
            branch_shift=tuple(int(n) for n in branch_shift),
            ambiguity_flag=ambiguity_flag,
        )


class OrientationAverage(BaseModel):
    """Statistics of dipoles over the orientations of one shell"""

    mean_vector: Vector3
    mean_magnitude: float = Field(..., description="e·Å")
    std_magnitude: float = Field(..., description="e·Å")
    mean_magnitude_debye: float
    n_orientations: int


# ---------------------------------------------------------------------------
# response
# ---------------------------------------------------------------------------

class StarkModel(BaseModel):
    """Linear + quadratic Stark response along one field axis"""

    model_config = ConfigDict(frozen=True)

    delta_mu: float = Field(..., description="Δμ projected on the field axis, e·Å")
    delta_alpha: float = Field(..., description="Δα along the axis, e·Å²/V")
    offset: float = Field(0.0, description="Fitted zero-field shift in eV")
    delta_mu_stderr: Optional[float] = None
    delta_alpha_stderr: Optional[float] = None
    residual_rms: Optional[float] = None
    n_points: Optional[int] = None


class InteractionQuery(BaseModel):
    """Two static dipoles at a given separation"""

    model_config = ConfigDict(frozen=True)

    mu1: Vector3 = Field(..., description="e·Å")
    mu2: Vector3 = Field(..., description="e·Å")
    r: float = Field(..., description="Separation in Å")
    direction: Vector3 = Field((1.0, 0.0, 0.0), description="Separation direction")
    eps_r: float = Field(1.0, ge=1)


class InteractionRange(BaseModel):
    threshold_Hz: float
    dap_range_nm: float = Field(..., description="Distance where the DAP coupling falls to threshold")
    spin_range_nm: float = Field(..., description="Same for the NV spin-spin reference")


class InteractionMap(BaseModel):
    """DAP dipole coupling against the spin-spin reference over a distance grid"""

    r_nm: List[float]
    V_Hz: List[float]
    spin_spin_Hz: List[float]
    coupling_ratio: float = Field(..., description="|V| / spin-spin, distance independent")
    range_factor: float = Field(..., description="coupling_ratio^(1/3)")
    ranges: List[InteractionRange]


class LifetimeInput(BaseModel):
    model_config = ConfigDict(frozen=True)

    energy_eV: float = Field(..., description="Transition energy ħω in eV", gt=0)
    mu_opt: float = Field(..., description="Optical transition dipole in e·Å", gt=0)
    n_r: float = Field(..., description="Refractive index", gt=0)


# ---------------------------------------------------------------------------
# defects
# ---------------------------------------------------------------------------

class TotalEnergyRecord(BaseModel):
    """Supercell total energy of one defect charge state"""

    model_config = ConfigDict(frozen=True)

    label: str = Field(..., description="Defect name, e.g. 'N_C'")
    q: int = Field(..., description="Charge state in e", ge=-2, le=2)
    E_tot: float = Field(..., description="Total energy in eV")
    natoms: int = Field(..., gt=0)
    L: float = Field(..., description="Supercell linear size in Å", gt=0)
    n_i: Dict[str, int] = Field(default_factory=dict, description="Atoms added (+) / removed (-)")
    E_corr: Optional[float] = Field(None, description="Explicit finite-size correction in eV")


class ChemicalPotentialSet(BaseModel):
    model_config = ConfigDict(frozen=True)

    mu: Dict[str, float] = Field(..., description="Chemical potential per species in eV")


class TransitionLevel(BaseModel):
    """Charge transition level referenced to the VBM"""

    model_config = ConfigDict(frozen=True)

    defect: str
    q1: int
    q2: int
    level: float = Field(..., description="ε(q1/q2) above the VBM in eV")
    reference: str = Field(..., description="'E_V + x' or 'E_C - y'")
    in_gap: bool
    kind: Optional[DefectRole] = None
    binding_energy: Optional[float] = None
    error_estimate: Optional[float] = Field(None, description="Dilute-limit fit scatter in eV")
    n_sizes: int = Field(1, description="Supercell sizes entering the level")


class DiluteLimit(BaseModel):
    limit: float
    slope: float
    error_estimate: float
    n_points: int


# ---------------------------------------------------------------------------
# cli
# ---------------------------------------------------------------------------

class RunManifest(BaseModel):
    """Metadata accompanying every output file"""

    subcommand: str = Field(..., description="Subcommand that produced the output")
    parameters: Dict[str, object] = Field(default_factory=dict)
    input_digests: Dict[str, str] = Field(default_factory=dict, description="SHA-256 per input path")
    tool_version: str
    generated_at: datetime
    run_id: str

    model_config = ConfigDict(
        json_schema_extra={
            "example": {
                "subcommand": "shells",
                "parameters": {"host": "3C-SiC", "relation": "opposite-sublattice"},
                "input_digests": {"data/materials.example": "3fa1..."},
                "tool_version": "1.0.0",
                "generated_at": "2026-01-06T10:30:00Z",
                "run_id": "run-abc123def456",
            }
        }
    )
