"""
Data loader for dapkit input files

Reads the materials and vibronic databases, chemical potentials, charge
snapshots and the CSV inputs (total-energy records, ZPL series, Stark
curves). Every file read is digested for the run manifest.
"""
import csv
import logging
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from pydantic import ValidationError

from src.core.config import settings
from src.core.errors import ConfigError, ConsistencyError, InputFileError
from src.core.utils import sha256_file, strip_comments
from src.domain.schemas import (
    ChargeSnapshot,
    ChemicalPotentialSet,
    MaterialsDatabase,
    Nucleus,
    TotalEnergyRecord,
    VibronicCase,
    WannierCenter,
    ZplPoint,
    ZplSeries,
)
from src.engine.materials import load_database

logger = logging.getLogger(__name__)


class DataLoader:
    """Reads input files and remembers their digests"""

    def __init__(self):
        self.digests: Dict[str, str] = {}
        self._materials: Dict[str, MaterialsDatabase] = {}

    def _read(self, path: str) -> str:
        p = Path(path)
        if not p.is_file():
            raise InputFileError(f"input file not found: {path}")
        try:
            text = p.read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as e:
            raise InputFileError(f"cannot read {path}: {e}")
        self.digests[str(path)] = sha256_file(path)
        return text

    def _toml(self, path: str) -> Tuple[str, dict]:
        text = self._read(path)
        try:
            return text, tomllib.loads(text)
        except tomllib.TOMLDecodeError as e:
            raise ConfigError(f"{path}: {e}")

    def load_materials(self, path: str) -> MaterialsDatabase:
        """
        Load a materials database.

        Args:
            path: TOML document with [host.*] and [defect.*.*] tables

        Returns:
            Validated MaterialsDatabase (cached per path)
        """
        text = self._read(path)
        key = f"{path}:{self.digests[str(path)]}"
        if key not in self._materials:
            self._materials[key] = load_database(text, source=str(path))
        return self._materials[key]

    def default_materials(self) -> MaterialsDatabase:
        """Database named by settings.CONFIG (--config or DAPKIT_CONFIG)"""
        return self.load_materials(settings.CONFIG)

    def load_vibronic(self, path: str) -> Dict[str, VibronicCase]:
        """Load the `[model.<name>]` tables of a vibronic config"""
        _, document = self._toml(path)
        unknown = set(document) - {"model"}
        if unknown:
            raise ConfigError(f"{path}: unknown table '{sorted(unknown)[0]}'")
        cases = {}
        for name, table in document.get("model", {}).items():
            try:
                cases[name] = VibronicCase(name=name, **table)
            except ValidationError as e:
                err = e.errors()[0]
                field = ".".join(str(p) for p in err["loc"])
                raise ConfigError(f"{path} [model.{name}]: {err['msg']}", field=field)
        if not cases:
            raise ConfigError(f"{path}: no [model.*] tables")
        return cases

    def load_chempots(self, path: str) -> ChemicalPotentialSet:
        """Load `[chempot]` species = energy pairs"""
        _, document = self._toml(path)
        if set(document) != {"chempot"}:
            raise ConfigError(f"{path}: expected a single [chempot] table")
        try:
            return ChemicalPotentialSet(mu=document["chempot"])
        except ValidationError as e:
            raise ConfigError(f"{path}: {e.errors()[0]['msg']}", field="chempot")

    def load_snapshot(self, path: str) -> ChargeSnapshot:
        """
        Parse a charge snapshot.

        Header lines: `cell x y z` (three times), `charge q`, optional
        `donor x y z` / `acceptor x y z`. Body lines: `N Z x y z` for
        nuclei and `W deg x y z` for Wannier centres.
        """
        text = self._read(path)
        cell: List[Tuple[float, float, float]] = []
        nuclei: List[Nucleus] = []
        centers: List[WannierCenter] = []
        fields: Dict[str, object] = {"net_charge": 0.0}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].split()
            if not line:
                continue
            tag, values = line[0], line[1:]
            try:
                numbers = [float(v) for v in values]
                if tag == "cell" and len(numbers) == 3:
                    cell.append(tuple(numbers))
                elif tag == "charge" and len(numbers) == 1:
                    fields["net_charge"] = numbers[0]
                elif tag in ("donor", "acceptor") and len(numbers) == 3:
                    fields[tag] = tuple(numbers)
                elif tag == "N" and len(numbers) == 4:
                    nuclei.append(Nucleus(Z=numbers[0], position=tuple(numbers[1:])))
                elif tag == "W" and len(numbers) == 4:
                    centers.append(WannierCenter(degeneracy=int(numbers[0]), position=tuple(numbers[1:])))
                else:
                    raise ValueError(f"unrecognised line '{raw.strip()}'")
            except (ValueError, ValidationError) as e:
                raise ConfigError(f"{path}: {e}", line=lineno)
        if len(cell) != 3:
            raise ConfigError(f"{path}: expected 3 'cell' lines, found {len(cell)}", field="cell")
        try:
            return ChargeSnapshot(cell=tuple(cell), nuclei=nuclei, centers=centers, **fields)
        except ValidationError as e:
            raise ConsistencyError(f"{path}: {e.errors()[0]['msg']}")

    def _csv_rows(self, path: str, required: List[str]) -> List[Dict[str, str]]:
        text = self._read(path)
        reader = csv.DictReader(strip_comments(text.splitlines()))
        missing = [c for c in required if c not in (reader.fieldnames or [])]
        if missing:
            raise ConfigError(f"{path}: missing columns {missing}", field=missing[0])
        return list(reader)

    def load_records(self, path: str) -> List[TotalEnergyRecord]:
        """
        Load total-energy records.

        Columns: label,q,E_tot_eV,natoms,L_angstrom, optional E_corr_eV and
        one `n_<species>` column per added/removed species.
        """
        rows = self._csv_rows(path, ["label", "q", "E_tot_eV", "natoms", "L_angstrom"])
        records = []
        for i, row in enumerate(rows, start=1):
            try:
                records.append(
                    TotalEnergyRecord(
                        label=row["label"],
                        q=int(row["q"]),
                        E_tot=float(row["E_tot_eV"]),
                        natoms=int(row["natoms"]),
                        L=float(row["L_angstrom"]),
                        n_i={
                            k[2:]: int(v) for k, v in row.items()
                            if k.startswith("n_") and v not in ("", None) and int(v) != 0
                        },
                        E_corr=float(row["E_corr_eV"]) if row.get("E_corr_eV") else None,
                    )
                )
            except (ValueError, ValidationError) as e:
                raise ConfigError(f"{path}: record {i}: {e}")
        return records

    def load_series(self, path: str) -> ZplSeries:
        """Load an external ZPL series (columns m,R_angstrom,zpl_eV)"""
        rows = self._csv_rows(path, ["R_angstrom", "zpl_eV"])
        try:
            points = [
                ZplPoint(m=int(row.get("m") or i), R=float(row["R_angstrom"]), energy=float(row["zpl_eV"]))
                for i, row in enumerate(rows, start=1)
            ]
        except (ValueError, ValidationError) as e:
            raise ConfigError(f"{path}: {e}")
        return ZplSeries(points=points, provenance="external-data")

    def load_stark(self, path: str) -> List[Tuple[float, float]]:
        """Load a Stark curve (columns field_V_per_A,delta_E_eV)"""
        rows = self._csv_rows(path, ["field_V_per_A", "delta_E_eV"])
        try:
            return [(float(r["field_V_per_A"]), float(r["delta_E_eV"])) for r in rows]
        except ValueError as e:
            raise ConfigError(f"{path}: {e}")


# Global singleton instance
_loader_instance: Optional[DataLoader] = None


def get_data_loader() -> DataLoader:
    """Get or create the global data loader instance"""
    global _loader_instance
    if _loader_instance is None:
        _loader_instance = DataLoader()
    return _loader_instance


def reset_data_loader() -> DataLoader:
    """Start a fresh loader (new digest set) for one run"""
    global _loader_instance
    _loader_instance = DataLoader()
    return _loader_instance
