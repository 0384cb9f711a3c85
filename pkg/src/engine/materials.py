"""
Host/defect parameter database and hydrogenic envelope radii
"""
import logging
import re
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from typing import Any, Dict, Optional

from pydantic import ValidationError

from src.core.constants import CONSTANTS
from src.core.errors import ConfigError, DomainError
from src.domain.schemas import DefectSpecies, HostMaterial, MaterialsDatabase

logger = logging.getLogger(__name__)

_TOML_LINE = re.compile(r"at line (\d+)")


def effective_bohr_radius(E_bind: float, eps_r: float) -> float:
    """
    Hydrogenic radius whose 1s binding energy equals E_bind.

    a = e²/(8πε₀·ε_r·E_bind)

    Args:
        E_bind: Binding energy in eV
        eps_r: Static dielectric constant

    Returns:
        Radius in Å
    """
    if E_bind <= 0:
        raise DomainError(f"E_bind must be positive, got {E_bind}")
    if eps_r < 1:
        raise DomainError(f"eps_r must be >= 1, got {eps_r}")
    return CONSTANTS.coulomb_eV_angstrom / (2.0 * eps_r * E_bind)


def _find_line(text: str, header: str, key: Optional[str] = None) -> Optional[int]:
    """1-based line of `key` inside table `header`, or of the header itself"""
    lines = text.splitlines()
    start = None
    for i, line in enumerate(lines):
        stripped = line.split("#", 1)[0].strip()
        if start is None:
            if stripped.replace(" ", "") == f"[{header}]":
                start = i
                if key is None:
                    return i + 1
            continue
        if stripped.startswith("["):
            break
        if key is not None and re.match(rf"{re.escape(key)}\s*=", stripped):
            return i + 1
    return None if start is None else start + 1


def _validate(model, payload: Dict[str, Any], text: str, header: str):
    try:
        return model(**payload)
    except ValidationError as e:
        err = e.errors()[0]
        field = ".".join(str(p) for p in err["loc"]) or None
        raise ConfigError(
            f"[{header}] {err['msg']}", line=_find_line(text, header, field), field=field
        )


def load_database(text: str, source: Optional[str] = None) -> MaterialsDatabase:
    """
    Parse and validate a materials document.

    Tables are `[host.<name>]` and `[defect.<host>.<name>]`; keys are the
    HostMaterial / DefectSpecies field names. Unknown tables and keys are
    rejected. Defects without `a_bohr` get the hydrogenic radius of their
    binding energy in the host dielectric.

    Raises:
        ConfigError: parse failure (with line number) or invariant violation
    """
    try:
        document = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        match = _TOML_LINE.search(str(e))
        raise ConfigError(str(e), line=int(match.group(1)) if match else None)

    unknown = set(document) - {"host", "defect"}
    if unknown:
        name = sorted(unknown)[0]
        raise ConfigError(f"unknown table '{name}'", line=_find_line(text, name), field=name)

    hosts: Dict[str, HostMaterial] = {}
    for name, table in document.get("host", {}).items():
        if not isinstance(table, dict):
            raise ConfigError("host entries must be tables", field=f"host.{name}")
        hosts[name] = _validate(HostMaterial, {"name": name, **table}, text, f"host.{name}")

    defects: Dict[str, DefectSpecies] = {}
    for host_name, entries in document.get("defect", {}).items():
        if host_name not in hosts:
            raise ConfigError(
                f"defect table for undeclared host '{host_name}'",
                line=_find_line(text, f"defect.{host_name}.{next(iter(entries), '')}"),
                field=f"defect.{host_name}",
            )
        host = hosts[host_name]
        for name, table in entries.items():
            header = f"defect.{host_name}.{name}"
            defect = _validate(
                DefectSpecies, {"name": name, "host": host_name, **table}, text, header
            )
            if defect.E_bind >= host.E_g:
                raise ConfigError(
                    f"E_bind {defect.E_bind} eV is not below E_g {host.E_g} eV",
                    line=_find_line(text, header, "E_bind"), field="E_bind",
                )
            if defect.site not in host.sublattices:
                raise ConfigError(
                    f"site '{defect.site}' is not a {host_name} species {list(host.sublattices)}",
                    line=_find_line(text, header, "site"), field="site",
                )
            if defect.a_bohr is None:
                defect = defect.model_copy(
                    update={"a_bohr": effective_bohr_radius(defect.E_bind, host.eps_r)}
                )
            defects[defect.key] = defect

    logger.debug(f"Loaded {len(hosts)} hosts and {len(defects)} defects from {source or '<text>'}")
    return MaterialsDatabase(hosts=hosts, defects=defects, source=source)
