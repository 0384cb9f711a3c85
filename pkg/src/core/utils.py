"""
Core utility functions for dapkit

Number formatting, CSV/JSON emission, input digests and run manifests.
"""
import csv
import hashlib
import io
import json
import math
import re
import uuid
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

import numpy as np
from pydantic import BaseModel

from src.core.config import settings
from src.core.errors import DomainError, InputFileError
from src.domain.schemas import RunManifest


# Length suffixes accepted on the command line, in Å
LENGTH_UNITS = {"a": 1.0, "angstrom": 1.0, "nm": 10.0, "um": 1e4, "μm": 1e4}


def format_number(value: Any, digits: Optional[int] = None) -> str:
    """
    Format one value for CSV output.

    Floats use `digits` significant digits in '%g' style, which is locale
    independent; integers and strings pass through.
    """
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        digits = digits or settings.SIGNIFICANT_DIGITS
        value = float(value)
        if value == 0.0:
            return "0"
        return f"{value:.{digits}g}"
    if isinstance(value, Enum):
        return str(value.value)
    return str(value)


def round_significant(value: Any, digits: Optional[int] = None) -> Any:
    """Recursively round floats in a JSON-ready structure"""
    if isinstance(value, BaseModel):
        value = value.model_dump(mode="json")
    if isinstance(value, np.ndarray):
        value = value.tolist()
    if isinstance(value, dict):
        return {k: round_significant(v, digits) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [round_significant(v, digits) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if not math.isfinite(value):
            return None
        return float(format_number(value, digits))
    if isinstance(value, Enum):
        return value.value
    return value


def schema_id(name: str) -> str:
    return f"dapkit.{name}/1"


def render_csv(name: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    """
    Render rows as CSV text.

    Args:
        name: Schema name, written as the '# schema:' comment line
        header: Column names
        rows: Row values, formatted with format_number

    Returns:
        CSV text with '\\n' line endings
    """
    buffer = io.StringIO()
    buffer.write(f"# schema: {schema_id(name)}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_number(v) for v in row])
    return buffer.getvalue()


def render_json(name: str, result: Any, manifest: Optional[RunManifest] = None) -> str:
    """Render a result object as the {schema, result[, manifest]} document"""
    document: Dict[str, Any] = {"schema": schema_id(name), "result": round_significant(result)}
    if manifest is not None:
        document["manifest"] = manifest.model_dump(mode="json")
    return json.dumps(document, indent=2, sort_keys=True) + "\n"


def sha256_file(path: str) -> str:
    """SHA-256 hex digest of a file's bytes"""
    try:
        return hashlib.sha256(Path(path).read_bytes()).hexdigest()
    except OSError as e:
        raise InputFileError(f"cannot read {path}: {e.strerror or e}")


def generate_run_id() -> str:
    """Generate a unique run ID for tracing."""
    return f"run-{uuid.uuid4().hex[:12]}"


def build_manifest(
    subcommand: str,
    parameters: Dict[str, Any],
    input_digests: Dict[str, str],
) -> RunManifest:
    return RunManifest(
        subcommand=subcommand,
        parameters=round_significant(parameters),
        input_digests=dict(sorted(input_digests.items())),
        tool_version=settings.TOOL_VERSION,
        generated_at=datetime.now(timezone.utc),
        run_id=generate_run_id(),
    )


def parse_length(text: str) -> float:
    """
    Parse a length such as '1nm', '1um' or '15' (Å) into Å.

    Raises:
        DomainError: unparseable text or unknown unit
    """
    match = re.fullmatch(r"\s*([-+0-9.eE]+)\s*([A-Za-zμÅ]*)\s*", text)
    if match is None:
        raise DomainError(f"cannot parse length '{text}'")
    number, unit = match.groups()
    unit = (unit or "a").lower().replace("å", "a")
    if unit not in LENGTH_UNITS:
        raise DomainError(f"unknown length unit '{unit}' in '{text}'")
    try:
        return float(number) * LENGTH_UNITS[unit]
    except ValueError:
        raise DomainError(f"cannot parse length '{text}'")


def log_grid(start: float, stop: float, n_points: int) -> np.ndarray:
    """Logarithmically spaced grid including both ends"""
    if start <= 0 or stop <= start or n_points < 2:
        raise DomainError(f"invalid log grid [{start}, {stop}] with {n_points} points")
    return np.logspace(np.log10(start), np.log10(stop), n_points)


def strip_comments(lines: Iterable[str]) -> List[str]:
    """Drop '#' comment and blank lines"""
    return [line for line in lines if line.strip() and not line.lstrip().startswith("#")]
