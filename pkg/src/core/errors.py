"""
Exception hierarchy for dapkit

Every failure the CLI reports maps onto one of these classes; the class
carries the exit code and the short `kind` used in the one-line diagnostic.
"""
import json


class DapkitError(Exception):
    """Base class for all toolkit errors"""

    exit_code: int = 1
    kind: str = "internal"

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail

    def diagnostic(self) -> str:
        """Single-line machine-parseable diagnostic"""
        return json.dumps(
            {"error": self.kind, "exit_code": self.exit_code, "detail": self.detail},
            sort_keys=True,
        )


class UsageError(DapkitError):
    exit_code = 2
    kind = "usage"


class ConfigError(DapkitError, ValueError):
    """Database or config document failed to parse or validate"""

    exit_code = 3
    kind = "config"

    def __init__(self, detail: str, line: int | None = None, field: str | None = None):
        prefix = []
        if line is not None:
            prefix.append(f"line {line}")
        if field is not None:
            prefix.append(f"field '{field}'")
        super().__init__(f"{', '.join(prefix)}: {detail}" if prefix else detail)
        self.line = line
        self.field = field


class InputFileError(DapkitError, FileNotFoundError):
    exit_code = 4
    kind = "input-file"


class DomainError(DapkitError, ValueError):
    """Argument outside the mathematical domain of an operation"""

    exit_code = 5
    kind = "domain"


class ResourceGuardError(DapkitError):
    exit_code = 6
    kind = "resource-guard"


class FitError(DapkitError, ValueError):
    exit_code = 7
    kind = "fit"


class TruncationError(DapkitError):
    exit_code = 8
    kind = "truncation"


class ConsistencyError(DapkitError, ValueError):
    """Inputs disagree with each other (charge balance, atom lists, cells)"""

    exit_code = 9
    kind = "consistency"


class LookupFailure(DapkitError, KeyError):
    exit_code = 10
    kind = "lookup"

    def __str__(self) -> str:
        return self.detail
