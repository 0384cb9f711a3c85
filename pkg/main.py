"""
dapkit - donor-acceptor pair modeling toolkit
Command-line entry point

Usage: python main.py [--config DB] [--out FILE] [--format csv|json]
                      [--threads N] [--log-level LEVEL] <subcommand> ...

Series go out as CSV, scalar results as JSON. Every failure ends with one
JSON diagnostic line on stderr and a nonzero exit code.
"""
import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from pydantic import BaseModel

from src.core.config import settings
from src.core.data_loader import reset_data_loader
from src.core.errors import DapkitError, InputFileError, UsageError
from src.core.router import CommandResult, CommandRouter
from src.core.utils import build_manifest, render_csv, render_json, round_significant
from src.routes import defects, dipole, reproduce, response, shells, spectra, zpl

logger = logging.getLogger("dapkit")

LOG_LEVELS = ["DEBUG", "INFO", "WARNING", "ERROR"]

# Include routers
app = CommandRouter()
for module in (shells, zpl, spectra, dipole, response, defects, reproduce):
    app.include_router(module.router)


class CliParser(argparse.ArgumentParser):
    """ArgumentParser that raises UsageError instead of exiting"""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _global_options(inherited: bool) -> argparse.ArgumentParser:
    # subcommand copies use SUPPRESS so they never clobber flags given first
    default = argparse.SUPPRESS if inherited else None
    options = argparse.ArgumentParser(add_help=False)
    options.add_argument("--config", default=default, help="Materials database (env DAPKIT_CONFIG)")
    options.add_argument("--out", default=default, help="Write output here instead of stdout")
    options.add_argument("--format", default=default, choices=["csv", "json"], help="Output format")
    options.add_argument("--threads", default=default, type=int, help="Worker threads")
    options.add_argument("--log-level", default=default, choices=LOG_LEVELS, help="Log level")
    return options


def build_parser() -> argparse.ArgumentParser:
    parser = CliParser(
        prog="dapkit",
        description="Donor-acceptor pair modeling toolkit",
        parents=[_global_options(inherited=False)],
    )
    app.add_subparsers(parser, parents=[_global_options(inherited=True)])
    return parser


def _field_rows(result: Any) -> List[Sequence[Any]]:
    """Two-column rows for a JSON result rendered as CSV"""
    flat = round_significant(result)
    if not isinstance(flat, dict):
        return [("result", json.dumps(flat, sort_keys=True))]
    return [
        (key, json.dumps(value, sort_keys=True) if isinstance(value, (dict, list)) else value)
        for key, value in flat.items()
    ]


def emit(
    subcommand: str,
    request: BaseModel,
    result: CommandResult,
    fmt: Optional[str],
    out: Optional[str],
    digests: Dict[str, str],
) -> None:
    """Render the result and write it to stdout or --out (with its manifest)"""
    fmt = fmt or ("csv" if result.is_table else "json")
    manifest = None
    if out is not None:
        parameters = {
            **request.model_dump(mode="json"),
            "config": settings.CONFIG,
            "threads": settings.THREADS,
            "format": fmt,
        }
        manifest = build_manifest(subcommand, parameters, digests)

    if fmt == "csv":
        if result.is_table:
            text = render_csv(result.schema_name, result.header, result.rows)
        else:
            text = render_csv(result.schema_name, ["field", "value"], _field_rows(result.result))
    else:
        payload = result.result
        if payload is None:
            payload = {"columns": result.header, "rows": result.rows}
        text = render_json(result.schema_name, payload, manifest)

    if out is None:
        sys.stdout.write(text)
        return
    try:
        Path(out).write_text(text, encoding="utf-8")
        if fmt == "csv":
            Path(f"{out}.manifest.json").write_text(
                json.dumps(manifest.model_dump(mode="json"), indent=2, sort_keys=True) + "\n",
                encoding="utf-8",
            )
    except OSError as e:
        raise InputFileError(f"cannot write {out}: {e.strerror or e}")
    logger.info(f"Wrote {out}")


def dispatch(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run one subcommand.

    Args:
        argv: Arguments without the program name (default sys.argv[1:])

    Returns:
        Exit status: 0 on success, the error's exit code otherwise
    """
    saved = {key: getattr(settings, key) for key in ("CONFIG", "THREADS", "LOG_LEVEL")}
    try:
        parser = build_parser()
        args = parser.parse_args(argv)
        if args.subcommand is None:
            parser.print_usage(sys.stderr)
            raise UsageError("missing subcommand")
        if args.threads is not None and args.threads < 1:
            raise UsageError(f"--threads must be >= 1, got {args.threads}")

        # flag > env > .env > default
        if args.config is not None:
            settings.CONFIG = args.config
        if args.threads is not None:
            settings.THREADS = args.threads
        if args.log_level is not None:
            settings.LOG_LEVEL = args.log_level
        logging.getLogger().setLevel(settings.LOG_LEVEL)

        loader = reset_data_loader()
        request = app.build_request(args.subcommand, args)
        logger.info(f"{args.subcommand}: database {settings.CONFIG}, {settings.THREADS} thread(s)")
        result = app.commands[args.subcommand].handler(request)
        emit(args.subcommand, request, result, args.format, args.out, loader.digests)
        return 0
    except DapkitError as e:
        sys.stderr.write(e.diagnostic() + "\n")
        return e.exit_code
    except Exception as e:
        logger.debug("Unexpected failure", exc_info=True)
        sys.stderr.write(DapkitError(f"{type(e).__name__}: {e}").diagnostic() + "\n")
        return 1
    finally:
        for key, value in saved.items():
            setattr(settings, key, value)


def main() -> None:
    logging.basicConfig(
        level=settings.LOG_LEVEL,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
