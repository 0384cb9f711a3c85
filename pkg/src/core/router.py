"""
Subcommand registry for the dapkit CLI

Handlers register with `@router.command(...)` against a pydantic request
model; the router turns the model's fields into argparse options
(`field_name` -> `--field-name`) and validates parsed arguments back into
the model before calling the handler.
"""
import argparse
import typing
from typing import Any, Callable, Dict, List, Literal, Optional, Sequence, Type

from pydantic import BaseModel, ConfigDict, ValidationError

from src.core.errors import UsageError


class CommandResult(BaseModel):
    """What a handler returns: a JSON result, CSV rows, or both"""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    schema_name: str
    result: Any = None
    header: Optional[List[str]] = None
    rows: Optional[List[Sequence[Any]]] = None

    @property
    def is_table(self) -> bool:
        return self.rows is not None


class Command(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    name: str
    handler: Callable[..., CommandResult]
    request_model: Type[BaseModel]
    help: str = ""
    tags: List[str] = []


def _unwrap_optional(annotation: Any) -> Any:
    if typing.get_origin(annotation) is typing.Union:
        args = [a for a in typing.get_args(annotation) if a is not type(None)]
        if len(args) == 1:
            return args[0]
    return annotation


def _add_field(parser: argparse.ArgumentParser, name: str, field) -> None:
    annotation = _unwrap_optional(field.annotation)
    extra = field.json_schema_extra or {}
    kwargs: Dict[str, Any] = {"help": field.description or "", "dest": name}
    origin = typing.get_origin(annotation)

    if annotation is bool:
        parser.add_argument(f"--{name.replace('_', '-')}", action="store_true", **kwargs)
        return
    if origin is Literal:
        kwargs["choices"] = list(typing.get_args(annotation))
    elif origin is tuple:
        args = typing.get_args(annotation)
        kwargs["nargs"] = len(args)
        kwargs["type"] = args[0]
        kwargs["metavar"] = tuple("xyz"[: len(args)]) if len(args) == 3 else None
    elif annotation in (int, float, str):
        kwargs["type"] = annotation

    if extra.get("positional"):
        kwargs.pop("dest")
        parser.add_argument(name, **kwargs)
        return
    kwargs["required"] = field.is_required()
    kwargs["default"] = argparse.SUPPRESS
    parser.add_argument(f"--{name.replace('_', '-')}", **kwargs)


class CommandRouter:
    """Groups related subcommands, the CLI counterpart of an API router"""

    def __init__(self, tags: Optional[List[str]] = None):
        self.tags = tags or []
        self.commands: Dict[str, Command] = {}

    def command(self, name: str, request_model: Type[BaseModel], help: str = ""):
        """Register the decorated function as subcommand `name`"""

        def decorator(func: Callable[..., CommandResult]):
            self.commands[name] = Command(
                name=name, handler=func, request_model=request_model,
                help=help or (func.__doc__ or "").strip().splitlines()[0], tags=self.tags,
            )
            return func

        return decorator

    def include_router(self, other: "CommandRouter") -> None:
        for name, command in other.commands.items():
            if name in self.commands:
                raise ValueError(f"subcommand '{name}' registered twice")
            self.commands[name] = command

    def add_subparsers(self, parser: argparse.ArgumentParser, parents: Sequence[argparse.ArgumentParser]) -> None:
        sub = parser.add_subparsers(dest="subcommand", metavar="<subcommand>")
        for name in sorted(self.commands):
            command = self.commands[name]
            cmd_parser = sub.add_parser(
                name, help=command.help, description=command.help, parents=list(parents)
            )
            for field_name, field in command.request_model.model_fields.items():
                _add_field(cmd_parser, field_name, field)

    def build_request(self, name: str, namespace: argparse.Namespace) -> BaseModel:
        """Validate parsed arguments into the command's request model"""
        command = self.commands[name]
        values = {
            k: (tuple(v) if isinstance(v, list) else v)
            for k, v in vars(namespace).items()
            if k in command.request_model.model_fields
        }
        try:
            return command.request_model(**values)
        except ValidationError as e:
            err = e.errors()[0]
            field = ".".join(str(p) for p in err["loc"])
            where = f" --{field.replace('_', '-')}" if field else ""
            raise UsageError(f"{name}{where}: {err['msg']}")
