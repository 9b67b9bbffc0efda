"""Options and error translation shared by the subcommands."""

from __future__ import annotations

import functools
from pathlib import Path
from typing import Any, Callable, TypeVar

import click
from pydantic import BaseModel, ValidationError

from stable_trees.config import get_seed
from stable_trees.errors import StableTreesError

ModelT = TypeVar("ModelT", bound=BaseModel)

alpha_option = click.option(
    "--alpha",
    type=float,
    default=1.5,
    show_default=True,
    help="Stable index in (1, 2).",
)
seed_option = click.option(
    "--seed",
    type=int,
    default=None,
    help="Global seed; defaults to STL_SEED or the built-in seed.",
)
out_option = click.option(
    "--out",
    "out",
    type=click.Path(dir_okay=False, path_type=Path),
    default=None,
    help="Output file; standard output when omitted.",
)


def resolve_seed(seed: int | None) -> int:
    return get_seed() if seed is None else seed


def validated(model: type[ModelT], **values: Any) -> ModelT:
    """Build a pydantic model, reporting invalid values as usage errors."""

    try:
        return model(**values)
    except ValidationError as exc:
        messages = "; ".join(error["msg"] for error in exc.errors())
        raise click.UsageError(messages) from exc
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc


F = TypeVar("F", bound=Callable[..., Any])


def reports_errors(command: F) -> F:
    """Turn library failures into ClickException (exit status 1)."""

    @functools.wraps(command)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return command(*args, **kwargs)
        except StableTreesError as exc:
            raise click.ClickException(str(exc)) from exc

    return wrapper  # type: ignore[return-value]


def emit(text: str, out: Path | None) -> None:
    """Write text to ``out`` or echo it."""

    if out is None:
        click.echo(text, nl=False)
        return
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", encoding="utf-8", newline="\n") as handle:
        handle.write(text)
