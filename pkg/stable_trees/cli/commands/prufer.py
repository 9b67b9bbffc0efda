from __future__ import annotations

import click

from stable_trees.discrete_trees import (
    Codeword,
    RootedLabelledTree,
    prufer_decode,
    prufer_encode,
)
from stable_trees.cli.common import reports_errors


def _read_integers(stream: click.utils.LazyFile | object) -> list[int]:
    text = stream.read()  # type: ignore[attr-defined]
    try:
        return [int(token) for token in text.split()]
    except ValueError as exc:
        raise click.UsageError("input must be whitespace-separated integers.") from exc


def format_parent_list(tree: RootedLabelledTree) -> str:
    """'root 1; 2←1; 3←1' with children listed in label order."""

    edges = [
        f"{label}←{parent}"
        for label, parent in enumerate(tree.parents, start=1)
        if parent
    ]
    return "; ".join([f"root {tree.root}", *edges])


@click.group("prufer")
def prufer_group() -> None:
    """Reverse Prufer codec between codewords and rooted labelled trees."""


@prufer_group.command("decode")
@click.argument("source", type=click.File("r"), default="-")
@click.option("--parents", "as_parents", is_flag=True, help="Print p_1 .. p_n instead.")
@reports_errors
def decode_command(source, as_parents: bool) -> None:
    """Read w_1 .. w_{n-1} and print the decoded tree."""

    entries = _read_integers(source)
    if not entries:
        raise click.UsageError("a codeword needs at least one entry.")
    tree = prufer_decode(Codeword(tuple(entries)))
    if as_parents:
        click.echo(" ".join(str(parent) for parent in tree.parents))
    else:
        click.echo(format_parent_list(tree))


@prufer_group.command("encode")
@click.argument("source", type=click.File("r"), default="-")
@reports_errors
def encode_command(source) -> None:
    """Read parents p_1 .. p_n (0 marks the root) and print the codeword."""

    parents = _read_integers(source)
    roots = [label for label, parent in enumerate(parents, start=1) if parent == 0]
    if len(roots) != 1:
        raise click.UsageError("exactly one parent entry must be 0 (the root).")
    tree = RootedLabelledTree(tuple(parents), roots[0])
    click.echo(" ".join(str(value) for value in prufer_encode(tree).entries))
