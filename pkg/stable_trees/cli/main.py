"""Command-line entry point: ``python -m stable_trees <command> ...``."""

from __future__ import annotations

import logging
import sys
from typing import Sequence

import click

from stable_trees import __version__
from stable_trees.cli.commands.density import density_command
from stable_trees.cli.commands.prufer import prufer_group
from stable_trees.cli.commands.subordinator import subordinator_command
from stable_trees.cli.commands.trees import (
    tree_continuous_command,
    tree_crt_command,
    tree_discrete_command,
    tree_icrt_command,
)
from stable_trees.cli.commands.verify import verify_command
from stable_trees.config import configure_logging
from stable_trees.errors import StableTreesError


@click.group()
@click.version_option(__version__, prog_name="stable-trees")
@click.option("--verbose", is_flag=True, help="Log at DEBUG level.")
def cli(verbose: bool) -> None:
    """Stable trees, line-breaking constructions and conditioned Bienayme trees."""

    configure_logging(logging.DEBUG if verbose else None)


for command in (
    density_command,
    subordinator_command,
    tree_continuous_command,
    tree_crt_command,
    tree_icrt_command,
    tree_discrete_command,
    prufer_group,
    verify_command,
):
    cli.add_command(command)


def parse_and_dispatch(argv: Sequence[str] | None = None) -> int:
    """Run the command line; 2 on usage errors, 1 on failures, 3 on failed suites."""

    args = list(sys.argv[1:] if argv is None else argv)
    try:
        result = cli.main(args=args, prog_name="stable-trees", standalone_mode=False)
    except click.UsageError as exc:
        exc.show()
        return 2
    except click.ClickException as exc:
        exc.show()
        return exc.exit_code
    except click.Abort:
        click.echo("Aborted!", err=True)
        return 1
    except StableTreesError as exc:
        click.echo(f"Error: {exc}", err=True)
        return 1
    return result if isinstance(result, int) else 0


def main() -> int:
    return parse_and_dispatch()
