from __future__ import annotations

from pathlib import Path

import click
import numpy as np
import pandas as pd

from stable_trees.cli.common import (
    alpha_option,
    emit,
    out_option,
    reports_errors,
    validated,
)
from stable_trees.models.schemas import DensityGrid, RunConfig
from stable_trees.serialization import provenance, render_csv
from stable_trees.stable_density import get_model


def density_frame(alpha: float, grid: DensityGrid) -> pd.DataFrame:
    x = np.round(grid.start + grid.step * np.arange(grid.points), 12)
    model = get_model(alpha)
    log_p = np.asarray(model.log_density(x), dtype=float)
    return pd.DataFrame({"x": x, "p": np.exp(log_p), "log_p": log_p})


@click.command("density")
@alpha_option
@click.option("--from", "start", type=float, default=-3.0, show_default=True)
@click.option("--to", "stop", type=float, default=3.0, show_default=True)
@click.option("--step", type=float, default=0.1, show_default=True)
@out_option
@reports_errors
def density_command(
    alpha: float, start: float, stop: float, step: float, out: Path | None
) -> None:
    """Tabulate p and log p of the spectrally positive stable law on a grid."""

    config = validated(RunConfig, alpha=alpha)
    grid = validated(DensityGrid, start=start, stop=stop, step=step)
    frame = density_frame(config.alpha, grid)
    emit(render_csv(frame, provenance(config.alpha, None)), out)
    target = out if out is not None else "standard output"
    click.echo(f"density: wrote {len(frame)} rows to {target}", err=True)
