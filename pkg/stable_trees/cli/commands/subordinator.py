from __future__ import annotations

from functools import partial
from pathlib import Path

import click
import pandas as pd

from stable_trees.cli.common import (
    alpha_option,
    emit,
    out_option,
    reports_errors,
    resolve_seed,
    seed_option,
    validated,
)
from stable_trees.levy_paths import (
    constant_statistic,
    importance_estimate,
    laplace_statistic,
    quadratic_variation_bound,
    quadratic_variation_statistic,
    sigma_tilde_laplace,
    sigma_tilde_mean,
    value_statistic,
)
from stable_trees.models.schemas import RunConfig, SubordinatorStat
from stable_trees.serialization import provenance, render_csv
from stable_trees.stable_density import get_model


def subordinator_frame(config: RunConfig, stat: SubordinatorStat) -> pd.DataFrame:
    """One row: the weighted estimate of the statistic and its oracle value."""

    model = get_model(config.alpha)
    t = config.horizon
    if stat.kind == "mean":
        statistic, oracle, relation = value_statistic, sigma_tilde_mean(model, t), "eq"
    elif stat.kind == "laplace":
        statistic = partial(laplace_statistic, lam=stat.lam)
        oracle, relation = sigma_tilde_laplace(model, stat.lam, t), "eq"
    elif stat.kind == "qvar":
        statistic = quadratic_variation_statistic
        oracle, relation = quadratic_variation_bound(model), "le"
    else:
        statistic, oracle, relation = constant_statistic, 1.0, "eq"
    estimate = importance_estimate(
        statistic, model, t, config.replicas, config.seed, epsilon=config.epsilon
    )
    label = stat.kind if stat.lam is None else f"{stat.kind}:{stat.lam:g}"
    return pd.DataFrame(
        [
            {
                "stat": label,
                "t": t,
                "estimate": estimate.mean,
                "stderr": estimate.stderr,
                "oracle": oracle,
                "relation": relation,
                "replicas": estimate.replicas,
            }
        ]
    )


@click.command("subordinator")
@alpha_option
@click.option("--t", "t", type=float, default=1.0, show_default=True)
@click.option("--eps", type=float, default=1e-4, show_default=True)
@click.option("--replicas", type=int, default=10_000, show_default=True)
@seed_option
@click.option(
    "--stat",
    default="mean",
    show_default=True,
    help="mean | laplace:L | qvar | martingale",
)
@out_option
@reports_errors
def subordinator_command(
    alpha: float,
    t: float,
    eps: float,
    replicas: int,
    seed: int | None,
    stat: str,
    out: Path | None,
) -> None:
    """Importance-sampled statistics of the tilted subordinator at time t."""

    config = validated(
        RunConfig,
        alpha=alpha,
        horizon=t,
        epsilon=eps,
        replicas=max(replicas, 1),
        seed=resolve_seed(seed),
    )
    if replicas < 2:
        raise click.UsageError("replicas must be at least 2.")
    try:
        parsed = SubordinatorStat.parse(stat)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc
    frame = subordinator_frame(config, parsed)
    header = provenance(config.alpha, config.seed, epsilon=config.epsilon)
    emit(render_csv(frame, header), out)
    row = frame.iloc[0]
    click.echo(
        f"subordinator {row['stat']}: {row['estimate']:.6g} +- {row['stderr']:.3g} "
        f"(oracle {row['oracle']:.6g})",
        err=True,
    )
