from __future__ import annotations

import json
from functools import partial
from pathlib import Path
from typing import Any

import click
import numpy as np

from stable_trees import discrete_trees as dt
from stable_trees.cli.common import (
    alpha_option,
    emit,
    out_option,
    reports_errors,
    resolve_seed,
    seed_option,
    validated,
)
from stable_trees.linebreak import (
    WeightedTreeEnsemble,
    crt_intensity,
    icrt_intensity,
    sample_stable_tree_ensemble,
    sample_tree_ensemble,
)
from stable_trees.models.schemas import IcrtParameters, RunConfig
from stable_trees.serialization import dumps_json, provenance
from stable_trees.stable_density import get_model

k_option = click.option("--k", type=int, default=3, show_default=True)
replicas_option = click.option("--replicas", type=int, default=100, show_default=True)


def _ensemble_payload(
    ensemble: WeightedTreeEnsemble, config: RunConfig, **extra: Any
) -> dict[str, Any]:
    payload = ensemble.to_dict()
    payload.update(provenance(config.alpha, config.seed, **extra))
    return payload


COMPLETE_FRACTION = 0.999


def _summarise(name: str, ensemble: WeightedTreeEnsemble) -> None:
    complete = int(ensemble.complete.sum())
    click.echo(
        f"{name}: {len(ensemble)} trees, {complete} complete, "
        f"mean weight {ensemble.weights.mean():.4f}",
        err=True,
    )
    if complete < COMPLETE_FRACTION * len(ensemble):
        horizon = ensemble.provenance.get("horizon")
        where = f" before horizon {horizon}" if horizon is not None else ""
        click.echo(
            f"warning: only {complete}/{len(ensemble)} trees finished their "
            f"segments{where}; weighted estimates miss the rest",
            err=True,
        )


@click.command("tree-continuous")
@alpha_option
@k_option
@click.option(
    "--horizon",
    type=float,
    default=20.0,
    show_default=True,
    help="Path horizon T; a warning is printed when under 99.9% of trees complete.",
)
@click.option("--eps", type=float, default=1e-3, show_default=True)
@replicas_option
@seed_option
@out_option
@reports_errors
def tree_continuous_command(
    alpha: float,
    k: int,
    horizon: float,
    eps: float,
    replicas: int,
    seed: int | None,
    out: Path | None,
) -> None:
    """Weighted stable line-breaking trees with k segments."""

    config = validated(
        RunConfig,
        alpha=alpha,
        k=k,
        horizon=horizon,
        epsilon=eps,
        replicas=replicas,
        seed=resolve_seed(seed),
    )
    ensemble = sample_stable_tree_ensemble(
        get_model(config.alpha),
        config.k,
        config.horizon,
        config.replicas,
        config.seed,
        epsilon=config.epsilon,
    )
    emit(dumps_json(_ensemble_payload(ensemble, config)), out)
    _summarise("tree-continuous", ensemble)


@click.command("tree-crt")
@k_option
@replicas_option
@seed_option
@out_option
@reports_errors
def tree_crt_command(k: int, replicas: int, seed: int | None, out: Path | None) -> None:
    """Brownian CRT by line-breaking (tau_t = t)."""

    config = validated(RunConfig, k=k, replicas=replicas, seed=resolve_seed(seed))
    ensemble = sample_tree_ensemble(
        crt_intensity, config.k, config.replicas, config.seed
    )
    payload = _ensemble_payload(ensemble, config, intensity="crt")
    payload["alpha"] = 2.0
    emit(dumps_json(payload), out)
    _summarise("tree-crt", ensemble)


def load_icrt_parameters(path: Path) -> IcrtParameters:
    """JSON {"theta0": ..., "thetas": [...]} or whitespace numbers theta0 theta1 ..."""

    text = path.read_text(encoding="utf-8")
    if path.suffix == ".json":
        return validated(IcrtParameters, **json.loads(text))
    try:
        numbers = [float(token) for token in text.split()]
    except ValueError as exc:
        raise click.UsageError(f"{path} must contain numbers only.") from exc
    if not numbers:
        raise click.UsageError(f"{path} is empty.")
    return validated(IcrtParameters, theta0=numbers[0], thetas=numbers[1:])


@click.command("tree-icrt")
@click.option(
    "--theta",
    "theta_file",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    required=True,
    help="theta0 followed by theta_1 >= theta_2 >= ...",
)
@k_option
@replicas_option
@seed_option
@out_option
@reports_errors
def tree_icrt_command(
    theta_file: Path, k: int, replicas: int, seed: int | None, out: Path | None
) -> None:
    """Inhomogeneous CRT by line-breaking."""

    parameters = load_icrt_parameters(theta_file)
    config = validated(RunConfig, k=k, replicas=replicas, seed=resolve_seed(seed))
    factory = partial(icrt_intensity, parameters.theta0, tuple(parameters.thetas))
    ensemble = sample_tree_ensemble(factory, config.k, config.replicas, config.seed)
    payload = _ensemble_payload(
        ensemble,
        config,
        intensity="icrt",
        theta0=parameters.theta0,
        thetas=parameters.thetas,
    )
    payload["alpha"] = None
    emit(dumps_json(payload), out)
    _summarise("tree-icrt", ensemble)


def discrete_payload(
    tree: dt.RootedLabelledTree,
    trace: dt.GrowthTrace,
    stats_k: int,
) -> dict[str, Any]:
    statistics = dt.tree_statistics(tree, trace, stats_k)
    return {
        "n": tree.n,
        "parent": list(tree.parents),
        "root": tree.root,
        "height": statistics.height,
        "events": {
            "C": trace.branch_steps.tolist(),
            "J": trace.attach_steps.tolist(),
            "J_revealed": trace.attach_revealed.tolist(),
            "activations": trace.activations,
        },
        "degrees_topk": statistics.top_degrees.tolist(),
        "components": np.sort(statistics.components)[::-1].tolist(),
    }


@click.command("tree-discrete")
@alpha_option
@click.option("--n", "n", type=int, default=1_000, show_default=True)
@seed_option
@click.option("--stats", "stats_k", type=int, default=3, show_default=True)
@click.option(
    "--offspring",
    type=click.Choice(["stable", "uniform012"]),
    default="stable",
    show_default=True,
)
@out_option
@reports_errors
def tree_discrete_command(
    alpha: float,
    n: int,
    seed: int | None,
    stats_k: int,
    offspring: str,
    out: Path | None,
) -> None:
    """Conditioned Bienayme tree from the half-edge growth algorithm."""

    config = validated(RunConfig, alpha=alpha, n=n, k=stats_k, seed=resolve_seed(seed))
    law = dt.offspring_by_name(offspring, config.alpha)
    rng = np.random.default_rng(config.seed)
    tree, trace, _ = dt.sample_growth_tree(law, config.n, rng)
    payload = discrete_payload(tree, trace, config.k)
    payload.update(provenance(law.alpha, config.seed, offspring=law.name))
    emit(dumps_json(payload), out)
    click.echo(
        f"tree-discrete: n={tree.n}, height {payload['height']}, "
        f"{len(payload['events']['C'])} branchings, "
        f"{payload['events']['activations']} activations",
        err=True,
    )
