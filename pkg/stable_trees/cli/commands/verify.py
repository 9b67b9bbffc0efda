from __future__ import annotations

from pathlib import Path

import click

from stable_trees.cli.common import (
    alpha_option,
    reports_errors,
    resolve_seed,
    seed_option,
    validated,
)
from stable_trees.models.schemas import RunConfig
from stable_trees.serialization import provenance, write_json
from stable_trees.verify import (
    SuiteConfig,
    run_suite,
    suite_names,
    write_markdown_report,
)

FAILED_EXIT_CODE = 3


@click.command("verify")
@click.option(
    "--suite",
    "suites",
    multiple=True,
    type=click.Choice(suite_names()),
    help="Suite to run; may be repeated.",
)
@click.option("--all", "run_everything", is_flag=True, help="Run every suite.")
@alpha_option
@seed_option
@click.option("--quick", is_flag=True, help="Reduced replica counts.")
@click.option("--n-jobs", type=int, default=None, help="Workers for replica chunks.")
@click.option("--json", "json_path", type=click.Path(path_type=Path), default=None)
@click.option("--markdown", "markdown_path", type=click.Path(path_type=Path))
@click.pass_context
@reports_errors
def verify_command(
    ctx: click.Context,
    suites: tuple[str, ...],
    run_everything: bool,
    alpha: float,
    seed: int | None,
    quick: bool,
    n_jobs: int | None,
    json_path: Path | None,
    markdown_path: Path | None,
) -> None:
    """Run verification suites; exit status 3 when any case fails."""

    if not suites and not run_everything:
        raise click.UsageError("pass --suite NAME or --all.")
    config = validated(RunConfig, alpha=alpha, seed=resolve_seed(seed))
    names = suite_names() if run_everything else list(dict.fromkeys(suites))
    suite_config = SuiteConfig(
        alpha=config.alpha,
        seed=config.seed,
        profile="quick" if quick else "full",
        n_jobs=n_jobs,
    )
    reports = []
    for name in names:
        report = run_suite(name, suite_config)
        click.echo(report.summary_line())
        reports.append(report)
    if json_path is not None:
        payload = provenance(config.alpha, config.seed, profile=suite_config.profile)
        payload["suites"] = [report.to_dict() for report in reports]
        write_json(payload, json_path)
    if markdown_path is not None:
        write_markdown_report(reports, markdown_path)
    if not all(report.passed for report in reports):
        ctx.exit(FAILED_EXIT_CODE)
