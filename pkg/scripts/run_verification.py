"""Run every verification suite and write markdown and JSON reports."""

from __future__ import annotations

from pathlib import Path
import sys

import pandas as pd

if __package__ is None or __package__ == "":
    sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

from stable_trees.config import configure_logging, get_n_jobs, get_seed  # noqa: E402
from stable_trees.serialization import provenance, write_json  # noqa: E402
from stable_trees.verify import (  # noqa: E402
    SuiteConfig,
    SuiteReport,
    reports_frame,
    run_all,
    write_markdown_report,
)

REPORTS_DIR = Path("reports")
ALPHAS = (1.2, 1.5, 1.8)


def _format_table_for_console(frame: pd.DataFrame) -> str:
    summary = (
        frame.groupby(["suite", "alpha"], sort=False)["passed"]
        .agg(cases="size", passed="sum")
        .reset_index()
    )
    return summary.to_string(index=False)


def main(profile: str = "full", reports_dir: str | Path = REPORTS_DIR) -> int:
    """Run the battery at each alpha; 0 when every case passes, 3 otherwise."""

    configure_logging()
    reports_dir = Path(reports_dir)
    reports_dir.mkdir(parents=True, exist_ok=True)
    seed = get_seed()

    reports: list[SuiteReport] = []
    for alpha in ALPHAS:
        config = SuiteConfig(
            alpha=alpha, seed=seed, profile=profile, n_jobs=get_n_jobs()
        )
        reports.extend(run_all(config))

    print("Verification Summary")
    print(_format_table_for_console(reports_frame(reports)))
    failures = [report for report in reports if not report.passed]
    if failures:
        print()
        print("Failed Suites")
        for report in failures:
            print(f"- {report.summary_line()}")

    write_markdown_report(reports, reports_dir / "verification_report.md")
    payload = provenance(None, seed, profile=profile, alphas=list(ALPHAS))
    payload["suites"] = [report.to_dict() for report in reports]
    write_json(payload, reports_dir / "verification_report.json")
    return 3 if failures else 0


if __name__ == "__main__":
    raise SystemExit(main())
