"""Suite reports: JSON dictionaries, markdown documents and summary frames."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable

import numpy as np
import pandas as pd

PLUMBING = "plumbing"


@dataclass(frozen=True)
class CaseResult:
    """One checked identity: an estimate against an independent oracle value.

    ``tolerance`` is either a number of standard errors (``kind="se"``), an
    absolute tolerance (``kind="abs"``), a relative one (``kind="rel"``), a
    one-sided bound estimate <= oracle + tolerance * stderr (``kind="upper"``) or a
    test level for a distribution-free test (``kind="pvalue"``, where
    ``estimate`` is the p-value and ``oracle`` the level).
    """

    description: str
    anchor: str
    estimate: float
    oracle: float
    tolerance: float
    kind: str = "se"
    stderr: float = 0.0
    qualitative: bool = False

    @property
    def passed(self) -> bool:
        if not math.isfinite(self.estimate):
            return False
        if self.kind == "pvalue":
            return self.estimate >= self.oracle
        if self.kind == "upper":
            return self.estimate <= self.oracle + self.tolerance * self.stderr
        gap = abs(self.estimate - self.oracle)
        if self.kind == "se":
            return gap <= self.tolerance * self.stderr
        if self.kind == "rel":
            return gap <= self.tolerance * abs(self.oracle)
        return gap <= self.tolerance

    def to_dict(self) -> dict[str, Any]:
        return {
            "description": self.description,
            "anchor": self.anchor,
            "estimate": _finite_or_none(self.estimate),
            "oracle": _finite_or_none(self.oracle),
            "stderr": _finite_or_none(self.stderr),
            "tolerance": self.tolerance,
            "kind": self.kind,
            "qualitative": self.qualitative,
            "passed": self.passed,
        }


def _finite_or_none(value: float) -> float | None:
    value = float(value)
    return value if math.isfinite(value) else None


@dataclass
class SuiteReport:
    suite: str
    alpha: float
    seed: int
    profile: str
    cases: list[CaseResult] = field(default_factory=list)
    runtime: float = 0.0

    @property
    def passed(self) -> bool:
        return bool(self.cases) and all(case.passed for case in self.cases)

    @property
    def failures(self) -> list[CaseResult]:
        return [case for case in self.cases if not case.passed]

    def add(self, case: CaseResult) -> None:
        self.cases.append(case)

    def to_dict(self) -> dict[str, Any]:
        """JSON-ready form; the runtime is left out so bytes depend on the seed only."""

        return {
            "suite": self.suite,
            "alpha": self.alpha,
            "seed": self.seed,
            "profile": self.profile,
            "passed": self.passed,
            "cases": [case.to_dict() for case in self.cases],
        }

    def summary_line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        passed = len(self.cases) - len(self.failures)
        return f"{self.suite}: {status} ({passed}/{len(self.cases)} cases)"


def reports_frame(reports: Iterable[SuiteReport]) -> pd.DataFrame:
    """One row per case, for console tables and quick filtering."""

    rows = [
        {"suite": report.suite, "alpha": report.alpha, **case.to_dict()}
        for report in reports
        for case in report.cases
    ]
    columns = [
        "suite",
        "alpha",
        "description",
        "estimate",
        "oracle",
        "stderr",
        "passed",
    ]
    if not rows:
        return pd.DataFrame(columns=columns)
    return pd.DataFrame(rows)[columns + ["anchor", "kind", "qualitative"]]


def _render_value(value: Any) -> str:
    if value is None:
        return "n/a"
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.6g}"
    return str(value)


def _markdown_case_table(report: SuiteReport) -> str:
    if not report.cases:
        return "No cases recorded."
    header = "| case | estimate | oracle | stderr | tolerance | passed |"
    divider = "| --- | --- | --- | --- | --- | --- |"
    rows = []
    for case in report.cases:
        data = case.to_dict()
        label = case.description + (" (qualitative)" if case.qualitative else "")
        tolerance = f"{case.tolerance:g} {case.kind}"
        cells = [
            label,
            _render_value(data["estimate"]),
            _render_value(data["oracle"]),
            _render_value(data["stderr"]),
            tolerance,
            "yes" if case.passed else "**no**",
        ]
        rows.append("| " + " | ".join(cells) + " |")
    return "\n".join([header, divider, *rows])


def write_markdown_report(reports: Iterable[SuiteReport], path: str | Path) -> Path:
    """Write a "## <suite>" section with a case table for every report."""

    output_path = Path(path)
    output_path.parent.mkdir(parents=True, exist_ok=True)
    reports = list(reports)
    total_passed = sum(report.passed for report in reports)
    lines = [
        "# Verification Report",
        "",
        f"Suites passed: **{total_passed}/{len(reports)}**",
        "",
    ]
    for report in reports:
        lines.extend(
            [
                f"## {report.suite}",
                "",
                f"- alpha: {report.alpha}",
                f"- seed: {report.seed}",
                f"- profile: {report.profile}",
                f"- status: {'PASS' if report.passed else 'FAIL'}",
                "",
                _markdown_case_table(report),
                "",
            ]
        )
        anchors = sorted({case.anchor for case in report.cases})
        if anchors:
            lines.extend(["Anchors: " + "; ".join(anchors), ""])
    output_path.write_text("\n".join(lines), encoding="utf-8")
    return output_path
