"""Verification suites, brute-force oracles and report writers."""

from stable_trees.verify.oracles import (
    UrnProcess,
    enumerate_conditioned_gw,
    polya_urn_simulate,
)
from stable_trees.verify.report import (
    CaseResult,
    SuiteReport,
    reports_frame,
    write_markdown_report,
)
from stable_trees.verify.suites import (
    SUITES,
    SuiteConfig,
    discrete_to_continuous_suite,
    run_all,
    run_suite,
    suite_names,
)

__all__ = [
    "SUITES",
    "CaseResult",
    "SuiteConfig",
    "SuiteReport",
    "UrnProcess",
    "discrete_to_continuous_suite",
    "enumerate_conditioned_gw",
    "polya_urn_simulate",
    "reports_frame",
    "run_all",
    "run_suite",
    "suite_names",
    "write_markdown_report",
]
