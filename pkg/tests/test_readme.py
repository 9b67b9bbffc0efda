from pathlib import Path

from stable_trees.verify import suite_names

README_PATH = Path(__file__).resolve().parents[1] / "README.md"
README_TEXT = README_PATH.read_text(encoding="utf-8")


def test_readme_exists_at_repo_root():
    assert README_PATH.exists()


def test_readme_has_getting_started_section():
    assert "## Getting Started" in README_TEXT


def test_readme_includes_setup_instructions():
    expected_snippets = [
        "git clone",
        "python3 -m venv",
        "pip install -r requirements.txt",
    ]
    for snippet in expected_snippets:
        assert snippet in README_TEXT


def test_readme_mentions_virtual_environment_commands():
    expected_entries = [
        "source .venv/bin/activate",
        "deactivate",
    ]
    for entry in expected_entries:
        assert entry in README_TEXT


def test_readme_lists_test_lint_format_commands():
    commands = ["python -m pytest", "black .", "ruff check ."]
    for command in commands:
        assert command in README_TEXT


def test_readme_has_daily_workflow_section():
    assert "## 💼 Daily Workflow" in README_TEXT


def test_readme_contains_installation_verification():
    assert "Verify installation by running the primary test suite" in README_TEXT


def test_readme_documents_every_command():
    for command in (
        "density",
        "subordinator",
        "tree-continuous",
        "tree-crt",
        "tree-icrt",
        "tree-discrete",
        "prufer decode",
        "prufer encode",
        "verify",
    ):
        assert f"python -m stable_trees {command}" in README_TEXT, command


def test_readme_lists_every_suite():
    missing = [name for name in suite_names() if f"`{name}`" not in README_TEXT]
    assert not missing, f"README is missing suites: {', '.join(missing)}"


def test_readme_contains_verification_run_instructions():
    required_snippets = [
        "Running the Verification Battery",
        "python -m scripts.run_verification",
        "reports/verification_report.md",
    ]
    for snippet in required_snippets:
        assert snippet in README_TEXT


def test_readme_documents_configuration_variables():
    for variable in ("STL_SEED", "STL_N_JOBS", "STL_CHUNK_SIZE", "STL_LOG_LEVEL"):
        assert variable in README_TEXT


def test_readme_contains_project_status_section():
    assert "## Project Status" in README_TEXT
