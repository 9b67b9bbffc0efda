import json

import pytest
from click.testing import CliRunner

from stable_trees import __version__
from stable_trees.cli.main import cli, parse_and_dispatch
from stable_trees.verify import SUITES, CaseResult


@pytest.fixture
def runner():
    return CliRunner(mix_stderr=False)


def test_version(runner):
    result = runner.invoke(cli, ["--version"])

    assert result.exit_code == 0
    assert __version__ in result.output


def test_density_table_has_one_row_per_grid_point(runner):
    result = runner.invoke(cli, ["density", "--alpha", "1.5"])

    assert result.exit_code == 0
    lines = result.stdout.splitlines()
    header = [line for line in lines if line.startswith("# ")]
    assert "# alpha: 1.5" in header
    assert lines[len(header)] == "x,p,log_p"
    assert len(lines) - len(header) - 1 == 61
    assert "wrote 61 rows" in result.stderr


def test_density_writes_file(runner, tmp_path):
    out = tmp_path / "density.csv"

    result = runner.invoke(
        cli, ["density", "--from", "0", "--to", "1", "--step", "0.5", "--out", str(out)]
    )

    assert result.exit_code == 0
    assert result.stdout == ""
    assert out.read_text(encoding="utf-8").splitlines()[-1].startswith("1,")


@pytest.mark.parametrize(
    "args",
    [
        ["density", "--alpha", "2.5"],
        ["density", "--step", "0"],
        ["subordinator", "--stat", "variance"],
        ["subordinator", "--replicas", "1"],
        ["tree-discrete", "--n", "0"],
        ["verify"],
    ],
)
def test_invalid_arguments_exit_with_usage_error(runner, args):
    assert runner.invoke(cli, args).exit_code == 2


def test_prufer_decode(runner):
    result = runner.invoke(cli, ["prufer", "decode"], input="1 1\n")

    assert result.exit_code == 0
    assert result.stdout == "root 1; 2←1; 3←1\n"


def test_prufer_decode_parent_list_and_encode(runner):
    parents = runner.invoke(cli, ["prufer", "decode", "--parents"], input="1 1")
    encoded = runner.invoke(cli, ["prufer", "encode"], input=parents.stdout)

    assert parents.stdout == "0 1 1\n"
    assert encoded.stdout == "1 1\n"


def test_prufer_errors(runner):
    assert runner.invoke(cli, ["prufer", "decode"], input="a b").exit_code == 2
    assert runner.invoke(cli, ["prufer", "decode"], input="").exit_code == 2
    assert runner.invoke(cli, ["prufer", "encode"], input="1 1 1").exit_code == 2
    # entry outside [1, n] is a library error, not a usage error
    assert runner.invoke(cli, ["prufer", "decode"], input="5").exit_code == 1


def test_tree_discrete_is_deterministic(runner):
    args = ["tree-discrete", "--offspring", "uniform012", "--n", "25", "--seed", "3"]

    first = runner.invoke(cli, args)
    second = runner.invoke(cli, args)

    assert first.exit_code == 0
    assert first.stdout == second.stdout
    payload = json.loads(first.stdout)
    assert payload["n"] == 25
    assert payload["parent"].count(0) == 1
    assert payload["root"] == 1
    assert payload["offspring"] == "uniform012"
    assert payload["seed"] == 3


def test_tree_discrete_reports_creation_step_as_attach_time(runner):
    args = ["tree-discrete", "--alpha", "1.3", "--n", "400", "--seed", "11"]

    payload = json.loads(runner.invoke(cli, args).stdout)

    events = payload["events"]
    assert events["C"]
    assert len(events["J"]) == len(events["J_revealed"]) == len(events["C"])
    for c, j, revealed in zip(events["C"], events["J"], events["J_revealed"]):
        # the vertex created at step c hangs off the owner created at step j
        assert payload["parent"][c] - 1 == j
        assert j < revealed < c


def test_tree_crt_payload(runner):
    args = ["tree-crt", "--k", "2", "--replicas", "5", "--seed", "1"]

    result = runner.invoke(cli, args)

    payload = json.loads(result.stdout)
    assert result.exit_code == 0
    assert payload["alpha"] == 2.0
    assert payload["intensity"] == "crt"
    assert len(payload["trees"]) == 5
    assert all(tree["weight"] == 1.0 for tree in payload["trees"])


def test_tree_continuous_warns_when_the_horizon_truncates(runner):
    base = ["tree-continuous", "--k", "2", "--replicas", "20", "--eps", "0.01"]

    short = runner.invoke(cli, base + ["--horizon", "0.01", "--seed", "5"])
    default = runner.invoke(cli, base + ["--seed", "5"])

    assert short.exit_code == 0
    assert "warning: only" in short.stderr
    assert "/20 trees finished" in short.stderr
    assert "before horizon 0.01" in short.stderr
    assert default.exit_code == 0
    assert "warning" not in default.stderr
    assert len(json.loads(default.stdout)["trees"]) == 20


def test_tree_icrt_reads_theta_file(runner, tmp_path):
    theta = tmp_path / "theta.json"
    theta.write_text(json.dumps({"theta0": 0.5, "thetas": [0.6, 0.3]}))

    result = runner.invoke(
        cli, ["tree-icrt", "--theta", str(theta), "--replicas", "4", "--seed", "2"]
    )

    payload = json.loads(result.stdout)
    assert result.exit_code == 0
    assert payload["alpha"] is None
    assert payload["thetas"] == [0.6, 0.3]
    assert len(payload["trees"]) == 4


def test_tree_icrt_rejects_increasing_thetas(runner, tmp_path):
    theta = tmp_path / "theta.txt"
    theta.write_text("0.5 0.2 0.4\n")

    result = runner.invoke(cli, ["tree-icrt", "--theta", str(theta)])

    assert result.exit_code == 2


def test_subordinator_martingale_row(runner):
    result = runner.invoke(
        cli,
        [
            "subordinator",
            "--t",
            "0.2",
            "--eps",
            "0.01",
            "--replicas",
            "50",
            "--seed",
            "4",
            "--stat",
            "martingale",
        ],
    )

    assert result.exit_code == 0
    lines = [line for line in result.stdout.splitlines() if not line.startswith("#")]
    assert lines[0] == "stat,t,estimate,stderr,oracle,relation,replicas"
    assert lines[1].startswith("martingale,0.2,")
    assert lines[1].endswith(",1,eq,50")


def test_verify_writes_json_and_markdown(runner, tmp_path):
    json_path = tmp_path / "verify.json"
    markdown_path = tmp_path / "verify.md"

    result = runner.invoke(
        cli,
        [
            "verify",
            "--suite",
            "prufer-exhaustive",
            "--quick",
            "--seed",
            "7",
            "--json",
            str(json_path),
            "--markdown",
            str(markdown_path),
        ],
    )

    assert result.exit_code == 0
    assert result.stdout.startswith("prufer-exhaustive: PASS")
    payload = json.loads(json_path.read_text(encoding="utf-8"))
    assert payload["profile"] == "quick"
    assert payload["suites"][0]["suite"] == "prufer-exhaustive"
    assert "## prufer-exhaustive" in markdown_path.read_text(encoding="utf-8")


def _failing_suite(config, rng, report):
    report.add(CaseResult("always off by one", "none", 1.0, 0.0, 0.0, kind="abs"))


def test_failed_suite_exit_status(runner, monkeypatch):
    monkeypatch.setitem(SUITES, "polya-urn", _failing_suite)

    result = runner.invoke(cli, ["verify", "--suite", "polya-urn", "--quick"])

    assert result.exit_code == 3
    assert "FAIL (0/1 cases)" in result.stdout


def test_parse_and_dispatch_exit_codes(monkeypatch):
    monkeypatch.setitem(SUITES, "polya-urn", _failing_suite)

    assert parse_and_dispatch(["density", "--alpha", "3"]) == 2
    assert parse_and_dispatch(["verify", "--suite", "polya-urn", "--quick"]) == 3
    assert parse_and_dispatch(["density", "--from", "0", "--to", "0"]) == 0
