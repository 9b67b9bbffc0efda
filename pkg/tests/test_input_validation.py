from __future__ import annotations

import pytest
from pydantic import ValidationError

from stable_trees.models.schemas import (
    DensityGrid,
    IcrtParameters,
    RunConfig,
    SubordinatorStat,
)


def test_run_config_defaults():
    config = RunConfig()

    assert config.alpha == 1.5
    assert config.output_format == "csv"
    assert set(config.provenance()) == {"alpha", "seed", "version"}


@pytest.mark.parametrize("alpha", [1.0, 2.0, 0.5, 2.5])
def test_run_config_rejects_alpha_outside_open_interval(alpha):
    with pytest.raises(ValidationError, match="between 1 and 2"):
        RunConfig(alpha=alpha)


@pytest.mark.parametrize(
    ("field", "value", "message"),
    [
        ("seed", -1, "seed must be between"),
        ("seed", 2**64, "seed must be between"),
        ("replicas", 0, "replicas must be between"),
        ("epsilon", 1.0, "epsilon must be between"),
        ("horizon", 0.0, "horizon must be positive"),
        ("n", 0, "n must be between"),
        ("k", 0, "k must be between"),
    ],
)
def test_run_config_field_ranges(field, value, message):
    with pytest.raises(ValidationError, match=message):
        RunConfig(**{field: value})


def test_run_config_forbids_unknown_fields():
    with pytest.raises(ValidationError):
        RunConfig(temperature=1.0)


def test_density_grid_points():
    assert DensityGrid(start=-3.0, stop=3.0, step=0.1).points == 61
    assert DensityGrid(start=0.0, stop=0.0, step=1.0).points == 1


def test_density_grid_validation():
    with pytest.raises(ValidationError, match="step must be positive"):
        DensityGrid(start=0.0, stop=1.0, step=0.0)
    with pytest.raises(ValidationError, match="must not precede"):
        DensityGrid(start=1.0, stop=0.0, step=0.1)
    with pytest.raises(ValidationError, match="at most"):
        DensityGrid(start=0.0, stop=1.0, step=1e-8)


def test_subordinator_stat_parse():
    assert SubordinatorStat.parse("mean").kind == "mean"
    laplace = SubordinatorStat.parse("laplace:0.5")
    assert (laplace.kind, laplace.lam) == ("laplace", 0.5)


@pytest.mark.parametrize("text", ["laplace", "mean:1", "variance", "laplace:-1"])
def test_subordinator_stat_rejects_bad_text(text):
    with pytest.raises(ValueError):
        SubordinatorStat.parse(text)


def test_icrt_parameters():
    parameters = IcrtParameters(theta0=0.5, thetas=[0.6, 0.3, 0.3])

    assert parameters.thetas == [0.6, 0.3, 0.3]
    assert IcrtParameters(theta0=1.0).thetas == []


@pytest.mark.parametrize(
    ("values", "message"),
    [
        ({"theta0": -1.0}, "non-negative"),
        ({"thetas": [0.5, 0.0]}, "positive"),
        ({"thetas": [0.2, 0.4]}, "nonincreasing"),
        ({"theta0": 0.0}, "cannot both vanish"),
    ],
)
def test_icrt_parameter_validation(values, message):
    with pytest.raises(ValidationError, match=message):
        IcrtParameters(**values)
