from __future__ import annotations

from pathlib import Path
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from stable_trees.config import DEFAULT_ALPHA, DEFAULT_EPSILON, DEFAULT_SEED

_MAX_SEED = 2**64 - 1


def _validate_numeric_range(
    value: float | int, *, field_name: str, minimum: float | int, maximum: float | int
) -> float | int:
    if minimum <= value <= maximum:
        return value
    raise ValueError(f"{field_name} must be between {minimum} and {maximum}.")


class RunConfig(BaseModel):
    """Parameters shared by every subcommand."""

    model_config = ConfigDict(extra="forbid")

    alpha: float = DEFAULT_ALPHA
    seed: int = DEFAULT_SEED
    replicas: int = Field(default=10_000)
    horizon: float = Field(default=10.0)
    epsilon: float = Field(default=DEFAULT_EPSILON)
    n: int = Field(default=1_000)
    k: int = Field(default=3)
    output: Path | None = None
    output_format: Literal["csv", "json"] = "csv"

    @field_validator("alpha")
    @classmethod
    def validate_alpha(cls, value: float) -> float:
        if 1.0 < value < 2.0:
            return value
        raise ValueError("alpha must be between 1 and 2 (exclusive).")

    @field_validator("seed")
    @classmethod
    def validate_seed(cls, value: int) -> int:
        return int(
            _validate_numeric_range(
                value, field_name="seed", minimum=0, maximum=_MAX_SEED
            )
        )

    @field_validator("replicas")
    @classmethod
    def validate_replicas(cls, value: int) -> int:
        return int(
            _validate_numeric_range(
                value, field_name="replicas", minimum=1, maximum=100_000_000
            )
        )

    @field_validator("epsilon")
    @classmethod
    def validate_epsilon(cls, value: float) -> float:
        if 0 < value < 1:
            return value
        raise ValueError("epsilon must be between 0 and 1 (exclusive).")

    @field_validator("horizon")
    @classmethod
    def validate_horizon(cls, value: float) -> float:
        if value > 0:
            return value
        raise ValueError("horizon must be positive.")

    @field_validator("n")
    @classmethod
    def validate_n(cls, value: int) -> int:
        return int(
            _validate_numeric_range(value, field_name="n", minimum=1, maximum=1_000_000)
        )

    @field_validator("k")
    @classmethod
    def validate_k(cls, value: int) -> int:
        return int(
            _validate_numeric_range(value, field_name="k", minimum=1, maximum=10_000)
        )

    def provenance(self) -> dict[str, object]:
        from stable_trees import __version__

        return {"alpha": self.alpha, "seed": self.seed, "version": __version__}


class DensityGrid(BaseModel):
    model_config = ConfigDict(extra="forbid")

    start: float
    stop: float
    step: float

    @field_validator("step")
    @classmethod
    def validate_step(cls, value: float) -> float:
        if value > 0:
            return value
        raise ValueError("step must be positive.")

    @model_validator(mode="after")
    def validate_bounds(self) -> DensityGrid:
        if self.stop < self.start:
            raise ValueError("the grid end must not precede its start.")
        if (self.stop - self.start) / self.step > 10_000_000:
            raise ValueError("the grid must have at most 10^7 points.")
        return self

    @property
    def points(self) -> int:
        return int(round((self.stop - self.start) / self.step)) + 1


class SubordinatorStat(BaseModel):
    """``mean``, ``qvar``, ``martingale`` or ``laplace:<lam>``."""

    model_config = ConfigDict(extra="forbid")

    kind: Literal["mean", "qvar", "martingale", "laplace"]
    lam: float | None = None

    @classmethod
    def parse(cls, text: str) -> SubordinatorStat:
        name, _, argument = text.partition(":")
        if name == "laplace":
            if not argument:
                raise ValueError("laplace needs a value, as in laplace:0.5.")
            return cls(kind="laplace", lam=float(argument))
        if argument:
            raise ValueError(f"statistic {name!r} takes no argument.")
        return cls(kind=name)

    @field_validator("lam")
    @classmethod
    def validate_lam(cls, value: float | None) -> float | None:
        if value is None or value >= 0:
            return value
        raise ValueError("lam must be non-negative.")


class IcrtParameters(BaseModel):
    """theta_0 and the nonincreasing sequence theta_1 >= theta_2 >= ... > 0."""

    model_config = ConfigDict(extra="forbid")

    theta0: float = 1.0
    thetas: list[float] = Field(default_factory=list)

    @field_validator("theta0")
    @classmethod
    def validate_theta0(cls, value: float) -> float:
        if value >= 0:
            return value
        raise ValueError("theta0 must be non-negative.")

    @field_validator("thetas")
    @classmethod
    def validate_thetas(cls, value: list[float]) -> list[float]:
        if any(theta <= 0 for theta in value):
            raise ValueError("every theta_i must be positive.")
        if any(later > earlier for earlier, later in zip(value, value[1:])):
            raise ValueError("thetas must be nonincreasing.")
        return value

    @model_validator(mode="after")
    def validate_not_degenerate(self) -> IcrtParameters:
        if self.theta0 == 0 and not self.thetas:
            raise ValueError("theta0 and thetas cannot both vanish.")
        return self
