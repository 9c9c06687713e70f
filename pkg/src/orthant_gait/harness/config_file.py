"""Run settings shared by the CLI commands, optionally read from a flat config file.

A config file holds one `key = value` per line; keys are CLI flag names (dashes or
underscores), `#` starts a comment. Flags given on the command line win.
"""

import math
from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator

from orthant_gait.env import DEFAULT_PHI, EnvConfig
from orthant_gait.errors import ConfigFileError
from orthant_gait.reward import REWARD_SETUPS, SetupName
from orthant_gait.rl import TrainConfig

DEFAULT_OUTPUT_DIRECTORY = Path("output")
DEFAULT_SEEDS = tuple(range(15))

ControllerName = Literal["virtual-gravity", "zero"]


def read_config_file(path: Path) -> dict[str, str]:
    values: dict[str, str] = {}
    for number, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or not key:
            raise ConfigFileError(f"{path}:{number}: expected 'key = value', got {raw!r}")
        if key in values:
            raise ConfigFileError(f"{path}:{number}: duplicate key '{key}'")
        values[key] = value.strip()
    return values


def split_list(value: Any) -> Any:
    if isinstance(value, str):
        return [item.strip() for item in value.split(",") if item.strip()]
    return value


class RunSettings(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    setup: SetupName = "for_plus_or"
    setups: tuple[SetupName, ...] = Field(tuple(REWARD_SETUPS), min_length=1)
    seed: int = 0
    seeds: tuple[int, ...] = Field(DEFAULT_SEEDS, min_length=1)
    steps: int = Field(500_000, ge=1)
    phi: float = DEFAULT_PHI
    dt: float = Field(0.01, gt=0)
    out: Path = DEFAULT_OUTPUT_DIRECTORY
    jobs: int = Field(1, ge=1)
    strict_orthant: bool = False
    shared_baseline: bool = False
    controller: ControllerName = "virtual-gravity"
    max_time: float | None = Field(None, ge=0)
    eval_every: int = Field(10, ge=1)

    @field_validator("setups", "seeds", mode="before")
    @classmethod
    def comma_separated(cls, value):
        return split_list(value)

    @field_validator("phi")
    @classmethod
    def finite_phi(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("phi must be finite")
        return value

    def env_config(self, setup: str | None = None) -> EnvConfig:
        return EnvConfig(
            dt_control=self.dt,
            reward_setup=setup or self.setup,
            strict_orthant_reward=self.strict_orthant,
        )

    def train_config(self, seed: int | None = None) -> TrainConfig:
        return TrainConfig(
            total_steps=self.steps,
            seed=self.seed if seed is None else seed,
            eval_every=self.eval_every,
        )


def load_settings(config: Path | None = None, **overrides: Any) -> RunSettings:
    """Merge config-file values with CLI flags; flags left as None do not override."""
    values: dict[str, Any] = read_config_file(config) if config else {}
    values.update({key: value for key, value in overrides.items() if value is not None})
    return RunSettings.model_validate(values)
