"""Policy checkpoints as a versioned JSON document. See docs/checkpoint-format.md."""

import logging
import math
from pathlib import Path
from typing import Literal

import torch
from pydantic import BaseModel, Field, ValidationError, field_validator

from orthant_gait.env import EnvConfig
from orthant_gait.errors import CheckpointError
from orthant_gait.rl.config import TrainConfig
from orthant_gait.rl.networks import ActorCritic
from orthant_gait.utils.files import atomic_write_text

logger = logging.getLogger("__main__." + __name__)

CHECKPOINT_FORMAT = "orthant-gait-checkpoint"
CHECKPOINT_VERSION = 1


class ParameterArray(BaseModel):
    shape: list[int]
    values: list[float] = Field(description="row-major flattened values")

    @field_validator("values")
    @classmethod
    def finite_values(cls, value: list[float]) -> list[float]:
        if not all(math.isfinite(x) for x in value):
            raise ValueError("parameter values must be finite")
        return value

    @classmethod
    def from_tensor(cls, tensor: torch.Tensor) -> "ParameterArray":
        return cls(
            shape=list(tensor.shape),
            values=tensor.detach().reshape(-1).tolist(),
        )

    def to_tensor(self) -> torch.Tensor:
        if math.prod(self.shape) != len(self.values):
            raise ValueError(
                f"{len(self.values)} values do not fill shape {self.shape}"
            )
        return torch.tensor(self.values, dtype=torch.float64).reshape(self.shape)


class CheckpointDocument(BaseModel):
    format: Literal["orthant-gait-checkpoint"] = CHECKPOINT_FORMAT
    version: int = CHECKPOINT_VERSION
    train_config: TrainConfig
    env_config: EnvConfig
    parameters: dict[str, ParameterArray]


def save_checkpoint(
    path: Path,
    policy: ActorCritic,
    train_config: TrainConfig,
    env_config: EnvConfig,
) -> None:
    document = CheckpointDocument(
        train_config=train_config,
        env_config=env_config,
        parameters={
            name: ParameterArray.from_tensor(tensor)
            for name, tensor in policy.state_dict().items()
        },
    )
    atomic_write_text(path, document.model_dump_json(indent=2))
    logger.info(f"Wrote checkpoint {path}")


def load_checkpoint(path: Path) -> tuple[ActorCritic, TrainConfig, EnvConfig]:
    """Rebuild the policy recorded in `path`.

    Raises CheckpointError when the file is unreadable, not a checkpoint, of another
    version, or its arrays do not fit the network described by its TrainConfig.
    """
    try:
        text = path.read_text()
    except OSError as e:
        raise CheckpointError(f"Cannot read checkpoint {path}: {e}") from e

    try:
        document = CheckpointDocument.model_validate_json(text)
    except ValidationError as e:
        raise CheckpointError(f"Invalid checkpoint {path}: {e}") from e
    if document.version != CHECKPOINT_VERSION:
        raise CheckpointError(
            f"Checkpoint {path} has version {document.version}, "
            f"expected {CHECKPOINT_VERSION}"
        )

    policy = ActorCritic(
        hidden_sizes=document.train_config.hidden_sizes,
        log_std_init=document.train_config.log_std_init,
    )
    expected = policy.state_dict()
    if set(document.parameters) != set(expected):
        raise CheckpointError(
            f"Checkpoint {path} parameters {sorted(document.parameters)} do not "
            f"match the network's {sorted(expected)}"
        )

    state = {}
    for name, array in document.parameters.items():
        if tuple(array.shape) != tuple(expected[name].shape):
            raise CheckpointError(
                f"Parameter {name} has shape {array.shape}, "
                f"expected {list(expected[name].shape)}"
            )
        try:
            state[name] = array.to_tensor()
        except ValueError as e:
            raise CheckpointError(f"Parameter {name}: {e}") from e
    policy.load_state_dict(state)
    return policy, document.train_config, document.env_config
