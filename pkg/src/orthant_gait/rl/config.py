from pydantic import BaseModel, ConfigDict, Field, model_validator
from typing_extensions import Self


class TrainConfig(BaseModel):
    """PPO hyperparameters. Defaults follow the common continuous-control defaults."""

    model_config = ConfigDict(frozen=True)

    total_steps: int = Field(
        500_000,
        ge=1,
        description="env step budget, rounded up to whole rollouts of n_steps",
    )
    n_steps: int = Field(2048, ge=1, description="rollout length per update")
    minibatch_size: int = Field(64, ge=1)
    epochs_per_update: int = Field(10, ge=1)
    gamma: float = Field(0.99, gt=0, le=1)
    gae_lambda: float = Field(0.95, ge=0, le=1)
    clip_eps: float = Field(0.2, gt=0)
    value_coef: float = Field(0.5, ge=0)
    entropy_coef: float = Field(0.0, ge=0)
    learning_rate: float = Field(3e-4, gt=0)
    max_grad_norm: float = Field(0.5, gt=0)
    adam_betas: tuple[float, float] = (0.9, 0.999)
    adam_eps: float = Field(1e-8, gt=0)
    hidden_sizes: tuple[int, ...] = (64, 64)
    log_std_init: float = 0.0
    seed: int = 0
    eval_every: int = Field(10, ge=1, description="updates between evaluations")

    @model_validator(mode="after")
    def rollout_divisible(self) -> Self:
        if self.n_steps % self.minibatch_size != 0:
            raise ValueError(
                f"n_steps {self.n_steps} must be divisible by "
                f"minibatch_size {self.minibatch_size}"
            )
        return self

    @property
    def n_updates(self) -> int:
        """Rollout-update cycles.

        Rounded up, so the last rollout runs past total_steps when n_steps does
        not divide it.
        """
        return -(-self.total_steps // self.n_steps)
