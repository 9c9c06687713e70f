import math
from dataclasses import dataclass
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator

from orthant_gait.plant import Control, HipPose, WalkerState
from orthant_gait.reward.terms import r_dist, r_fall, r_for, r_jerk, r_or

SetupName = Literal["sparse", "for", "or", "for_plus_or"]


class RewardWeights(BaseModel):
    model_config = ConfigDict(frozen=True)

    w_jerk: float = -0.001
    w_dist: float = 1.0
    w_fall: float = -10.0
    w_for: float = 0.0
    w_or: float = 0.0

    @field_validator("*")
    @classmethod
    def finite(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("reward weights must be finite")
        return value

    def scaled(self, factor: float) -> "RewardWeights":
        return RewardWeights(
            **{name: factor * value for name, value in self.model_dump().items()}
        )


class RewardSetup(BaseModel):
    """A named choice of the forward and orthant weights."""

    model_config = ConfigDict(frozen=True)

    name: SetupName
    w_for: float = Field(ge=0)
    w_or: float = Field(ge=0)

    @classmethod
    def from_name(cls, name: str) -> "RewardSetup":
        try:
            return REWARD_SETUPS[name]
        except KeyError:
            raise ValueError(
                f"Unknown reward setup '{name}', expected one of {list(REWARD_SETUPS)}"
            ) from None

    def weights(self, base: RewardWeights | None = None) -> RewardWeights:
        base = base or RewardWeights()
        return base.model_copy(update={"w_for": self.w_for, "w_or": self.w_or})


REWARD_SETUPS: dict[str, RewardSetup] = {
    "sparse": RewardSetup(name="sparse", w_for=0.0, w_or=0.0),
    "for": RewardSetup(name="for", w_for=0.01, w_or=0.0),
    "or": RewardSetup(name="or", w_for=0.0, w_or=0.01),
    "for_plus_or": RewardSetup(name="for_plus_or", w_for=0.005, w_or=0.005),
}


@dataclass(frozen=True, slots=True)
class StepContext:
    x_t: WalkerState
    x_prev: WalkerState
    p_t: HipPose
    p_prev: HipPose
    u_t: Control
    u_prev: Control
    t: float
    horizon: float

    def __post_init__(self):
        if self.t < 0:
            raise ValueError(f"t must be non-negative, got {self.t}")
        if self.horizon <= 0:
            raise ValueError(f"horizon must be positive, got {self.horizon}")


@dataclass(frozen=True, slots=True)
class RewardTerms:
    r_jerk: float
    r_dist: float
    r_fall: float
    r_for: float
    r_or: float

    def weighted_sum(self, weights: RewardWeights) -> float:
        return (
            weights.w_jerk * self.r_jerk
            + weights.w_dist * self.r_dist
            + weights.w_fall * self.r_fall
            + weights.w_for * self.r_for
            + weights.w_or * self.r_or
        )


def reward_terms(ctx: StepContext, strict_orthant: bool = False) -> RewardTerms:
    return RewardTerms(
        r_jerk=r_jerk(ctx.u_t, ctx.u_prev),
        r_dist=r_dist(ctx.p_t, ctx.t, ctx.horizon),
        r_fall=r_fall(ctx.p_t),
        r_for=r_for(ctx.p_t, ctx.p_prev),
        r_or=r_or(ctx.x_t, ctx.x_prev, strict=strict_orthant),
    )


def composite(
    ctx: StepContext, weights: RewardWeights, strict_orthant: bool = False
) -> float:
    return reward_terms(ctx, strict_orthant).weighted_sum(weights)
