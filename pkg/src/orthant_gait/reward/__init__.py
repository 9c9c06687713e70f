"""Reward terms for walking and their weighted composite."""

from .composite import (
    REWARD_SETUPS,
    RewardSetup,
    RewardTerms,
    RewardWeights,
    SetupName,
    StepContext,
    composite,
    reward_terms,
)
from .terms import heaviside, r_dist, r_fall, r_for, r_jerk, r_or

__all__ = [
    "RewardWeights",
    "RewardSetup",
    "REWARD_SETUPS",
    "SetupName",
    "StepContext",
    "RewardTerms",
    "reward_terms",
    "composite",
    "heaviside",
    "r_or",
    "r_for",
    "r_jerk",
    "r_dist",
    "r_fall",
]
