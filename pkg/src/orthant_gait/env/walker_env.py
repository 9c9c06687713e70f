import logging
import math
from typing import Any, NamedTuple

import gymnasium as gym
import numpy as np
from gymnasium import spaces
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from typing_extensions import Self

from orthant_gait.automaton import classify
from orthant_gait.env.integrator import HybridIntegrator
from orthant_gait.errors import EpisodeFinishedError
from orthant_gait.plant import Control, HipPose, WalkerParams, WalkerState, hip_pose
from orthant_gait.plant.kinematics import DEFAULT_EPS_FRONT
from orthant_gait.reward import (
    RewardSetup,
    RewardWeights,
    StepContext,
    reward_terms,
)

logger = logging.getLogger("__main__." + __name__)

INITIAL_PHASE = (0.0, 0.0, -0.4, 2.0)


class EnvConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    params: WalkerParams = Field(default_factory=WalkerParams)
    dt_control: float = Field(0.01, gt=0)
    substeps: int = Field(4, ge=1)
    horizon: float = Field(10.0, gt=0, description="episode length T (s)")
    u_max: float = Field(10.0, gt=0)
    initial_state: tuple[float, float, float, float] = INITIAL_PHASE
    initial_stance_foot_x: float = 0.0
    reward_setup: RewardSetup = Field(
        default_factory=lambda: RewardSetup.from_name("for_plus_or")
    )
    base_weights: RewardWeights = Field(default_factory=RewardWeights)
    strict_orthant_reward: bool = False
    eps_front: float = Field(DEFAULT_EPS_FRONT, gt=0)
    max_impacts_per_step: int = Field(2, ge=1)

    @field_validator("reward_setup", mode="before")
    @classmethod
    def setup_from_name(cls, value):
        if isinstance(value, str):
            return RewardSetup.from_name(value)
        return value

    @field_validator("initial_state")
    @classmethod
    def finite_initial_state(cls, value):
        if not all(math.isfinite(x) for x in value):
            raise ValueError("initial_state must be finite")
        return value

    @model_validator(mode="after")
    def horizon_multiple_of_dt(self) -> Self:
        ratio = self.horizon / self.dt_control
        if abs(ratio - round(ratio)) > 1e-9 * max(1.0, ratio):
            raise ValueError(
                f"horizon {self.horizon} is not an integer multiple of "
                f"dt_control {self.dt_control}"
            )
        return self

    @property
    def horizon_steps(self) -> int:
        return round(self.horizon / self.dt_control)

    @property
    def weights(self) -> RewardWeights:
        return self.reward_setup.weights(self.base_weights)

    def initial_walker_state(self) -> WalkerState:
        return WalkerState.from_phase(self.initial_state, self.initial_stance_foot_x)


class StepResult(NamedTuple):
    """gymnasium step tuple; terminated (fall) wins over truncated (horizon)."""

    observation: np.ndarray
    reward: float
    terminated: bool
    truncated: bool
    info: dict[str, Any]


def observe(state: WalkerState) -> np.ndarray:
    return state.phase


class CompassGaitEnv(gym.Env):
    """The actuated compass walker on flat ground as an episodic environment.

    Observations are the phase vector [θ1, θ2, θ̇1, θ̇2]; actions are (hip, ankle)
    torques, clipped to ±u_max before they reach the plant.
    """

    metadata = {"render_modes": []}

    def __init__(self, config: EnvConfig | None = None):
        self.config = config or EnvConfig()
        self.integrator = HybridIntegrator(
            self.config.params,
            eps_front=self.config.eps_front,
            max_impacts=self.config.max_impacts_per_step,
        )
        self.weights = self.config.weights
        self.observation_space = spaces.Box(-np.inf, np.inf, (4,), dtype=np.float64)
        self.action_space = spaces.Box(
            -self.config.u_max, self.config.u_max, (2,), dtype=np.float64
        )
        self._state: WalkerState | None = None
        self._hip: HipPose | None = None
        self._u_prev = Control()
        self._steps = 0
        self._finished = True

    @property
    def state(self) -> WalkerState:
        if self._state is None:
            raise EpisodeFinishedError("Environment has not been reset")
        return self._state

    @property
    def hip(self) -> HipPose:
        return self._hip

    @property
    def time(self) -> float:
        return self._episode_time(self._steps)

    @property
    def finished(self) -> bool:
        return self._finished

    def _episode_time(self, steps: int) -> float:
        if steps >= self.config.horizon_steps:
            return self.config.horizon
        return steps * self.config.dt_control

    def reset(
        self, *, seed: int | None = None, options: dict | None = None
    ) -> tuple[np.ndarray, dict[str, Any]]:
        super().reset(seed=seed)
        self._state = self.config.initial_walker_state()
        self._hip = hip_pose(self.config.params, self._state)
        self._u_prev = Control()
        self._steps = 0
        self._finished = False
        return observe(self._state), {
            "hip_pose": self._hip,
            "orthant": classify(self._state),
            "t": 0.0,
        }

    def step(self, action) -> StepResult:
        if self._finished:
            raise EpisodeFinishedError(
                "step() called on a finished episode; call reset() first"
            )
        u_raw = action if isinstance(action, Control) else Control.from_array(action)
        u = u_raw.clipped(self.config.u_max)

        t0 = self.time
        prev_state, prev_hip = self._state, self._hip
        state, impacts = self.integrator.advance(
            prev_state, u, self.config.dt_control, self.config.substeps, t0=t0
        )
        self._steps += 1
        t = self.time
        hip = hip_pose(self.config.params, state)

        terms = reward_terms(
            StepContext(
                x_t=state,
                x_prev=prev_state,
                p_t=hip,
                p_prev=prev_hip,
                u_t=u,
                u_prev=self._u_prev,
                t=t,
                horizon=self.config.horizon,
            ),
            strict_orthant=self.config.strict_orthant_reward,
        )
        reward = terms.weighted_sum(self.weights)

        terminated = terms.r_fall == 1.0
        truncated = not terminated and self._steps >= self.config.horizon_steps
        self._state, self._hip, self._u_prev = state, hip, u
        self._finished = terminated or truncated
        if terminated:
            logger.info(f"Walker fell at t={t:.2f}s, px={hip.px:.3f}m")

        return StepResult(
            observation=observe(state),
            reward=reward,
            terminated=terminated,
            truncated=truncated,
            info={
                "hip_pose": hip,
                "orthant": classify(state),
                "impact": bool(impacts),
                "impacts": impacts,
                "reward_terms": terms,
                "control": u,
                "t": t,
            },
        )
