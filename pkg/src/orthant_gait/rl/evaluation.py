from dataclasses import dataclass

from orthant_gait.env import Controller, EnvConfig, EpisodeTrace, rollout
from orthant_gait.plant import Control, WalkerState
from orthant_gait.rl.networks import ActorCritic


class PolicyController(Controller):
    """Deterministic policy: the actor mean applied to the phase vector."""

    def __init__(self, policy: ActorCritic):
        self.policy = policy
        super().__init__()

    def control(self, state: WalkerState) -> Control:
        return Control.from_array(self.policy.mean_action(state.phase))


@dataclass(frozen=True)
class EvaluationResult:
    mean_return: float
    distance: float
    returns: list[float]
    distances: list[float]
    fell: list[bool]


def evaluate(
    policy: ActorCritic | Controller,
    env_config: EnvConfig,
    episodes: int = 1,
) -> EvaluationResult:
    """Deterministic rollouts; distance is the hip x position at episode end."""
    if episodes < 1:
        raise ValueError("episodes must be at least 1")
    controller = (
        PolicyController(policy) if isinstance(policy, ActorCritic) else policy
    )
    traces: list[EpisodeTrace] = [
        rollout(env_config, controller) for _ in range(episodes)
    ]
    returns = [trace.total_return for trace in traces]
    distances = [trace.distance for trace in traces]
    return EvaluationResult(
        mean_return=sum(returns) / episodes,
        distance=sum(distances) / episodes,
        returns=returns,
        distances=distances,
        fell=[trace.fell for trace in traces],
    )
