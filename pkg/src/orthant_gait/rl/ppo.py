"""Clipped-surrogate policy optimisation on a single rollout buffer."""

import logging
import math
from dataclasses import dataclass

import numpy as np
import torch
from torch import nn

from orthant_gait.errors import NonFiniteLossError
from orthant_gait.plant import Control
from orthant_gait.rl.buffer import Minibatch, RolloutBuffer, minibatches
from orthant_gait.rl.config import TrainConfig
from orthant_gait.rl.networks import ActorCritic

logger = logging.getLogger("__main__." + __name__)


@torch.no_grad()
def act(
    policy: ActorCritic,
    observation: np.ndarray,
    stochastic: bool,
    rng: torch.Generator | None = None,
) -> tuple[Control, float, float]:
    """Sample (or take the mean of) the Gaussian policy at one observation.

    The action is returned unclipped and log_prob refers to that unclipped sample;
    torque limits are applied by the environment.
    """
    obs = torch.as_tensor(observation, dtype=torch.float64)
    mean = policy.actor(obs)
    std = policy.std()
    if stochastic:
        noise = torch.randn(mean.shape, generator=rng, dtype=torch.float64)
        action = mean + std * noise
    else:
        action = mean
    log_prob = torch.distributions.Normal(mean, std).log_prob(action).sum()
    value = policy.value(obs)
    return Control.from_array(action.numpy()), float(log_prob), float(value)


@dataclass
class LossTerms:
    total: torch.Tensor
    policy_loss: torch.Tensor
    value_loss: torch.Tensor
    entropy: torch.Tensor
    approx_kl: torch.Tensor
    clip_fraction: torch.Tensor


def ppo_losses(policy: ActorCritic, batch: Minibatch, config: TrainConfig) -> LossTerms:
    observations = torch.as_tensor(batch.observations, dtype=torch.float64)
    actions = torch.as_tensor(batch.actions, dtype=torch.float64)
    old_log_probs = torch.as_tensor(batch.old_log_probs, dtype=torch.float64)
    advantages = torch.as_tensor(batch.advantages, dtype=torch.float64)
    returns = torch.as_tensor(batch.returns, dtype=torch.float64)

    distribution = policy.distribution(observations)
    log_probs = distribution.log_prob(actions).sum(-1)
    entropy = distribution.entropy().sum(-1).mean()

    log_ratio = log_probs - old_log_probs
    ratio = torch.exp(log_ratio)
    unclipped = ratio * advantages
    clipped = torch.clamp(ratio, 1 - config.clip_eps, 1 + config.clip_eps) * advantages
    policy_loss = -torch.min(unclipped, clipped).mean()

    value_loss = ((policy.value(observations) - returns) ** 2).mean()
    total = policy_loss + config.value_coef * value_loss - config.entropy_coef * entropy

    with torch.no_grad():
        approx_kl = ((ratio - 1) - log_ratio).mean()
        clip_fraction = ((ratio - 1).abs() > config.clip_eps).double().mean()

    return LossTerms(
        total=total,
        policy_loss=policy_loss,
        value_loss=value_loss,
        entropy=entropy,
        approx_kl=approx_kl,
        clip_fraction=clip_fraction,
    )


@dataclass(frozen=True)
class UpdateMetrics:
    policy_loss: float
    value_loss: float
    approx_kl: float
    clip_fraction: float
    entropy: float


def make_optimizer(policy: ActorCritic, config: TrainConfig) -> torch.optim.Adam:
    return torch.optim.Adam(
        policy.parameters(),
        lr=config.learning_rate,
        betas=config.adam_betas,
        eps=config.adam_eps,
    )


def ppo_update(
    policy: ActorCritic,
    optimizer: torch.optim.Optimizer,
    buffer: RolloutBuffer,
    config: TrainConfig,
    rng: np.random.Generator,
) -> UpdateMetrics:
    """epochs_per_update passes of shuffled minibatch gradient steps.

    Returns the minibatch-averaged losses and diagnostics.
    """
    sums = {name: 0.0 for name in UpdateMetrics.__dataclass_fields__}
    count = 0
    for _ in range(config.epochs_per_update):
        for batch in minibatches(buffer, config.minibatch_size, rng):
            losses = ppo_losses(policy, batch, config)
            if not torch.isfinite(losses.total):
                raise NonFiniteLossError(
                    f"Non-finite PPO loss: policy={losses.policy_loss.detach().item()}, "
                    f"value={losses.value_loss.detach().item()}"
                )
            optimizer.zero_grad()
            losses.total.backward()
            nn.utils.clip_grad_norm_(policy.parameters(), config.max_grad_norm)
            optimizer.step()

            for name in sums:
                sums[name] += getattr(losses, name).detach().item()
            count += 1

    metrics = UpdateMetrics(**{name: total / count for name, total in sums.items()})
    if not all(math.isfinite(value) for value in sums.values()):
        raise NonFiniteLossError(f"Non-finite PPO diagnostics: {metrics}")
    return metrics
