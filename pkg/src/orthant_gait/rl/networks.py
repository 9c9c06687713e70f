import math

import numpy as np
import torch
from torch import nn
from torch.distributions import Normal

OBSERVATION_SIZE = 4
ACTION_SIZE = 2
LOG_STD_MIN, LOG_STD_MAX = -20.0, 2.0


def mlp(sizes: list[int]) -> nn.Sequential:
    layers: list[nn.Module] = []
    for index, (fan_in, fan_out) in enumerate(zip(sizes, sizes[1:])):
        layers.append(nn.Linear(fan_in, fan_out, dtype=torch.float64))
        if index < len(sizes) - 2:
            layers.append(nn.Tanh())
    return nn.Sequential(*layers)


class ActorCritic(nn.Module):
    """Gaussian actor and value critic as two independent tanh networks.

    The actor outputs the action mean; the standard deviation is a learned,
    state-independent vector exp(log_std).
    """

    def __init__(
        self,
        hidden_sizes: tuple[int, ...] = (64, 64),
        log_std_init: float = 0.0,
        generator: torch.Generator | None = None,
    ):
        super().__init__()
        self.hidden_sizes = tuple(hidden_sizes)
        self.actor = mlp([OBSERVATION_SIZE, *hidden_sizes, ACTION_SIZE])
        self.critic = mlp([OBSERVATION_SIZE, *hidden_sizes, 1])
        self.log_std = nn.Parameter(
            torch.full((ACTION_SIZE,), log_std_init, dtype=torch.float64)
        )
        self._initialise(generator)

    def _initialise(self, generator: torch.Generator | None) -> None:
        # orthogonal weights: sqrt(2) hidden, 0.01 actor head, 1 value head
        for network, head_gain in ((self.actor, 0.01), (self.critic, 1.0)):
            linears = [m for m in network if isinstance(m, nn.Linear)]
            for index, layer in enumerate(linears):
                gain = head_gain if index == len(linears) - 1 else math.sqrt(2)
                nn.init.orthogonal_(layer.weight, gain=gain, generator=generator)
                nn.init.zeros_(layer.bias)

    def std(self) -> torch.Tensor:
        return torch.exp(self.log_std.clamp(LOG_STD_MIN, LOG_STD_MAX))

    def distribution(self, observations: torch.Tensor) -> Normal:
        return Normal(self.actor(observations), self.std())

    def value(self, observations: torch.Tensor) -> torch.Tensor:
        return self.critic(observations).squeeze(-1)

    def log_prob(self, observations: torch.Tensor, actions: torch.Tensor) -> torch.Tensor:
        return self.distribution(observations).log_prob(actions).sum(-1)

    @torch.no_grad()
    def mean_action(self, observation: np.ndarray) -> np.ndarray:
        obs = torch.as_tensor(observation, dtype=torch.float64)
        return self.actor(obs).numpy()

    @torch.no_grad()
    def predict_value(self, observation: np.ndarray) -> float:
        obs = torch.as_tensor(observation, dtype=torch.float64)
        return float(self.value(obs))
