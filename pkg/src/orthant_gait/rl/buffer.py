from dataclasses import dataclass

import numpy as np

from orthant_gait.rl.networks import ACTION_SIZE, OBSERVATION_SIZE


class RolloutBuffer:
    """Fixed-length on-policy storage of one rollout.

    `next_values[t]` is the critic's value of the state reached after step t; it is
    only read when step t ends in a horizon truncation (bootstrap) or is the last
    entry of the buffer.
    """

    def __init__(self, n_steps: int):
        self.n_steps = n_steps
        self.observations = np.zeros((n_steps, OBSERVATION_SIZE))
        self.actions = np.zeros((n_steps, ACTION_SIZE))
        self.log_probs = np.zeros(n_steps)
        self.rewards = np.zeros(n_steps)
        self.values = np.zeros(n_steps)
        self.terminated = np.zeros(n_steps, dtype=bool)
        self.truncated = np.zeros(n_steps, dtype=bool)
        self.next_values = np.zeros(n_steps)
        self.advantages = np.zeros(n_steps)
        self.returns = np.zeros(n_steps)
        self.size = 0

    @property
    def full(self) -> bool:
        return self.size == self.n_steps

    def reset(self) -> None:
        self.size = 0

    def add(
        self,
        observation: np.ndarray,
        action: np.ndarray,
        log_prob: float,
        reward: float,
        value: float,
        terminated: bool,
        truncated: bool,
        truncation_value: float = 0.0,
    ) -> None:
        if self.full:
            raise IndexError("Rollout buffer is full")
        i = self.size
        self.observations[i] = observation
        self.actions[i] = action
        self.log_probs[i] = log_prob
        self.rewards[i] = reward
        self.values[i] = value
        self.terminated[i] = terminated
        self.truncated[i] = truncated
        self.next_values[i] = truncation_value
        self.size += 1


def compute_gae(
    buffer: RolloutBuffer, gamma: float, lam: float, bootstrap_value: float
) -> tuple[np.ndarray, np.ndarray]:
    """Generalized advantage estimates and value targets for a full buffer.

    A fall is absorbing (no bootstrap); a horizon truncation bootstraps from the
    critic's value of the truncated state. Either way the advantage recursion does
    not cross into the next episode.
    """
    n = buffer.size
    advantages = np.zeros(n)
    last_advantage = 0.0
    for t in reversed(range(n)):
        episode_end = buffer.terminated[t] or buffer.truncated[t]
        if buffer.terminated[t]:
            next_value = 0.0
        elif buffer.truncated[t]:
            next_value = buffer.next_values[t]
        elif t == n - 1:
            next_value = bootstrap_value
        else:
            next_value = buffer.values[t + 1]
        delta = buffer.rewards[t] + gamma * next_value - buffer.values[t]
        carry = 0.0 if episode_end else gamma * lam * last_advantage
        last_advantage = delta + carry
        advantages[t] = last_advantage

    returns = advantages + buffer.values[:n]
    buffer.advantages[:n] = advantages
    buffer.returns[:n] = returns
    return advantages, returns


@dataclass(frozen=True)
class Minibatch:
    observations: np.ndarray
    actions: np.ndarray
    old_log_probs: np.ndarray
    advantages: np.ndarray
    returns: np.ndarray


def normalized_advantages(advantages: np.ndarray) -> np.ndarray:
    return (advantages - advantages.mean()) / (advantages.std() + 1e-8)


def minibatches(
    buffer: RolloutBuffer, batch_size: int, rng: np.random.Generator
):
    advantages = normalized_advantages(buffer.advantages[: buffer.size])
    order = rng.permutation(buffer.size)
    for start in range(0, buffer.size, batch_size):
        index = order[start : start + batch_size]
        yield Minibatch(
            observations=buffer.observations[index],
            actions=buffer.actions[index],
            old_log_probs=buffer.log_probs[index],
            advantages=advantages[index],
            returns=buffer.returns[index],
        )
