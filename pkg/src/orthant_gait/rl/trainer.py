import logging
import math
from collections.abc import Callable
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd
import torch

from orthant_gait.env import CompassGaitEnv, EnvConfig, write_frame_csv
from orthant_gait.errors import NonFiniteLossError
from orthant_gait.rl.buffer import RolloutBuffer, compute_gae
from orthant_gait.rl.config import TrainConfig
from orthant_gait.rl.evaluation import evaluate
from orthant_gait.rl.networks import ActorCritic
from orthant_gait.rl.ppo import UpdateMetrics, act, make_optimizer, ppo_update

logger = logging.getLogger("__main__." + __name__)

LEARNING_LOG_COLUMNS = [
    "step",
    "episode",
    "return",
    "length",
    "distance",
    "policy_loss",
    "value_loss",
    "approx_kl",
    "clip_fraction",
]
UPDATE_COLUMNS = [
    "update",
    "step",
    "mean_return",
    "policy_loss",
    "value_loss",
    "approx_kl",
    "clip_fraction",
    "entropy",
]
EVALUATION_COLUMNS = ["update", "step", "return", "distance"]

LEARNING_LOG_FILE = "learning_log.csv"
UPDATES_FILE = "updates.csv"
EVALUATIONS_FILE = "evaluations.csv"

NO_METRICS = UpdateMetrics(
    policy_loss=math.nan,
    value_loss=math.nan,
    approx_kl=math.nan,
    clip_fraction=math.nan,
    entropy=math.nan,
)


@dataclass
class TrainingLog:
    episodes: list[dict] = field(default_factory=list)
    updates: list[dict] = field(default_factory=list)
    evaluations: list[dict] = field(default_factory=list)

    def learning_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.episodes, columns=LEARNING_LOG_COLUMNS)

    def updates_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.updates, columns=UPDATE_COLUMNS)

    def evaluations_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.evaluations, columns=EVALUATION_COLUMNS)

    def write(self, directory: Path) -> None:
        directory.mkdir(parents=True, exist_ok=True)
        write_frame_csv(self.learning_frame(), directory / LEARNING_LOG_FILE)
        write_frame_csv(self.updates_frame(), directory / UPDATES_FILE)
        write_frame_csv(self.evaluations_frame(), directory / EVALUATIONS_FILE)


def seeded_generators(
    seed: int,
) -> tuple[torch.Generator, torch.Generator, np.random.Generator]:
    """Independent streams for weight init, action noise and minibatch shuffling."""
    init_seed, noise_seed, shuffle_seed = np.random.SeedSequence(seed).generate_state(3)
    return (
        torch.Generator().manual_seed(int(init_seed)),
        torch.Generator().manual_seed(int(noise_seed)),
        np.random.default_rng(int(shuffle_seed)),
    )


def train(
    env_config: EnvConfig,
    train_config: TrainConfig,
    progress_callback: Callable[[int, int], None] | None = None,
) -> tuple[ActorCritic, TrainingLog]:
    """Alternate rollout collection and PPO updates until total_steps env steps.

    On a non-finite loss the NonFiniteLossError carries the log recorded so far.
    """
    if train_config.total_steps % train_config.n_steps:
        logger.warning(
            f"total_steps={train_config.total_steps} is not a multiple of "
            f"n_steps={train_config.n_steps}; training for "
            f"{train_config.n_updates * train_config.n_steps} steps"
        )
    init_rng, noise_rng, shuffle_rng = seeded_generators(train_config.seed)
    policy = ActorCritic(
        hidden_sizes=train_config.hidden_sizes,
        log_std_init=train_config.log_std_init,
        generator=init_rng,
    )
    optimizer = make_optimizer(policy, train_config)
    buffer = RolloutBuffer(train_config.n_steps)
    log = TrainingLog()

    env = CompassGaitEnv(env_config)
    observation, _ = env.reset(seed=train_config.seed)
    episode_return, episode_length = 0.0, 0
    metrics = NO_METRICS
    last_mean_return = math.nan
    step = 0

    for update in range(1, train_config.n_updates + 1):
        buffer.reset()
        finished_returns: list[float] = []
        while not buffer.full:
            control, log_prob, value = act(policy, observation, True, noise_rng)
            result = env.step(control)
            step += 1
            episode_return += result.reward
            episode_length += 1

            truncation_value = 0.0
            if result.truncated:
                truncation_value = policy.predict_value(result.observation)
            buffer.add(
                observation,
                control.as_array(),
                log_prob,
                result.reward,
                value,
                result.terminated,
                result.truncated,
                truncation_value,
            )
            observation = result.observation

            if result.terminated or result.truncated:
                log.episodes.append(
                    {
                        "step": step,
                        "episode": len(log.episodes) + 1,
                        "return": episode_return,
                        "length": episode_length,
                        "distance": result.info["hip_pose"].px,
                        "policy_loss": metrics.policy_loss,
                        "value_loss": metrics.value_loss,
                        "approx_kl": metrics.approx_kl,
                        "clip_fraction": metrics.clip_fraction,
                    }
                )
                finished_returns.append(episode_return)
                episode_return, episode_length = 0.0, 0
                observation, _ = env.reset()

            if progress_callback:
                progress_callback(step, train_config.n_updates * train_config.n_steps)

        compute_gae(
            buffer,
            train_config.gamma,
            train_config.gae_lambda,
            policy.predict_value(observation),
        )
        try:
            metrics = ppo_update(policy, optimizer, buffer, train_config, shuffle_rng)
        except NonFiniteLossError as e:
            logger.error(f"Training aborted at update {update}: {e}")
            e.log = log
            raise

        if finished_returns:
            last_mean_return = sum(finished_returns) / len(finished_returns)
        log.updates.append(
            {"update": update, "step": step, "mean_return": last_mean_return}
            | asdict(metrics)
        )
        logger.info(
            f"Update {update}/{train_config.n_updates} step={step} "
            f"mean_return={last_mean_return:.4f} kl={metrics.approx_kl:.5f}"
        )

        if update % train_config.eval_every == 0 or update == train_config.n_updates:
            evaluation = evaluate(policy, env_config)
            log.evaluations.append(
                {
                    "update": update,
                    "step": step,
                    "return": evaluation.mean_return,
                    "distance": evaluation.distance,
                }
            )

    return policy, log
