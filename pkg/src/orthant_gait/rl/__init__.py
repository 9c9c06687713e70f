"""PPO for the compass walker: networks, rollout buffer, update, training loop."""

from .buffer import Minibatch, RolloutBuffer, compute_gae, minibatches
from .checkpoint import CheckpointDocument, load_checkpoint, save_checkpoint
from .config import TrainConfig
from .evaluation import EvaluationResult, PolicyController, evaluate
from .networks import ActorCritic
from .ppo import LossTerms, UpdateMetrics, act, make_optimizer, ppo_losses, ppo_update
from .trainer import (
    EVALUATIONS_FILE,
    LEARNING_LOG_COLUMNS,
    LEARNING_LOG_FILE,
    UPDATES_FILE,
    TrainingLog,
    seeded_generators,
    train,
)

__all__ = [
    "TrainConfig",
    "ActorCritic",
    "RolloutBuffer",
    "Minibatch",
    "compute_gae",
    "minibatches",
    "act",
    "LossTerms",
    "ppo_losses",
    "UpdateMetrics",
    "make_optimizer",
    "ppo_update",
    "TrainingLog",
    "LEARNING_LOG_COLUMNS",
    "LEARNING_LOG_FILE",
    "UPDATES_FILE",
    "EVALUATIONS_FILE",
    "seeded_generators",
    "train",
    "PolicyController",
    "EvaluationResult",
    "evaluate",
    "CheckpointDocument",
    "save_checkpoint",
    "load_checkpoint",
]
