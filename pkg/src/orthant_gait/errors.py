"""Exceptions raised by the simulator, trainer and harness."""

from typing import Any


class OrthantGaitError(Exception):
    pass


class SingularMassError(OrthantGaitError):
    """Mass matrix determinant below tolerance."""


class SingularImpactError(OrthantGaitError):
    """Post-impact transition matrix T+(alpha) cannot be inverted."""


class NotAnEdgeError(OrthantGaitError):
    """A reset was requested for a location pair outside the walking cycle."""


class EpisodeFinishedError(OrthantGaitError):
    """step() was called on an episode that already terminated or truncated."""


class SimulationError(OrthantGaitError):
    pass


class NonFiniteLossError(OrthantGaitError):
    """A PPO loss became NaN or infinite. `log` holds everything recorded before it."""

    def __init__(self, message: str, log: Any = None):
        super().__init__(message)
        self.log = log


class CheckpointError(OrthantGaitError):
    pass


class ConfigFileError(OrthantGaitError, ValueError):
    """Malformed line or duplicate key in a run config file."""
