"""Episodes of the compass walker: integration, rewards, termination, controllers."""

from .controllers import (
    DEFAULT_PHI,
    Controller,
    FunctionController,
    VirtualGravityController,
    ZeroController,
    virtual_gravity_control,
)
from .integrator import HybridIntegrator, rk4_step
from .rollout import (
    TRACE_COLUMNS,
    EpisodeTrace,
    GaitSummary,
    TraceSample,
    gait_summary,
    read_frame_csv,
    read_trace_csv,
    rollout,
    write_frame_csv,
)
from .walker_env import CompassGaitEnv, EnvConfig, StepResult

__all__ = [
    "EnvConfig",
    "StepResult",
    "CompassGaitEnv",
    "HybridIntegrator",
    "rk4_step",
    "Controller",
    "VirtualGravityController",
    "ZeroController",
    "FunctionController",
    "virtual_gravity_control",
    "DEFAULT_PHI",
    "EpisodeTrace",
    "TraceSample",
    "TRACE_COLUMNS",
    "rollout",
    "GaitSummary",
    "gait_summary",
    "write_frame_csv",
    "read_frame_csv",
    "read_trace_csv",
]
