import logging
from collections.abc import Callable
from dataclasses import dataclass, field
from pathlib import Path

import pandas as pd

from orthant_gait.automaton import classify
from orthant_gait.env.walker_env import CompassGaitEnv, EnvConfig
from orthant_gait.plant import Control, HipPose, ImpactEvent, WalkerState
from orthant_gait.reward import RewardTerms
from orthant_gait.utils.files import atomic_write_text

logger = logging.getLogger("__main__." + __name__)

TRACE_COLUMNS = [
    "t",
    "theta1",
    "theta2",
    "dtheta1",
    "dtheta2",
    "u1",
    "u2",
    "px",
    "py",
    "orthant_k",
    "r_jerk",
    "r_dist",
    "r_fall",
    "r_for",
    "r_or",
    "reward",
    "impact",
]

NO_REWARD = RewardTerms(r_jerk=0.0, r_dist=0.0, r_fall=0.0, r_for=0.0, r_or=0.0)


@dataclass(frozen=True, slots=True)
class TraceSample:
    t: float
    state: WalkerState
    control: Control
    hip: HipPose
    terms: RewardTerms
    reward: float
    impacts: int

    def as_row(self) -> dict:
        return {
            "t": self.t,
            "theta1": self.state.theta1,
            "theta2": self.state.theta2,
            "dtheta1": self.state.dtheta1,
            "dtheta2": self.state.dtheta2,
            "u1": self.control.u1,
            "u2": self.control.u2,
            "px": self.hip.px,
            "py": self.hip.py,
            "orthant_k": classify(self.state).index,
            "r_jerk": self.terms.r_jerk,
            "r_dist": self.terms.r_dist,
            "r_fall": self.terms.r_fall,
            "r_for": self.terms.r_for,
            "r_or": self.terms.r_or,
            "reward": self.reward,
            "impact": self.impacts,
        }


@dataclass
class EpisodeTrace:
    """Time series of one episode: the initial sample followed by one sample per step."""

    dt: float
    samples: list[TraceSample] = field(default_factory=list)
    impacts: list[ImpactEvent] = field(default_factory=list)
    terminated: bool = False
    truncated: bool = False

    @property
    def states(self) -> list[WalkerState]:
        return [sample.state for sample in self.samples]

    @property
    def steps(self) -> int:
        return max(len(self.samples) - 1, 0)

    @property
    def total_return(self) -> float:
        return sum(sample.reward for sample in self.samples)

    @property
    def distance(self) -> float:
        """Hip x position at the end of the episode."""
        return self.samples[-1].hip.px

    @property
    def impact_indices(self) -> list[int]:
        """Indices of the samples whose step ended in at least one heel strike."""
        return [index for index, sample in enumerate(self.samples) if sample.impacts]

    @property
    def fell(self) -> bool:
        return self.terminated

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [sample.as_row() for sample in self.samples], columns=TRACE_COLUMNS
        )

    def write_csv(self, path: Path) -> None:
        path.parent.mkdir(parents=True, exist_ok=True)
        write_frame_csv(self.to_frame(), path)


def write_frame_csv(frame: pd.DataFrame, path: Path) -> None:
    """`.` decimals, `,` separator, header row, LF line endings, shortest round-trip floats."""
    atomic_write_text(path, frame.to_csv(index=False, lineterminator="\n"))


def read_frame_csv(path: Path) -> pd.DataFrame:
    return pd.read_csv(path, float_precision="round_trip")


def read_trace_csv(path: Path) -> pd.DataFrame:
    frame = read_frame_csv(path)
    missing = set(TRACE_COLUMNS) - set(frame.columns)
    if missing:
        raise ValueError(f"Trace file {path} is missing columns {sorted(missing)}")
    return frame


def rollout(
    config: EnvConfig,
    controller: Callable[[WalkerState], Control],
    max_time: float | None = None,
) -> EpisodeTrace:
    """Run one episode from the configured initial state under `controller`.

    Stops on a fall, at the horizon, or after max_time seconds of simulated time.
    """
    env = CompassGaitEnv(config)
    env.reset()
    trace = EpisodeTrace(dt=config.dt_control)
    trace.samples.append(
        TraceSample(
            t=0.0,
            state=env.state,
            control=Control(),
            hip=env.hip,
            terms=NO_REWARD,
            reward=0.0,
            impacts=0,
        )
    )

    max_steps = config.horizon_steps
    if max_time is not None:
        max_steps = min(max_steps, round(max_time / config.dt_control))

    for _ in range(max_steps):
        result = env.step(controller(env.state))
        info = result.info
        trace.impacts.extend(info["impacts"])
        trace.samples.append(
            TraceSample(
                t=info["t"],
                state=env.state,
                control=info["control"],
                hip=info["hip_pose"],
                terms=info["reward_terms"],
                reward=result.reward,
                impacts=len(info["impacts"]),
            )
        )
        if result.terminated or result.truncated:
            trace.terminated, trace.truncated = result.terminated, result.truncated
            break

    logger.info(
        f"Rollout finished after {trace.steps} steps: distance={trace.distance:.3f}m, "
        f"impacts={len(trace.impacts)}, fell={trace.fell}"
    )
    return trace


@dataclass(frozen=True)
class GaitSummary:
    steps: int
    duration: float
    distance: float
    fell: bool
    impacts: int
    mean_stride: float
    mean_speed: float
    mean_step_period: float
    total_return: float


def gait_summary(trace: EpisodeTrace) -> GaitSummary:
    duration = trace.samples[-1].t
    start_px = trace.samples[0].hip.px
    strides = [
        event.post_state.stance_foot_x - event.pre_state.stance_foot_x
        for event in trace.impacts
    ]
    impact_times = [event.time for event in trace.impacts]
    periods = [b - a for a, b in zip(impact_times, impact_times[1:])]
    return GaitSummary(
        steps=trace.steps,
        duration=duration,
        distance=trace.distance,
        fell=trace.fell,
        impacts=len(trace.impacts),
        mean_stride=sum(strides) / len(strides) if strides else 0.0,
        mean_speed=(trace.distance - start_px) / duration if duration > 0 else 0.0,
        mean_step_period=sum(periods) / len(periods) if periods else 0.0,
        total_return=trace.total_return,
    )
