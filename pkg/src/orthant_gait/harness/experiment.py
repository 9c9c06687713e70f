import json
import logging
import os
from collections.abc import Callable
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass
from pathlib import Path
from typing import Literal

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, field_validator

from orthant_gait.env import (
    DEFAULT_PHI,
    EnvConfig,
    VirtualGravityController,
    read_frame_csv,
    rollout,
    write_frame_csv,
)
from orthant_gait.errors import NonFiniteLossError
from orthant_gait.harness.plots import write_plot_scripts
from orthant_gait.reward import REWARD_SETUPS, SetupName
from orthant_gait.rl import (
    EVALUATIONS_FILE,
    UPDATES_FILE,
    TrainConfig,
    TrainingLog,
    save_checkpoint,
    train,
)
from orthant_gait.utils.files import atomic_write_text

logger = logging.getLogger("__main__." + __name__)

CHECKPOINT_FILE = "checkpoint.json"
FAILED_FILE = "failed.json"

LEARNING_CURVES_FILE = "learning_curves.csv"
LEARNING_CURVES_RAW_FILE = "learning_curves_raw.csv"
DISTANCES_FILE = "distances.csv"
STDDEV_FILE = "stddev.csv"
BASELINE_FILE = "baseline.csv"
REPORT_FILE = "report.json"

BASELINE_ROW = "baseline"
BASELINE_SEED = -1
SHARED_BASELINE_SETUP = "sparse"


def run_directory(output_dir: Path, setup: str, seed: int) -> Path:
    return output_dir / "runs" / setup / f"seed-{seed}"


class ExperimentSpec(BaseModel):
    """Every (setup, seed) pair is one independent training run."""

    model_config = ConfigDict(frozen=True)

    setups: tuple[SetupName, ...] = Field(tuple(REWARD_SETUPS), min_length=1)
    seeds: tuple[int, ...] = Field(tuple(range(15)), min_length=1)
    steps_per_run: int = Field(500_000, ge=1)
    dt_control: float = Field(0.01, gt=0)
    strict_orthant: bool = False
    phi: float = DEFAULT_PHI
    eval_every: int = Field(10, ge=1)
    shared_baseline: bool = False
    output_dir: Path = Path("output")

    @field_validator("setups", "seeds")
    @classmethod
    def unique(cls, value: tuple) -> tuple:
        if len(set(value)) != len(value):
            raise ValueError(f"duplicate entries in {list(value)}")
        return value

    @field_validator("output_dir")
    @classmethod
    def writable(cls, value: Path) -> Path:
        existing = value
        while not existing.exists() and existing != existing.parent:
            existing = existing.parent
        if not existing.is_dir() or not os.access(existing, os.W_OK):
            raise ValueError(f"output directory {value} is not writable")
        return value

    def env_config(self, setup: str) -> EnvConfig:
        return EnvConfig(
            dt_control=self.dt_control,
            reward_setup=setup,
            strict_orthant_reward=self.strict_orthant,
        )

    def train_config(self, seed: int) -> TrainConfig:
        return TrainConfig(
            total_steps=self.steps_per_run, seed=seed, eval_every=self.eval_every
        )

    def run_dir(self, setup: str, seed: int) -> Path:
        return run_directory(self.output_dir, setup, seed)

    @property
    def normalization(self) -> Literal["per-setup", "shared"]:
        return "shared" if self.shared_baseline else "per-setup"


def run_completed(directory: Path) -> bool:
    """The checkpoint is written after every log, so its presence marks a finished run."""
    return (directory / CHECKPOINT_FILE).exists()


def write_run_artifacts(
    directory: Path,
    policy,
    log: TrainingLog,
    train_config: TrainConfig,
    env_config: EnvConfig,
) -> None:
    log.write(directory)
    save_checkpoint(directory / CHECKPOINT_FILE, policy, train_config, env_config)


def train_run(
    directory: Path,
    env_config: EnvConfig,
    train_config: TrainConfig,
    progress_callback: Callable[[int, int], None] | None = None,
) -> None:
    """One training run writing its logs and checkpoint into `directory`.

    On a non-finite loss the partial log is flushed before the error propagates.
    """
    directory.mkdir(parents=True, exist_ok=True)
    (directory / FAILED_FILE).unlink(missing_ok=True)
    try:
        policy, log = train(env_config, train_config, progress_callback)
    except NonFiniteLossError as e:
        if e.log is not None:
            e.log.write(directory)
        raise
    write_run_artifacts(directory, policy, log, train_config, env_config)


@dataclass(frozen=True)
class RunOutcome:
    setup: str
    seed: int
    status: Literal["trained", "skipped", "failed"]
    error: str | None = None


def execute_run(spec: ExperimentSpec, setup: str, seed: int) -> RunOutcome:
    directory = spec.run_dir(setup, seed)
    if run_completed(directory):
        logger.warning(f"Skipping {setup} seed {seed}: already completed in {directory}")
        return RunOutcome(setup, seed, "skipped")
    try:
        train_run(directory, spec.env_config(setup), spec.train_config(seed))
    except Exception as e:
        # failures stay confined to this run
        logger.error(f"Run {setup} seed {seed} failed: {type(e).__name__}: {e}")
        directory.mkdir(parents=True, exist_ok=True)
        atomic_write_text(
            directory / FAILED_FILE,
            json.dumps({"setup": setup, "seed": seed, "error": str(e)}, indent=2),
        )
        return RunOutcome(setup, seed, "failed", str(e))
    return RunOutcome(setup, seed, "trained")


def run_all(
    spec: ExperimentSpec,
    jobs: int = 1,
    progress_callback: Callable[[int, int], None] | None = None,
) -> list[RunOutcome]:
    pairs = [(setup, seed) for setup in spec.setups for seed in spec.seeds]
    outcomes: list[RunOutcome] = []
    if jobs == 1:
        for setup, seed in pairs:
            outcomes.append(execute_run(spec, setup, seed))
            if progress_callback:
                progress_callback(len(outcomes), len(pairs))
        return outcomes

    with ProcessPoolExecutor(max_workers=jobs) as executor:
        futures = [
            executor.submit(execute_run, spec, setup, seed) for setup, seed in pairs
        ]
        for future in as_completed(futures):
            outcomes.append(future.result())
            if progress_callback:
                progress_callback(len(outcomes), len(pairs))
    order = {pair: index for index, pair in enumerate(pairs)}
    return sorted(outcomes, key=lambda outcome: order[(outcome.setup, outcome.seed)])


def baseline_frame(spec: ExperimentSpec) -> pd.DataFrame:
    """Return and final hip x of the virtual-gravity controller under each reward setup."""
    setups = list(spec.setups)
    if spec.shared_baseline and SHARED_BASELINE_SETUP not in setups:
        setups.append(SHARED_BASELINE_SETUP)
    rows = []
    for setup in setups:
        env_config = spec.env_config(setup)
        trace = rollout(env_config, VirtualGravityController(env_config.params, spec.phi))
        rows.append(
            {"setup": setup, "return": trace.total_return, "distance": trace.distance}
        )
    return pd.DataFrame(rows, columns=["setup", "return", "distance"])


def baseline_returns(spec: ExperimentSpec, baseline: pd.DataFrame) -> dict[str, float]:
    returns = dict(zip(baseline["setup"], baseline["return"]))
    divisors = {
        setup: returns[SHARED_BASELINE_SETUP if spec.shared_baseline else setup]
        for setup in spec.setups
    }
    for setup, value in divisors.items():
        if value == 0.0:
            raise ValueError(f"Baseline return for {setup} is zero; cannot normalise")
    return divisors


class SetupReport(BaseModel):
    setup: str
    completed_seeds: list[int]
    failed_seeds: list[int]
    steps: list[int]
    mean_normalized_return: list[float]
    best_rewards: dict[int, float]
    best_distances: dict[int, float]
    max_best_distance: float | None
    reward_std: float | None
    distance_std: float | None


class AggregateReport(BaseModel):
    normalization: Literal["per-setup", "shared"]
    baseline_return: dict[str, float]
    baseline_distance: float
    setups: dict[str, SetupReport]


def sample_std(values: pd.Series) -> float | None:
    """Standard deviation with the n - 1 convention; None below two values."""
    if len(values) < 2:
        return None
    return float(values.std(ddof=1))


def collect_curves(
    spec: ExperimentSpec, completed: list[tuple[str, int]], divisors: dict[str, float]
) -> pd.DataFrame:
    frames = []
    for setup, seed in completed:
        updates = read_frame_csv(spec.run_dir(setup, seed) / UPDATES_FILE)
        frame = pd.DataFrame(
            {
                "setup": setup,
                "seed": seed,
                "update": updates["update"],
                "step": updates["step"],
                "return": updates["mean_return"].ffill(),
            }
        )
        frame["normalized_return"] = frame["return"] / divisors[setup]
        frames.append(frame)
    columns = ["setup", "seed", "update", "step", "return", "normalized_return"]
    if not frames:
        return pd.DataFrame(columns=columns).astype(
            {"seed": int, "update": int, "step": int, "return": float, "normalized_return": float}
        )
    return pd.concat(frames, ignore_index=True)[columns]


def collect_distances(
    spec: ExperimentSpec, completed: list[tuple[str, int]], baseline_distance: float
) -> pd.DataFrame:
    rows = [{"setup": BASELINE_ROW, "seed": BASELINE_SEED, "distance": baseline_distance}]
    for setup, seed in completed:
        evaluations = read_frame_csv(spec.run_dir(setup, seed) / EVALUATIONS_FILE)
        rows.append(
            {
                "setup": setup,
                "seed": seed,
                "distance": float(evaluations["distance"].max()),
            }
        )
    return pd.DataFrame(rows, columns=["setup", "seed", "distance"])


def aggregate(spec: ExperimentSpec) -> AggregateReport:
    """Reduce the runs found in the output directory to the summary CSVs and report.

    Runs without a completed checkpoint are left out with a warning.
    """
    output = spec.output_dir
    baseline = baseline_frame(spec)
    divisors = baseline_returns(spec, baseline)
    baseline_distance = float(baseline["distance"].iloc[0])

    completed, missing = [], []
    for setup in spec.setups:
        for seed in spec.seeds:
            if run_completed(spec.run_dir(setup, seed)):
                completed.append((setup, seed))
            else:
                missing.append((setup, seed))
    if missing:
        logger.warning(
            f"Aggregating over {len(completed)} completed runs; "
            f"{len(missing)} missing or failed: {missing}"
        )

    raw = collect_curves(spec, completed, divisors)
    curves = (
        raw.groupby(["setup", "step"], sort=False)["normalized_return"]
        .agg(["mean", "count"])
        .reset_index()
        .rename(columns={"mean": "mean_normalized_return", "count": "n_seeds"})
    )
    distances = collect_distances(spec, completed, baseline_distance)

    reports: dict[str, SetupReport] = {}
    std_rows = []
    for setup in spec.setups:
        setup_raw = raw[raw["setup"] == setup]
        best_rewards = setup_raw.groupby("seed")["normalized_return"].max()
        best_distances = distances[distances["setup"] == setup].set_index("seed")[
            "distance"
        ]
        setup_curve = curves[curves["setup"] == setup]
        reports[setup] = SetupReport(
            setup=setup,
            completed_seeds=[seed for s, seed in completed if s == setup],
            failed_seeds=[seed for s, seed in missing if s == setup],
            steps=[int(step) for step in setup_curve["step"]],
            mean_normalized_return=[
                float(value) for value in setup_curve["mean_normalized_return"]
            ],
            best_rewards={int(k): float(v) for k, v in best_rewards.items()},
            best_distances={int(k): float(v) for k, v in best_distances.items()},
            max_best_distance=(
                float(best_distances.max()) if len(best_distances) else None
            ),
            reward_std=sample_std(best_rewards),
            distance_std=sample_std(best_distances),
        )
        std_rows.append(
            {
                "setup": setup,
                "reward_std": reports[setup].reward_std,
                "distance_std": reports[setup].distance_std,
                "n_seeds": len(best_distances),
            }
        )

    stddev = pd.DataFrame(
        std_rows, columns=["setup", "reward_std", "distance_std", "n_seeds"]
    ).astype({"reward_std": np.float64, "distance_std": np.float64})
    report = AggregateReport(
        normalization=spec.normalization,
        baseline_return=divisors,
        baseline_distance=baseline_distance,
        setups=reports,
    )

    output.mkdir(parents=True, exist_ok=True)
    write_frame_csv(raw, output / LEARNING_CURVES_RAW_FILE)
    write_frame_csv(curves, output / LEARNING_CURVES_FILE)
    write_frame_csv(distances, output / DISTANCES_FILE)
    write_frame_csv(stddev, output / STDDEV_FILE)
    write_frame_csv(baseline, output / BASELINE_FILE)
    atomic_write_text(output / REPORT_FILE, report.model_dump_json(indent=2))
    write_plot_scripts(output)
    return report


def run_experiment(
    spec: ExperimentSpec,
    jobs: int = 1,
    progress_callback: Callable[[int, int], None] | None = None,
) -> tuple[AggregateReport, list[RunOutcome]]:
    """Train every pending (setup, seed) run, then aggregate all completed ones."""
    spec.output_dir.mkdir(parents=True, exist_ok=True)
    outcomes = run_all(spec, jobs, progress_callback)
    trained = sum(outcome.status == "trained" for outcome in outcomes)
    failed = [outcome for outcome in outcomes if outcome.status == "failed"]
    logger.info(
        f"{trained} runs trained, {len(outcomes) - trained - len(failed)} skipped, "
        f"{len(failed)} failed"
    )
    return aggregate(spec), outcomes
