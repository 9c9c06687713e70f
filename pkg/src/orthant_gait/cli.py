"""CLI for simulating, training and comparing compass-walker reward setups."""

import logging
from pathlib import Path

import typer
from pydantic import ValidationError
from tqdm import tqdm

from orthant_gait.automaton import cycle_monitor
from orthant_gait.env import (
    Controller,
    VirtualGravityController,
    ZeroController,
    gait_summary,
    rollout,
)
from orthant_gait.errors import ConfigFileError, NonFiniteLossError, OrthantGaitError
from orthant_gait.harness import (
    ExperimentSpec,
    RunSettings,
    load_settings,
    run_directory,
    run_experiment,
    train_run,
)
from orthant_gait.rl import PolicyController, evaluate, load_checkpoint

logger = logging.getLogger()

app = typer.Typer(
    name="orthant-gait",
    help="Compass-gait walker simulation and PPO training with orthant-cycle rewards.",
    no_args_is_help=True,
)

TRACE_FILE = "trace.csv"

ConfigOption = typer.Option(
    None, "--config", "-c", help="Flat 'key = value' file; flags given here override it."
)
OutOption = typer.Option(
    None,
    "--out",
    "-o",
    envvar="ORTHANT_GAIT_OUT",
    help="Output directory (default ./output).",
)
DtOption = typer.Option(None, "--dt", help="Control period in seconds.")
StrictOption = typer.Option(
    None,
    "--strict-orthant/--no-strict-orthant",
    help="Penalise staying in one orthant location as well.",
)


def progress_tracking(current: int, total: int, progress_bar: tqdm):
    if progress_bar.total == 0:
        progress_bar.total = total
    progress_bar.update(1)


def fail(message: str) -> typer.Exit:
    typer.echo(message, err=True)
    return typer.Exit(1)


def settings_or_exit(config: Path | None, **overrides) -> RunSettings:
    try:
        return load_settings(config, **overrides)
    except (ValidationError, ConfigFileError, OSError) as e:
        raise fail(f"Invalid settings: {e}")


@app.callback()
def configure(
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Log progress at INFO."),
):
    logging.getLogger().setLevel(logging.INFO if verbose else logging.WARNING)


@app.command(help="Roll out the baseline controller and write the state trace.")
def simulate(
    controller: str | None = typer.Option(
        None, "--controller", help="virtual-gravity (default) or zero."
    ),
    phi: float | None = typer.Option(
        None, "--phi", help="Virtual slope angle in rad (default -0.07)."
    ),
    max_time: float | None = typer.Option(
        None, "--max-time", help="Stop after this much simulated time (s)."
    ),
    setup: str | None = typer.Option(None, "--setup", help="Reward setup for the trace."),
    dt: float | None = DtOption,
    strict_orthant: bool | None = StrictOption,
    out: Path | None = OutOption,
    config: Path | None = ConfigOption,
):
    settings = settings_or_exit(
        config,
        controller=controller,
        phi=phi,
        max_time=max_time,
        setup=setup,
        dt=dt,
        strict_orthant=strict_orthant,
        out=out,
    )
    try:
        env_config = settings.env_config()
    except ValidationError as e:
        raise fail(f"Invalid settings: {e}")
    policy: Controller = (
        VirtualGravityController(env_config.params, settings.phi)
        if settings.controller == "virtual-gravity"
        else ZeroController()
    )
    try:
        trace = rollout(env_config, policy, max_time=settings.max_time)
    except OrthantGaitError as e:
        raise fail(f"Simulation failed: {e}")

    trace_path = settings.out / TRACE_FILE
    trace.write_csv(trace_path)
    summary = gait_summary(trace)
    report = cycle_monitor(trace.states, impacts=trace.impact_indices)

    typer.echo(f"Steps taken: {summary.impacts}")
    typer.echo(f"Control steps: {summary.steps}")
    typer.echo(f"Distance: {summary.distance:.4f} m")
    typer.echo(f"Fell: {'yes' if summary.fell else 'no'}")
    typer.echo(f"Cycle violations: {len(report.violations)}")
    typer.echo(f"Return: {summary.total_return:.4f}")
    typer.echo(f"Trace written to {trace_path}")


@app.command(help="Train one PPO policy under a reward setup.")
def train(
    setup: str | None = typer.Option(
        None, "--setup", help="sparse, for, or, for_plus_or."
    ),
    seed: int | None = typer.Option(None, "--seed"),
    steps: int | None = typer.Option(None, "--steps", help="Environment steps."),
    eval_every: int | None = typer.Option(
        None, "--eval-every", help="PPO updates between deterministic evaluations."
    ),
    dt: float | None = DtOption,
    strict_orthant: bool | None = StrictOption,
    out: Path | None = OutOption,
    config: Path | None = ConfigOption,
):
    settings = settings_or_exit(
        config,
        setup=setup,
        seed=seed,
        steps=steps,
        eval_every=eval_every,
        dt=dt,
        strict_orthant=strict_orthant,
        out=out,
    )
    directory = run_directory(settings.out, settings.setup, settings.seed)
    try:
        env_config = settings.env_config()
        train_config = settings.train_config()
    except ValidationError as e:
        raise fail(f"Invalid settings: {e}")

    with tqdm(total=0, desc=f"Training {settings.setup} seed {settings.seed}") as pbar:
        progress = lambda current, total: progress_tracking(current, total, pbar)
        try:
            train_run(directory, env_config, train_config, progress)
        except NonFiniteLossError as e:
            raise fail(f"Training aborted: {e}. Partial log written to {directory}")
        except OrthantGaitError as e:
            raise fail(f"Training failed: {e}")

    typer.echo(f"Run written to {directory}")


@app.command(name="evaluate", help="Evaluate a saved policy deterministically.")
def evaluate_policy(
    checkpoint: Path = typer.Argument(..., help="checkpoint.json written by train."),
    episodes: int = typer.Option(1, "--episodes", min=1),
    trace_out: Path | None = typer.Option(
        None, "--trace-out", help="Write the state trace of one episode here."
    ),
):
    try:
        policy, _, env_config = load_checkpoint(checkpoint)
        result = evaluate(policy, env_config, episodes=episodes)
    except OrthantGaitError as e:
        raise fail(f"Evaluation failed: {e}")

    typer.echo(f"Distance: {result.distance:.4f} m")
    typer.echo(f"Return: {result.mean_return:.4f}")
    typer.echo(f"Falls: {sum(result.fell)}/{episodes}")
    if trace_out:
        rollout(env_config, PolicyController(policy)).write_csv(trace_out)
        typer.echo(f"Trace written to {trace_out}")


@app.command(help="Train every (setup, seed) pair and aggregate the results.")
def experiment(
    setups: str | None = typer.Option(
        None, "--setups", help="Comma-separated reward setups (default all four)."
    ),
    seeds: str | None = typer.Option(
        None, "--seeds", help="Comma-separated seeds (default 0..14)."
    ),
    steps: int | None = typer.Option(None, "--steps", help="Environment steps per run."),
    jobs: int | None = typer.Option(None, "--jobs", "-j", help="Parallel runs."),
    phi: float | None = typer.Option(None, "--phi", help="Baseline virtual slope."),
    eval_every: int | None = typer.Option(None, "--eval-every"),
    shared_baseline: bool | None = typer.Option(
        None,
        "--shared-baseline/--per-setup-baseline",
        help="Normalise every setup by the sparse-setup baseline return.",
    ),
    dt: float | None = DtOption,
    strict_orthant: bool | None = StrictOption,
    out: Path | None = OutOption,
    config: Path | None = ConfigOption,
):
    settings = settings_or_exit(
        config,
        setups=setups,
        seeds=seeds,
        steps=steps,
        jobs=jobs,
        phi=phi,
        eval_every=eval_every,
        shared_baseline=shared_baseline,
        dt=dt,
        strict_orthant=strict_orthant,
        out=out,
    )
    try:
        spec = ExperimentSpec(
            setups=settings.setups,
            seeds=settings.seeds,
            steps_per_run=settings.steps,
            dt_control=settings.dt,
            strict_orthant=settings.strict_orthant,
            phi=settings.phi,
            eval_every=settings.eval_every,
            shared_baseline=settings.shared_baseline,
            output_dir=settings.out,
        )
    except ValidationError as e:
        raise fail(f"Invalid experiment: {e}")

    with tqdm(total=0, desc="Runs") as pbar:
        progress = lambda current, total: progress_tracking(current, total, pbar)
        try:
            report, outcomes = run_experiment(spec, settings.jobs, progress)
        except (OrthantGaitError, ValueError) as e:
            raise fail(f"Experiment failed: {e}")

    for outcome in outcomes:
        if outcome.status == "failed":
            typer.echo(
                f"Run {outcome.setup} seed {outcome.seed} failed: {outcome.error}",
                err=True,
            )
    typer.echo(f"Baseline distance: {report.baseline_distance:.4f} m")
    for name, setup_report in report.setups.items():
        best = setup_report.max_best_distance
        typer.echo(
            f"{name}: {len(setup_report.completed_seeds)} runs, best distance "
            f"{'n/a' if best is None else f'{best:.4f} m'}"
        )
    typer.echo(f"Results written to {spec.output_dir}")


def main() -> None:
    logging.basicConfig(
        level=logging.WARNING, format="%(asctime)s %(levelname)s %(name)s: %(message)s"
    )
    app()


if __name__ == "__main__":
    main()
