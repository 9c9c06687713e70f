import json

import pytest
from pydantic import ValidationError

from orthant_gait.env import EnvConfig, VirtualGravityController, read_frame_csv, rollout, write_frame_csv
from orthant_gait.errors import ConfigFileError, NonFiniteLossError
from orthant_gait.harness import (
    ExperimentSpec,
    RunSettings,
    baseline_frame,
    baseline_returns,
    load_settings,
    read_config_file,
    run_experiment,
)
from orthant_gait.harness import experiment as experiment_module

SUMMARY_FILES = [
    "learning_curves.csv",
    "learning_curves_raw.csv",
    "distances.csv",
    "stddev.csv",
    "baseline.csv",
]


@pytest.fixture(scope="module")
def smoke_experiment(tmp_path_factory):
    spec = ExperimentSpec(
        setups=("for_plus_or",),
        seeds=(0,),
        steps_per_run=4096,
        output_dir=tmp_path_factory.mktemp("experiment"),
    )
    report, outcomes = run_experiment(spec)
    return spec, report, outcomes


def test_config_file_parsing(tmp_path):
    path = tmp_path / "run.conf"
    path.write_text(
        "# sweep settings\n"
        "setups = sparse, for_plus_or\n"
        "\n"
        "strict-orthant = true   # punish staying\n"
        "steps = 4096\n"
    )
    assert read_config_file(path) == {
        "setups": "sparse, for_plus_or",
        "strict_orthant": "true",
        "steps": "4096",
    }
    settings = load_settings(path)
    assert settings.setups == ("sparse", "for_plus_or")
    assert settings.strict_orthant is True
    assert settings.steps == 4096


def test_flags_override_config_file(tmp_path):
    path = tmp_path / "run.conf"
    path.write_text("seed = 3\nsteps = 4096\n")
    settings = load_settings(path, seed=7, steps=None)
    assert (settings.seed, settings.steps) == (7, 4096)


def test_config_file_rejects_malformed_line(tmp_path):
    path = tmp_path / "run.conf"
    path.write_text("steps 4096\n")
    with pytest.raises(ConfigFileError):
        read_config_file(path)


def test_config_file_rejects_duplicate_key(tmp_path):
    path = tmp_path / "run.conf"
    path.write_text("seed = 1\nseed = 2\n")
    with pytest.raises(ConfigFileError):
        read_config_file(path)


def test_unknown_setting_is_an_error(tmp_path):
    path = tmp_path / "run.conf"
    path.write_text("learning_rate = 0.1\n")
    with pytest.raises(ValidationError):
        load_settings(path)


def test_settings_defaults():
    settings = RunSettings()
    assert settings.seeds == tuple(range(15))
    assert settings.setups == ("sparse", "for", "or", "for_plus_or")
    assert settings.env_config().reward_setup.name == "for_plus_or"
    assert settings.train_config(seed=4).seed == 4


def test_experiment_spec_validation(tmp_path):
    with pytest.raises(ValidationError):
        ExperimentSpec(setups=(), output_dir=tmp_path)
    with pytest.raises(ValidationError):
        ExperimentSpec(seeds=(1, 1), output_dir=tmp_path)
    with pytest.raises(ValidationError):
        ExperimentSpec(setups=("backward",), output_dir=tmp_path)


def test_output_dir_must_be_a_directory(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    with pytest.raises(ValidationError):
        ExperimentSpec(output_dir=blocker)


def test_baseline_normalises_to_one(tmp_path):
    spec = ExperimentSpec(setups=("sparse", "for", "or", "for_plus_or"), output_dir=tmp_path)
    baseline = baseline_frame(spec)
    divisors = baseline_returns(spec, baseline)
    for setup, value in zip(baseline["setup"], baseline["return"]):
        assert value / divisors[setup] == 1.0
    assert baseline["distance"].nunique() == 1


def test_shared_baseline_uses_sparse_return(tmp_path):
    spec = ExperimentSpec(setups=("for", "or"), shared_baseline=True, output_dir=tmp_path)
    baseline = baseline_frame(spec)
    divisors = baseline_returns(spec, baseline)
    sparse = baseline[baseline["setup"] == "sparse"]["return"].iloc[0]
    assert divisors == {"for": sparse, "or": sparse}


def test_smoke_experiment_report(smoke_experiment):
    spec, report, outcomes = smoke_experiment
    assert [outcome.status for outcome in outcomes] == ["trained"]
    setup_report = report.setups["for_plus_or"]
    assert setup_report.steps == [2048, 4096]
    assert len(setup_report.mean_normalized_return) == 2
    assert setup_report.completed_seeds == [0]
    assert setup_report.reward_std is None
    assert report.normalization == "per-setup"

    curves = read_frame_csv(spec.output_dir / "learning_curves.csv")
    assert len(curves[curves["setup"] == "for_plus_or"]) == 2
    for name in SUMMARY_FILES + ["report.json", "plot_learning_curves.py", "plot_distances.py"]:
        assert (spec.output_dir / name).exists()


def test_baseline_row_matches_simulation(smoke_experiment):
    spec, report, _ = smoke_experiment
    distances = read_frame_csv(spec.output_dir / "distances.csv")
    baseline = distances[distances["setup"] == "baseline"]
    config = EnvConfig()
    expected = rollout(config, VirtualGravityController(config.params)).distance
    assert baseline["seed"].tolist() == [-1]
    assert baseline["distance"].iloc[0] == expected
    assert report.baseline_distance == expected


@pytest.mark.parametrize("name", SUMMARY_FILES)
def test_csv_artifacts_round_trip(smoke_experiment, tmp_path, name):
    spec, _, _ = smoke_experiment
    original = spec.output_dir / name
    copy = tmp_path / name
    write_frame_csv(read_frame_csv(original), copy)
    assert copy.read_bytes() == original.read_bytes()


def test_rerun_skips_completed_runs(smoke_experiment, monkeypatch):
    spec, report, _ = smoke_experiment
    before = (spec.output_dir / "report.json").read_text()

    def no_training(*args, **kwargs):
        raise AssertionError("completed run was retrained")

    monkeypatch.setattr(experiment_module, "train_run", no_training)
    again, outcomes = run_experiment(spec)

    assert [outcome.status for outcome in outcomes] == ["skipped"]
    assert again == report
    assert (spec.output_dir / "report.json").read_text() == before


def test_failed_run_is_recorded_and_skipped(tmp_path, monkeypatch):
    def failing(directory, *args, **kwargs):
        directory.mkdir(parents=True, exist_ok=True)
        raise NonFiniteLossError("policy loss is nan")

    monkeypatch.setattr(experiment_module, "train_run", failing)
    spec = ExperimentSpec(setups=("sparse",), seeds=(0,), steps_per_run=2048, output_dir=tmp_path)
    report, outcomes = run_experiment(spec)

    assert outcomes[0].status == "failed"
    marker = json.loads((spec.run_dir("sparse", 0) / "failed.json").read_text())
    assert marker["error"] == "policy loss is nan"
    assert report.setups["sparse"].failed_seeds == [0]
    assert report.setups["sparse"].completed_seeds == []
    assert report.setups["sparse"].max_best_distance is None
    assert (tmp_path / "learning_curves.csv").exists()


def test_unexpected_crash_is_recorded_as_failed_run(tmp_path, monkeypatch):
    def crashing(directory, *args, **kwargs):
        raise RuntimeError("worker crashed")

    monkeypatch.setattr(experiment_module, "train_run", crashing)
    spec = ExperimentSpec(
        setups=("sparse",), seeds=(0, 1), steps_per_run=2048, output_dir=tmp_path
    )
    outcomes = experiment_module.run_all(spec)

    assert [outcome.status for outcome in outcomes] == ["failed", "failed"]
    assert outcomes[0].error == "worker crashed"
    marker = json.loads((spec.run_dir("sparse", 1) / "failed.json").read_text())
    assert marker == {"setup": "sparse", "seed": 1, "error": "worker crashed"}


@pytest.mark.slow
def test_orthant_rewards_beat_sparse(tmp_path):
    spec = ExperimentSpec(
        setups=("sparse", "for_plus_or"),
        seeds=(0, 1, 2),
        steps_per_run=200_000,
        output_dir=tmp_path,
    )
    report, _ = run_experiment(spec, jobs=3)
    median = {
        setup: sorted(report.setups[setup].best_distances.values())[1]
        for setup in spec.setups
    }
    assert median["for_plus_or"] > median["sparse"]
    assert median["for_plus_or"] > report.baseline_distance
    assert median["sparse"] <= report.baseline_distance
