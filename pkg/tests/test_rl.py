import json
import math
import warnings
from dataclasses import asdict

import numpy as np
import pytest
import torch
from pydantic import ValidationError

from orthant_gait.env import EnvConfig, VirtualGravityController, rollout
from orthant_gait.errors import CheckpointError, NonFiniteLossError
from orthant_gait.rl import (
    ActorCritic,
    Minibatch,
    RolloutBuffer,
    TrainConfig,
    TrainingLog,
    act,
    compute_gae,
    evaluate,
    load_checkpoint,
    make_optimizer,
    ppo_losses,
    ppo_update,
    save_checkpoint,
    seeded_generators,
    train,
)
from orthant_gait.rl import trainer as trainer_module

SMALL_TRAIN = TrainConfig(
    total_steps=256, n_steps=128, minibatch_size=32, epochs_per_update=2, eval_every=1
)
SHORT_EPISODES = EnvConfig(horizon=0.5)


def filled_buffer(rewards, values, terminated=None, truncated=None, next_values=None):
    n = len(rewards)
    buffer = RolloutBuffer(n)
    terminated = terminated or [False] * n
    truncated = truncated or [False] * n
    next_values = next_values or [0.0] * n
    for t in range(n):
        buffer.add(
            np.zeros(4),
            np.zeros(2),
            0.0,
            rewards[t],
            values[t],
            terminated[t],
            truncated[t],
            next_values[t],
        )
    return buffer


def frozen_minibatch(policy: ActorCritic, seed: int = 0, size: int = 16) -> Minibatch:
    rng = np.random.default_rng(seed)
    observations = rng.normal(size=(size, 4))
    actions = rng.normal(size=(size, 2))
    with torch.no_grad():
        log_probs = policy.log_prob(
            torch.as_tensor(observations), torch.as_tensor(actions)
        ).numpy()
    return Minibatch(
        observations=observations,
        actions=actions,
        # keep every ratio inside the clip range so the surrogate is smooth
        old_log_probs=log_probs + rng.uniform(-0.05, 0.05, size),
        advantages=rng.normal(size=size),
        returns=rng.normal(size=size),
    )


def test_train_config_defaults():
    config = TrainConfig()
    assert (config.n_steps, config.minibatch_size, config.epochs_per_update) == (2048, 64, 10)
    assert (config.gamma, config.gae_lambda, config.clip_eps) == (0.99, 0.95, 0.2)
    assert config.n_updates == math.ceil(500_000 / 2048)


def test_step_budget_rounds_up_to_whole_rollouts():
    assert TrainConfig(total_steps=3000).n_updates == 2
    assert TrainConfig(total_steps=4096).n_updates == 2
    assert TrainConfig(total_steps=1).n_updates == 1


def test_train_warns_about_partial_rollout(caplog):
    config = TrainConfig(total_steps=100, n_steps=64, minibatch_size=16, epochs_per_update=1)
    with caplog.at_level("WARNING"):
        _, log = train(SHORT_EPISODES, config)
    assert "not a multiple of n_steps=64" in caplog.text
    assert len(log.updates) == 2


def test_train_config_requires_divisible_rollout():
    with pytest.raises(ValidationError):
        TrainConfig(n_steps=100, minibatch_size=64)


@pytest.mark.parametrize("gamma", [0.0, 1.5])
def test_train_config_rejects_discount(gamma):
    with pytest.raises(ValidationError):
        TrainConfig(gamma=gamma)


def test_network_shapes():
    policy = ActorCritic()
    shapes = {name: tuple(p.shape) for name, p in policy.state_dict().items()}
    assert shapes["actor.0.weight"] == (64, 4)
    assert shapes["actor.4.weight"] == (2, 64)
    assert shapes["critic.4.weight"] == (1, 64)
    assert shapes["log_std"] == (2,)
    assert all(p.dtype == torch.float64 for p in policy.parameters())


def test_log_std_is_clamped():
    policy = ActorCritic(log_std_init=5.0)
    assert torch.allclose(policy.std(), torch.exp(torch.tensor(2.0, dtype=torch.float64)))


def test_deterministic_action_is_the_mean():
    policy = ActorCritic(generator=torch.Generator().manual_seed(0))
    observation = np.array([0.1, -0.2, 0.3, 0.4])
    first, _, _ = act(policy, observation, stochastic=False)
    second, _, _ = act(policy, observation, stochastic=False)
    assert first == second
    np.testing.assert_array_equal(first.as_array(), policy.mean_action(observation))


def test_stochastic_action_is_reproducible():
    policy = ActorCritic(generator=torch.Generator().manual_seed(0))
    observation = np.array([0.1, -0.2, 0.3, 0.4])
    a = act(policy, observation, True, torch.Generator().manual_seed(5))
    b = act(policy, observation, True, torch.Generator().manual_seed(5))
    assert a == b


def test_log_prob_matches_gaussian_density():
    policy = ActorCritic(log_std_init=-0.5, generator=torch.Generator().manual_seed(1))
    observation = np.array([0.3, 0.1, -0.7, 1.2])
    control, log_prob, value = act(policy, observation, True, torch.Generator().manual_seed(2))

    mean = policy.mean_action(observation)
    sigma = math.exp(-0.5)
    z = (control.as_array() - mean) / sigma
    expected = float(-0.5 * np.sum(z**2) - 2 * math.log(sigma) - math.log(2 * math.pi))
    assert log_prob == pytest.approx(expected, rel=1e-10)
    assert value == pytest.approx(policy.predict_value(observation))


def test_gae_without_discount_is_one_step_error():
    buffer = filled_buffer([1.0, -2.0, 0.5], [0.3, 0.1, -0.4])
    advantages, returns = compute_gae(buffer, gamma=0.0, lam=0.95, bootstrap_value=7.0)
    np.testing.assert_allclose(advantages, [0.7, -2.1, 0.9])
    np.testing.assert_allclose(returns, [1.0, -2.0, 0.5])


def test_gae_with_zero_lambda_is_td_error():
    rewards, values = [1.0, -2.0, 0.5], [0.3, 0.1, -0.4]
    buffer = filled_buffer(rewards, values)
    advantages, _ = compute_gae(buffer, gamma=0.9, lam=0.0, bootstrap_value=2.0)
    expected = [
        1.0 + 0.9 * 0.1 - 0.3,
        -2.0 + 0.9 * -0.4 - 0.1,
        0.5 + 0.9 * 2.0 + 0.4,
    ]
    np.testing.assert_allclose(advantages, expected)


def test_gae_matches_hand_recursion():
    rewards, values = [0.2, 1.0, -0.5], [0.5, -0.1, 0.3]
    gamma, lam, bootstrap = 0.9, 0.8, 0.6
    buffer = filled_buffer(rewards, values)
    advantages, returns = compute_gae(buffer, gamma, lam, bootstrap)

    d2 = -0.5 + gamma * bootstrap - 0.3
    d1 = 1.0 + gamma * 0.3 + 0.1
    d0 = 0.2 + gamma * -0.1 - 0.5
    a2 = d2
    a1 = d1 + gamma * lam * a2
    a0 = d0 + gamma * lam * a1
    np.testing.assert_allclose(advantages, [a0, a1, a2])
    np.testing.assert_allclose(returns, np.array([a0, a1, a2]) + values)


def test_gae_with_unit_parameters_is_monte_carlo():
    rewards, values = [1.0, 2.0, 3.0, 4.0], [0.5, -1.0, 2.0, 0.0]
    buffer = filled_buffer(rewards, values, terminated=[False, False, False, True])
    advantages, returns = compute_gae(buffer, 1.0, 1.0, bootstrap_value=100.0)
    np.testing.assert_allclose(returns, [10.0, 9.0, 7.0, 4.0])
    np.testing.assert_allclose(advantages, np.array([10.0, 9.0, 7.0, 4.0]) - values)


def test_gae_fall_does_not_bootstrap_but_truncation_does():
    fell = filled_buffer([1.0, 1.0], [0.0, 0.0], terminated=[True, False])
    cut = filled_buffer(
        [1.0, 1.0], [0.0, 0.0], truncated=[True, False], next_values=[5.0, 0.0]
    )
    fell_adv, _ = compute_gae(fell, 0.5, 1.0, bootstrap_value=0.0)
    cut_adv, _ = compute_gae(cut, 0.5, 1.0, bootstrap_value=0.0)
    assert fell_adv[0] == 1.0
    assert cut_adv[0] == 1.0 + 0.5 * 5.0


def test_buffer_rejects_overflow():
    buffer = filled_buffer([0.0], [0.0])
    with pytest.raises(IndexError):
        buffer.add(np.zeros(4), np.zeros(2), 0.0, 0.0, 0.0, False, False)


def test_on_policy_ratio_makes_clipping_inactive():
    policy = ActorCritic(generator=torch.Generator().manual_seed(3))
    batch = frozen_minibatch(policy)
    with torch.no_grad():
        current = policy.log_prob(
            torch.as_tensor(batch.observations), torch.as_tensor(batch.actions)
        ).numpy()
    on_policy = Minibatch(
        batch.observations, batch.actions, current, batch.advantages, batch.returns
    )
    losses = ppo_losses(policy, on_policy, TrainConfig())
    assert float(losses.policy_loss) == pytest.approx(-batch.advantages.mean())
    assert float(losses.clip_fraction) == 0.0
    assert abs(float(losses.approx_kl)) < 1e-12


@pytest.mark.parametrize(
    "loss_name, parameter",
    [
        ("policy_loss", "actor.0.weight"),
        ("policy_loss", "actor.4.bias"),
        ("policy_loss", "log_std"),
        ("value_loss", "critic.0.weight"),
        ("value_loss", "critic.4.weight"),
    ],
)
def test_gradients_match_finite_differences(loss_name, parameter):
    policy = ActorCritic(generator=torch.Generator().manual_seed(4))
    batch = frozen_minibatch(policy, seed=1)
    config = TrainConfig()
    tensor = dict(policy.named_parameters())[parameter]

    policy.zero_grad()
    getattr(ppo_losses(policy, batch, config), loss_name).backward()
    analytic = tensor.grad.reshape(-1).clone()

    h = 1e-6
    flat = tensor.data.reshape(-1)
    for index in range(min(flat.numel(), 6)):
        original = float(flat[index])
        with torch.no_grad():
            flat[index] = original + h
            up = float(getattr(ppo_losses(policy, batch, config), loss_name))
            flat[index] = original - h
            down = float(getattr(ppo_losses(policy, batch, config), loss_name))
            flat[index] = original
        numeric = (up - down) / (2 * h)
        assert float(analytic[index]) == pytest.approx(numeric, rel=1e-4, abs=1e-8)


def test_zero_advantages_leave_the_actor_unchanged():
    policy = ActorCritic(generator=torch.Generator().manual_seed(5))
    rng = np.random.default_rng(0)
    buffer = filled_buffer(list(rng.normal(size=64)), list(rng.normal(size=64)))
    buffer.observations[:] = rng.normal(size=(64, 4))
    buffer.advantages[:] = 0.0
    buffer.returns[:] = rng.normal(size=64)
    actor_before = {k: v.clone() for k, v in policy.actor.state_dict().items()}
    critic_before = {k: v.clone() for k, v in policy.critic.state_dict().items()}
    config = TrainConfig(n_steps=64, minibatch_size=16, epochs_per_update=2)

    metrics = ppo_update(policy, make_optimizer(policy, config), buffer, config, rng)

    for name, value in policy.actor.state_dict().items():
        assert torch.equal(value, actor_before[name])
    assert any(
        not torch.equal(value, critic_before[name])
        for name, value in policy.critic.state_dict().items()
    )
    assert 0.0 <= metrics.clip_fraction <= 1.0
    assert metrics.approx_kl > -1e-6


def test_update_metrics_do_not_convert_graph_tensors():
    policy = ActorCritic(generator=torch.Generator().manual_seed(2))
    rng = np.random.default_rng(4)
    buffer = filled_buffer(list(rng.normal(size=32)), list(rng.normal(size=32)))
    buffer.observations[:] = rng.normal(size=(32, 4))
    buffer.advantages[:] = rng.normal(size=32)
    buffer.returns[:] = rng.normal(size=32)
    config = TrainConfig(n_steps=32, minibatch_size=8, epochs_per_update=1)

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        metrics = ppo_update(policy, make_optimizer(policy, config), buffer, config, rng)

    assert not [w for w in caught if "requires_grad" in str(w.message)]
    assert all(isinstance(value, float) for value in asdict(metrics).values())


def test_non_finite_loss_is_reported():
    policy = ActorCritic()
    config = TrainConfig(n_steps=4, minibatch_size=4, epochs_per_update=1)
    buffer = filled_buffer([0.0] * 4, [0.0] * 4)
    buffer.advantages[:] = 1.0
    buffer.returns[:] = math.nan
    with pytest.raises(NonFiniteLossError):
        ppo_update(policy, make_optimizer(policy, config), buffer, config, np.random.default_rng(0))


def test_seeded_generators_are_reproducible():
    a = seeded_generators(11)
    b = seeded_generators(11)
    assert torch.equal(torch.randn(3, generator=a[1]), torch.randn(3, generator=b[1]))
    assert a[2].integers(1_000_000) == b[2].integers(1_000_000)


def test_single_update_budget(monkeypatch):
    calls = []
    original = trainer_module.ppo_update

    def counting(*args, **kwargs):
        calls.append(1)
        return original(*args, **kwargs)

    monkeypatch.setattr(trainer_module, "ppo_update", counting)
    config = SMALL_TRAIN.model_copy(update={"total_steps": 128})
    _, log = train(SHORT_EPISODES, config)

    assert len(calls) == 1
    assert len(log.updates) == 1
    assert log.updates[0]["step"] == 128
    assert len(log.episodes) >= 2
    assert len(log.evaluations) == 1


def test_training_is_deterministic(tmp_path):
    _, first = train(SHORT_EPISODES, SMALL_TRAIN)
    _, second = train(SHORT_EPISODES, SMALL_TRAIN)
    first.write(tmp_path / "a")
    second.write(tmp_path / "b")
    for name in ("learning_log.csv", "updates.csv", "evaluations.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_learning_log_columns():
    _, log = train(SHORT_EPISODES, SMALL_TRAIN)
    frame = log.learning_frame()
    assert list(frame.columns) == [
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
    assert (frame["length"] <= SHORT_EPISODES.horizon_steps).all()
    assert frame["episode"].tolist() == list(range(1, len(frame) + 1))


def test_non_finite_loss_carries_partial_log(monkeypatch):
    def failing(*args, **kwargs):
        raise NonFiniteLossError("loss is nan")

    monkeypatch.setattr(trainer_module, "ppo_update", failing)
    with pytest.raises(NonFiniteLossError) as info:
        train(SHORT_EPISODES, SMALL_TRAIN)
    assert isinstance(info.value.log, TrainingLog)
    assert len(info.value.log.episodes) >= 2


def test_evaluate_controller_matches_rollout(env_config):
    controller = VirtualGravityController(env_config.params)
    result = evaluate(controller, env_config)
    assert result.distance == rollout(env_config, controller).distance
    assert result.fell == [False]


def test_evaluate_is_deterministic():
    policy = ActorCritic(generator=torch.Generator().manual_seed(6))
    assert evaluate(policy, SHORT_EPISODES) == evaluate(policy, SHORT_EPISODES)


def test_untrained_policy_walks_less_than_baseline(env_config, baseline_trace):
    policy = ActorCritic(generator=torch.Generator().manual_seed(7))
    assert evaluate(policy, env_config).distance < baseline_trace.distance


def test_evaluate_needs_an_episode(env_config):
    with pytest.raises(ValueError):
        evaluate(ActorCritic(), env_config, episodes=0)


def test_checkpoint_round_trip(tmp_path):
    policy = ActorCritic(generator=torch.Generator().manual_seed(8))
    path = tmp_path / "checkpoint.json"
    save_checkpoint(path, policy, SMALL_TRAIN, SHORT_EPISODES)

    loaded, train_config, env_config = load_checkpoint(path)
    assert train_config == SMALL_TRAIN
    assert env_config == SHORT_EPISODES
    for name, value in policy.state_dict().items():
        assert torch.equal(loaded.state_dict()[name], value)

    document = json.loads(path.read_text())
    assert document["format"] == "orthant-gait-checkpoint"
    assert document["version"] == 1
    assert document["parameters"]["log_std"]["shape"] == [2]


def test_checkpoint_rejects_garbage(tmp_path):
    path = tmp_path / "checkpoint.json"
    path.write_text("{not json")
    with pytest.raises(CheckpointError):
        load_checkpoint(path)


def test_checkpoint_rejects_missing_file(tmp_path):
    with pytest.raises(CheckpointError):
        load_checkpoint(tmp_path / "absent.json")


def test_checkpoint_rejects_other_version(tmp_path):
    path = tmp_path / "checkpoint.json"
    save_checkpoint(path, ActorCritic(), SMALL_TRAIN, SHORT_EPISODES)
    document = json.loads(path.read_text())
    document["version"] = 2
    path.write_text(json.dumps(document))
    with pytest.raises(CheckpointError, match="version"):
        load_checkpoint(path)


def test_checkpoint_rejects_shape_mismatch(tmp_path):
    path = tmp_path / "checkpoint.json"
    save_checkpoint(path, ActorCritic(), SMALL_TRAIN, SHORT_EPISODES)
    document = json.loads(path.read_text())
    document["train_config"]["hidden_sizes"] = [32, 32]
    path.write_text(json.dumps(document))
    with pytest.raises(CheckpointError, match="shape"):
        load_checkpoint(path)
