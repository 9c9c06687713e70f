"""Shared pytest fixtures for tests."""

import pytest

from orthant_gait.env import EnvConfig, VirtualGravityController, rollout
from orthant_gait.plant import WalkerParams, WalkerState


def pytest_addoption(parser):
    parser.addoption(
        "--runslow", action="store_true", default=False, help="run slow training tests"
    )


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def params() -> WalkerParams:
    return WalkerParams()


@pytest.fixture
def walker_state() -> WalkerState:
    return WalkerState(0.3, -0.2, -1.1, 0.7, stance_foot_x=0.25)


@pytest.fixture
def env_config() -> EnvConfig:
    return EnvConfig()


@pytest.fixture(scope="session")
def baseline_trace():
    """Full 10 s episode of the virtual-gravity controller on the default walker."""
    config = EnvConfig()
    return rollout(config, VirtualGravityController(config.params))
