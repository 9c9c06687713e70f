"""Compass-gait walker simulation, orthant-cycle rewards and PPO training."""
