"""Rigid-body model of the actuated compass walker."""

from .dynamics import (
    accelerations,
    actuation,
    coriolis_matrix,
    gravity_vector,
    kinetic_energy,
    mass_matrix,
    phase_derivative,
    potential_energy,
    total_energy,
)
from .impact import impact_map, impact_matrices
from .kinematics import contact_predicate, hip_pose, swing_foot_pose
from .model import (
    Control,
    HipPose,
    ImpactEvent,
    SwingFootPose,
    WalkerParams,
    WalkerState,
)

__all__ = [
    "WalkerParams",
    "WalkerState",
    "HipPose",
    "SwingFootPose",
    "Control",
    "ImpactEvent",
    "mass_matrix",
    "coriolis_matrix",
    "gravity_vector",
    "actuation",
    "accelerations",
    "phase_derivative",
    "kinetic_energy",
    "potential_energy",
    "total_energy",
    "hip_pose",
    "swing_foot_pose",
    "contact_predicate",
    "impact_matrices",
    "impact_map",
]
