"""Continuous-time equations of motion of the compass walker.

    M(θ) θ̈ + C(θ, θ̇) θ̇ + g(θ) = S u

with θ = [θ1, θ2] the stance and swing leg angles measured from the upright.
All 2x2 solves use closed forms guarded by a determinant check.
"""

import math

import numpy as np

from orthant_gait.errors import SingularMassError
from orthant_gait.plant.model import Control, WalkerParams, WalkerState

MASS_DET_TOLERANCE = 1e-12

ACTUATION_MATRIX = np.array([[1.0, 1.0], [0.0, -1.0]])


def mass_matrix(params: WalkerParams, state: WalkerState) -> np.ndarray:
    m, l = params.leg_mass, params.l
    m11 = params.hip_mass * l**2 + m * params.a**2 + m * l**2
    m12 = -params.mbl * math.cos(state.theta1 - state.theta2)
    m22 = m * params.b**2
    return np.array([[m11, m12], [m12, m22]])


def coriolis_matrix(params: WalkerParams, state: WalkerState) -> np.ndarray:
    s = params.mbl * math.sin(state.theta1 - state.theta2)
    return np.array([[0.0, -s * state.dtheta2], [s * state.dtheta1, 0.0]])


def gravity_vector(params: WalkerParams, state: WalkerState) -> np.ndarray:
    g = params.gravity
    return np.array(
        [
            -g * params.stance_moment * math.sin(state.theta1),
            g * params.leg_mass * params.b * math.sin(state.theta2),
        ]
    )


def actuation(u: Control) -> np.ndarray:
    return ACTUATION_MATRIX @ u.as_array()


def solve2(
    matrix: np.ndarray, rhs: np.ndarray, det_tolerance: float
) -> np.ndarray | None:
    """Cramer's rule for a 2x2 system. Returns None when |det| < det_tolerance."""
    (a11, a12), (a21, a22) = matrix
    det = a11 * a22 - a12 * a21
    if abs(det) < det_tolerance:
        return None
    return np.array(
        [
            (rhs[0] * a22 - a12 * rhs[1]) / det,
            (a11 * rhs[1] - a21 * rhs[0]) / det,
        ]
    )


def accelerations(params: WalkerParams, state: WalkerState, u: Control) -> np.ndarray:
    mass = mass_matrix(params, state)
    rhs = (
        actuation(u)
        - coriolis_matrix(params, state) @ state.dtheta
        - gravity_vector(params, state)
    )
    ddtheta = solve2(mass, rhs, MASS_DET_TOLERANCE)
    if ddtheta is None:
        raise SingularMassError(f"Mass matrix is singular at {state}")
    return ddtheta


def phase_derivative(
    params: WalkerParams, x: np.ndarray, u: Control, stance_foot_x: float = 0.0
) -> np.ndarray:
    """dx/dt for the phase vector x = [θ1, θ2, θ̇1, θ̇2]."""
    ddtheta = accelerations(params, WalkerState.from_phase(x, stance_foot_x), u)
    return np.array([x[2], x[3], ddtheta[0], ddtheta[1]])


def kinetic_energy(params: WalkerParams, state: WalkerState) -> float:
    dtheta = state.dtheta
    return 0.5 * float(dtheta @ mass_matrix(params, state) @ dtheta)


def potential_energy(params: WalkerParams, state: WalkerState) -> float:
    """U(θ) with ∇U = gravity_vector, zero reference at ground level."""
    return params.gravity * (
        params.stance_moment * math.cos(state.theta1)
        - params.leg_mass * params.b * math.cos(state.theta2)
    )


def total_energy(params: WalkerParams, state: WalkerState) -> float:
    return kinetic_energy(params, state) + potential_energy(params, state)
