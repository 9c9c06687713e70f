"""Task-space positions of the hip and swing foot, and the ground-contact predicate.

Sign convention: hip = stance_foot + l(-sin θ1, cos θ1) and
swing_foot = hip + l(sin θ2, -cos θ2). Forward walking is +x with θ̇1 <= 0.
"""

import math

from orthant_gait.plant.model import HipPose, SwingFootPose, WalkerParams, WalkerState

DEFAULT_EPS_FRONT = 1e-3


def hip_pose(params: WalkerParams, state: WalkerState) -> HipPose:
    l = params.l
    s1, c1 = math.sin(state.theta1), math.cos(state.theta1)
    return HipPose(
        px=state.stance_foot_x - l * s1,
        py=l * c1,
        vx=-l * c1 * state.dtheta1,
        vy=-l * s1 * state.dtheta1,
    )


def swing_foot_pose(params: WalkerParams, state: WalkerState) -> SwingFootPose:
    l = params.l
    hip = hip_pose(params, state)
    s2, c2 = math.sin(state.theta2), math.cos(state.theta2)
    return SwingFootPose(
        x=hip.px + l * s2,
        y=hip.py - l * c2,
        vy=hip.vy + l * s2 * state.dtheta2,
    )


def contact_predicate(
    params: WalkerParams, state: WalkerState, eps_front: float = DEFAULT_EPS_FRONT
) -> bool:
    """Swing foot in front of the stance foot, at or below the ground, moving down.

    Mid-swing scuffing (foot below ground while still behind the stance foot) is
    ignored; eps_front keeps the legs-aligned configuration from counting as contact.
    """
    if eps_front <= 0:
        raise ValueError("eps_front must be positive")
    foot = swing_foot_pose(params, state)
    return (
        foot.x - state.stance_foot_x > eps_front and foot.y <= 0.0 and foot.vy < 0.0
    )
