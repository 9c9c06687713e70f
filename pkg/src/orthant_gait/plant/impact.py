import logging
import math

import numpy as np

from orthant_gait.errors import SingularImpactError
from orthant_gait.plant.dynamics import solve2
from orthant_gait.plant.kinematics import swing_foot_pose
from orthant_gait.plant.model import ImpactEvent, WalkerParams, WalkerState

logger = logging.getLogger("__main__." + __name__)

IMPACT_DET_TOLERANCE = 1e-10


def impact_matrices(params: WalkerParams, alpha: float) -> tuple[np.ndarray, np.ndarray]:
    """T+(α) and T-(α) of the inelastic heel strike T+ θ̇+ = T- θ̇-."""
    m_h, m = params.hip_mass, params.leg_mass
    a, b, l = params.a, params.b, params.l
    c = math.cos(alpha)
    t_plus = np.array(
        [
            [m_h * l**2 + m * a**2 + m * l * (l - b * c), m * b * (b - l * c)],
            [-m * b * l * c, m * b**2],
        ]
    )
    t_minus = np.array(
        [
            [(m_h * l**2 + 2 * m * a * l) * c - m * a * b, -m * a * b],
            [-m * a * b, 0.0],
        ]
    )
    return t_plus, t_minus


def impact_map(params: WalkerParams, pre: WalkerState, time: float = 0.0) -> ImpactEvent:
    """Heel strike: legs swap roles, velocities jump, stance foot moves one stride.

    The contact condition is the caller's responsibility and is not re-checked.
    """
    alpha = pre.theta1 - pre.theta2
    t_plus, t_minus = impact_matrices(params, alpha)
    dtheta_post = solve2(t_plus, t_minus @ pre.dtheta, IMPACT_DET_TOLERANCE)
    if dtheta_post is None:
        raise SingularImpactError(f"T+({alpha}) is singular at {pre}")

    stride = swing_foot_pose(params, pre).x - pre.stance_foot_x
    post = WalkerState(
        theta1=pre.theta2,
        theta2=pre.theta1,
        dtheta1=float(dtheta_post[0]),
        dtheta2=float(dtheta_post[1]),
        stance_foot_x=pre.stance_foot_x + stride,
    )
    logger.debug(f"Impact at t={time:.4f}s, alpha={alpha:.4f}, stride={stride:.4f}")
    return ImpactEvent(alpha=alpha, pre_state=pre, post_state=post, time=time)
