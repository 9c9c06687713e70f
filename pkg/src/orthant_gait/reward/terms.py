"""The individual reward terms.

Heaviside conventions at zero: H(0) = 0 for forward progress (standing still is not
progress), H(0) = 1 for the distance term (granted on the step reaching the horizon)
and for falling (hip at ground level counts as fallen).
"""

import math

from orthant_gait.automaton import PhaseLike, TransitionKind, classify_transition
from orthant_gait.plant import Control, HipPose

REWARDED_TRANSITIONS = frozenset(
    {TransitionKind.CYCLE_ADVANCE, TransitionKind.ENTER, TransitionKind.STAY}
)
STRICTLY_REWARDED_TRANSITIONS = frozenset(
    {TransitionKind.CYCLE_ADVANCE, TransitionKind.ENTER}
)


def heaviside(x: float, at_zero: float) -> float:
    if x > 0:
        return 1.0
    if x < 0:
        return 0.0
    return at_zero


def r_or(x_t: PhaseLike, x_prev: PhaseLike, strict: bool = False) -> float:
    """+1 for entering or following the walking cycle, -1 otherwise.

    With strict=True staying in the same cycle location is punished too.
    """
    kind = classify_transition(x_prev, x_t)
    rewarded = STRICTLY_REWARDED_TRANSITIONS if strict else REWARDED_TRANSITIONS
    return 1.0 if kind in rewarded else -1.0


def r_for(p_t: HipPose, p_prev: HipPose) -> float:
    return 2.0 * heaviside(p_t.px - p_prev.px, at_zero=0.0) - 1.0


def r_jerk(u_t: Control, u_prev: Control) -> float:
    return math.hypot(u_t.u1 - u_prev.u1, u_t.u2 - u_prev.u2)


def r_dist(p_t: HipPose, t: float, horizon: float) -> float:
    return p_t.px * heaviside(t - horizon, at_zero=1.0)


def r_fall(p_t: HipPose) -> float:
    return heaviside(-p_t.py, at_zero=1.0)
