import math
from abc import ABC, abstractmethod
from collections.abc import Callable

from orthant_gait.plant import Control, WalkerParams, WalkerState

DEFAULT_PHI = -0.07


class Controller(ABC):
    """Maps the full walker state to a joint torque command."""

    def __init__(self):
        super().__init__()

    @abstractmethod
    def control(self, state: WalkerState) -> Control:
        raise NotImplementedError()

    def __call__(self, state: WalkerState) -> Control:
        return self.control(state)


def virtual_gravity_control(
    params: WalkerParams, state: WalkerState, phi: float = DEFAULT_PHI
) -> Control:
    """Torques emulating passive walking down a slope of angle phi on flat ground.

    Solves S u = [(m_H l + m(a + l)) cos θ1, -m b cos θ2] g tan(phi) for u.
    """
    scale = params.gravity * math.tan(phi)
    rhs1 = params.stance_moment * math.cos(state.theta1) * scale
    rhs2 = -params.leg_mass * params.b * math.cos(state.theta2) * scale
    u2 = -rhs2
    return Control(u1=rhs1 - u2, u2=u2)


class VirtualGravityController(Controller):
    def __init__(self, params: WalkerParams, phi: float = DEFAULT_PHI):
        self.params = params
        self.phi = phi
        super().__init__()

    def control(self, state: WalkerState) -> Control:
        return virtual_gravity_control(self.params, state, self.phi)


class ZeroController(Controller):
    def control(self, state: WalkerState) -> Control:
        return Control(0.0, 0.0)


class FunctionController(Controller):
    def __init__(self, function: Callable[[WalkerState], Control]):
        self.function = function
        super().__init__()

    def control(self, state: WalkerState) -> Control:
        return self.function(state)
