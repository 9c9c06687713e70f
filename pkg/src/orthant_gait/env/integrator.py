"""Fixed-step RK4 integration of the walker with event handling at heel strike.

Torques are held constant over a control period. After every substep the contact
predicate is checked; when it fires, the impact time inside the substep is found by
bisection on the swing-foot height, the impact map is applied and integration
continues for the rest of the substep.
"""

import logging
from collections.abc import Callable

import numpy as np

from orthant_gait.errors import SimulationError
from orthant_gait.plant import (
    Control,
    ImpactEvent,
    WalkerParams,
    WalkerState,
    contact_predicate,
    impact_map,
    phase_derivative,
    swing_foot_pose,
)

logger = logging.getLogger("__main__." + __name__)

HEIGHT_TOLERANCE = 1e-8
MAX_BISECTIONS = 60


def rk4_step(
    f: Callable[[np.ndarray], np.ndarray], x: np.ndarray, h: float
) -> np.ndarray:
    k1 = f(x)
    k2 = f(x + 0.5 * h * k1)
    k3 = f(x + 0.5 * h * k2)
    k4 = f(x + h * k3)
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


class HybridIntegrator:
    def __init__(
        self,
        params: WalkerParams,
        eps_front: float,
        max_impacts: int = 2,
    ):
        self.params = params
        self.eps_front = eps_front
        self.max_impacts = max_impacts

    def flow(self, state: WalkerState, u: Control, h: float) -> WalkerState:
        """One RK4 step of the smooth dynamics, stance foot fixed."""
        foot_x = state.stance_foot_x

        def f(x: np.ndarray) -> np.ndarray:
            return phase_derivative(self.params, x, u, foot_x)

        return WalkerState.from_phase(rk4_step(f, state.phase, h), foot_x)

    def _swing_height(self, state: WalkerState) -> float:
        return swing_foot_pose(self.params, state).y

    def locate_impact(
        self, start: WalkerState, u: Control, h: float
    ) -> tuple[float, WalkerState]:
        """Bisect the time in (0, h] at which the swing foot reaches the ground."""
        lo, hi = 0.0, h
        hi_state = self.flow(start, u, h)
        for _ in range(MAX_BISECTIONS):
            mid = 0.5 * (lo + hi)
            mid_state = self.flow(start, u, mid)
            height = self._swing_height(mid_state)
            if abs(height) < HEIGHT_TOLERANCE:
                return mid, mid_state
            if height > 0:
                lo = mid
            else:
                hi, hi_state = mid, mid_state
        logger.warning(
            f"Impact bisection stopped after {MAX_BISECTIONS} halvings with "
            f"height {self._swing_height(hi_state):.3e}"
        )
        return hi, hi_state

    def advance(
        self,
        state: WalkerState,
        u: Control,
        dt: float,
        substeps: int,
        t0: float = 0.0,
    ) -> tuple[WalkerState, list[ImpactEvent]]:
        """Integrate one control period of length dt with u held constant."""
        h = dt / substeps
        impacts: list[ImpactEvent] = []
        elapsed = 0.0

        for _ in range(substeps):
            remaining = h
            while remaining > 0.0:
                candidate = self.flow(state, u, remaining)
                if not contact_predicate(self.params, candidate, self.eps_front):
                    state = candidate
                    elapsed += remaining
                    break

                if self._swing_height(state) > 0.0:
                    tau, pre = self.locate_impact(state, u, remaining)
                else:
                    logger.warning(
                        f"Contact at t={t0 + elapsed + remaining:.4f}s without a "
                        "height sign change; applying impact at substep end"
                    )
                    tau, pre = remaining, candidate

                elapsed += tau
                event = impact_map(self.params, pre, time=t0 + elapsed)
                impacts.append(event)
                if len(impacts) > self.max_impacts:
                    raise SimulationError(
                        f"More than {self.max_impacts} impacts within one control "
                        f"period ending at t={t0 + dt:.4f}s"
                    )
                state = event.post_state
                remaining -= tau

        return state, impacts
