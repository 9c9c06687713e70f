import math
from dataclasses import dataclass

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from typing_extensions import Self


class WalkerParams(BaseModel):
    """Physical parameters of the compass walker.

    The defaults are the walker used in every experiment: a 1 kg hip, 0.5 kg legs
    with the leg mass halfway down a 1 m leg, on Earth gravity.
    """

    model_config = ConfigDict(frozen=True)

    hip_mass: float = Field(1.0, gt=0)
    leg_mass: float = Field(0.5, gt=0)
    a: float = Field(0.5, gt=0, description="foot to leg mass point (m)")
    b: float = Field(0.5, gt=0, description="leg mass point to hip (m)")
    leg_length: float | None = Field(None, description="must equal a + b")
    gravity: float = Field(9.81, gt=0)

    @model_validator(mode="after")
    def check_leg_length(self) -> Self:
        expected = self.a + self.b
        if self.leg_length is None:
            object.__setattr__(self, "leg_length", expected)
        elif not math.isclose(self.leg_length, expected, rel_tol=1e-12, abs_tol=0.0):
            raise ValueError(
                f"leg_length {self.leg_length} must equal a + b = {expected}"
            )
        return self

    @property
    def l(self) -> float:
        return self.leg_length

    @property
    def stance_moment(self) -> float:
        """m_H l + m a + m l, the gravity moment arm sum of the stance leg."""
        return self.hip_mass * self.l + self.leg_mass * (self.a + self.l)

    @property
    def mbl(self) -> float:
        return self.leg_mass * self.b * self.l


@dataclass(frozen=True, slots=True)
class WalkerState:
    theta1: float
    theta2: float
    dtheta1: float
    dtheta2: float
    # world x of the pinned stance foot, only moved by impacts
    stance_foot_x: float = 0.0

    def __post_init__(self):
        for value in (
            self.theta1,
            self.theta2,
            self.dtheta1,
            self.dtheta2,
            self.stance_foot_x,
        ):
            if not math.isfinite(value):
                raise ValueError(f"Non-finite walker state: {self}")

    @property
    def phase(self) -> np.ndarray:
        return np.array([self.theta1, self.theta2, self.dtheta1, self.dtheta2])

    @property
    def theta(self) -> np.ndarray:
        return np.array([self.theta1, self.theta2])

    @property
    def dtheta(self) -> np.ndarray:
        return np.array([self.dtheta1, self.dtheta2])

    @classmethod
    def from_phase(cls, x, stance_foot_x: float = 0.0) -> "WalkerState":
        return cls(float(x[0]), float(x[1]), float(x[2]), float(x[3]), stance_foot_x)


@dataclass(frozen=True, slots=True)
class HipPose:
    px: float
    py: float
    vx: float
    vy: float


@dataclass(frozen=True, slots=True)
class SwingFootPose:
    x: float
    y: float
    vy: float


@dataclass(frozen=True, slots=True)
class Control:
    u1: float = 0.0  # hip torque
    u2: float = 0.0  # ankle torque

    def as_array(self) -> np.ndarray:
        return np.array([self.u1, self.u2])

    def clipped(self, u_max: float) -> "Control":
        return Control(
            float(np.clip(self.u1, -u_max, u_max)),
            float(np.clip(self.u2, -u_max, u_max)),
        )

    @classmethod
    def from_array(cls, u) -> "Control":
        return cls(float(u[0]), float(u[1]))


@dataclass(frozen=True, slots=True)
class ImpactEvent:
    alpha: float
    pre_state: WalkerState
    post_state: WalkerState
    time: float = 0.0
