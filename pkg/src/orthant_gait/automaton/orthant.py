"""Orthant classification and the four-location automaton of ideal walking."""

from collections.abc import Sequence
from enum import Enum
from typing import NamedTuple

import bidict

from orthant_gait.errors import NotAnEdgeError
from orthant_gait.plant import WalkerParams, WalkerState, impact_map


class OrthantPattern(NamedTuple):
    """Strict positivity of (θ1, θ2, θ̇1, θ̇2). Exact zeros are non-positive."""

    s1: bool
    s2: bool
    s3: bool
    s4: bool

    @property
    def index(self) -> int:
        return orthant_index(self)


class Location(Enum):
    O1 = "O1"
    O2 = "O2"
    O3 = "O3"
    O4 = "O4"


class TransitionKind(Enum):
    STAY = "stay"
    CYCLE_ADVANCE = "cycle_advance"
    ENTER = "enter"
    EXIT = "exit"
    BACKWARD = "backward"
    OUTSIDE = "outside"


LOCATION_PATTERNS: bidict.bidict[Location, OrthantPattern] = bidict.bidict(
    {
        Location.O1: OrthantPattern(True, False, False, True),
        Location.O2: OrthantPattern(True, True, False, True),
        Location.O3: OrthantPattern(False, True, False, True),
        Location.O4: OrthantPattern(False, True, False, False),
    }
)

CYCLE_EDGES: frozenset[tuple[Location, Location]] = frozenset(
    {
        (Location.O1, Location.O2),
        (Location.O2, Location.O3),
        (Location.O3, Location.O4),
        (Location.O4, Location.O1),
    }
)

PhaseLike = WalkerState | Sequence[float]


def orthant_index(pattern: OrthantPattern) -> int:
    """k = 1 + 8 s1 + 4 s2 + 2 s3 + s4, in 1..16."""
    s1, s2, s3, s4 = pattern
    return 1 + 8 * int(s1) + 4 * int(s2) + 2 * int(s3) + int(s4)


def pattern_from_index(k: int) -> OrthantPattern:
    if not 1 <= k <= 16:
        raise ValueError(f"Orthant index must be in 1..16, got {k}")
    bits = k - 1
    return OrthantPattern(
        bool(bits & 8), bool(bits & 4), bool(bits & 2), bool(bits & 1)
    )


def classify(state: PhaseLike) -> OrthantPattern:
    if isinstance(state, WalkerState):
        x = (state.theta1, state.theta2, state.dtheta1, state.dtheta2)
    else:
        x = tuple(state)
    return OrthantPattern(
        bool(x[0] > 0), bool(x[1] > 0), bool(x[2] > 0), bool(x[3] > 0)
    )


def location_of(pattern: OrthantPattern) -> Location | None:
    return LOCATION_PATTERNS.inverse.get(pattern)


def locate(state: PhaseLike) -> Location | None:
    return location_of(classify(state))


def transition_kind(prev: Location | None, cur: Location | None) -> TransitionKind:
    if prev is None and cur is None:
        return TransitionKind.OUTSIDE
    if prev is None:
        return TransitionKind.ENTER
    if cur is None:
        return TransitionKind.EXIT
    if prev == cur:
        return TransitionKind.STAY
    if (prev, cur) in CYCLE_EDGES:
        return TransitionKind.CYCLE_ADVANCE
    return TransitionKind.BACKWARD


def classify_transition(prev: PhaseLike, cur: PhaseLike) -> TransitionKind:
    return transition_kind(locate(prev), locate(cur))


def reset_map(
    loc_from: Location, loc_to: Location, params: WalkerParams, pre: WalkerState
) -> WalkerState:
    """Data-variable update on a cycle edge: identity except at the heel strike O4 -> O1."""
    if (loc_from, loc_to) not in CYCLE_EDGES:
        raise NotAnEdgeError(f"({loc_from.value}, {loc_to.value}) is not a cycle edge")
    if (loc_from, loc_to) == (Location.O4, Location.O1):
        return impact_map(params, pre).post_state
    return pre
