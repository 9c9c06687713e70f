"""Hybrid automaton of ideal walking over phase-space orthants."""

from .monitor import CycleReport, cycle_monitor, occupancy
from .orthant import (
    CYCLE_EDGES,
    LOCATION_PATTERNS,
    Location,
    OrthantPattern,
    PhaseLike,
    TransitionKind,
    classify,
    classify_transition,
    locate,
    location_of,
    orthant_index,
    pattern_from_index,
    reset_map,
    transition_kind,
)

__all__ = [
    "OrthantPattern",
    "PhaseLike",
    "Location",
    "TransitionKind",
    "LOCATION_PATTERNS",
    "CYCLE_EDGES",
    "classify",
    "location_of",
    "locate",
    "orthant_index",
    "pattern_from_index",
    "transition_kind",
    "classify_transition",
    "reset_map",
    "CycleReport",
    "cycle_monitor",
    "occupancy",
]
