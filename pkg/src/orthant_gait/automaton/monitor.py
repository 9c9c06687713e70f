from collections import Counter
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

from orthant_gait.automaton.orthant import (
    Location,
    PhaseLike,
    TransitionKind,
    locate,
    transition_kind,
)

CONFORMING = frozenset({TransitionKind.STAY, TransitionKind.CYCLE_ADVANCE})


@dataclass
class CycleReport:
    entered_at: int | None
    violations: list[tuple[int, TransitionKind]] = field(default_factory=list)
    completed_cycles: int = 0
    # (index reached through a heel strike, index where the walker is back in O1)
    resets: list[tuple[int, int]] = field(default_factory=list)

    @property
    def conforming(self) -> bool:
        return self.entered_at is not None and not self.violations


def cycle_monitor(
    trace: Sequence[PhaseLike], impacts: Iterable[int] = ()
) -> CycleReport:
    """Check a state trace against the walking cycle O1 -> O2 -> O3 -> O4 -> O1.

    Monitoring starts at the first state inside a cycle location; every later
    transition other than staying or advancing is a violation, recorded with the
    index of the state it leads to.

    `impacts` lists the sample indices reached through a heel strike. A heel
    strike is the O4 -> O1 edge of the cycle, but right after it the new swing
    leg still swings backward, so the state sits in (+, -, -, -) outside every
    cycle location until the leg turns forward. Samples from an impact up to the
    first one back in a cycle location are not checked; that first location
    must be O1, otherwise the reset is recorded as a BACKWARD violation.
    """
    if len(trace) == 0:
        raise ValueError("cycle_monitor needs a non-empty trace")

    locations = [locate(state) for state in trace]
    entered_at = next(
        (index for index, loc in enumerate(locations) if loc is not None), None
    )
    report = CycleReport(entered_at=entered_at)
    if entered_at is None:
        return report

    impact_set = set(impacts)
    pending_reset: int | None = None
    for index in range(entered_at + 1, len(locations)):
        prev, cur = locations[index - 1], locations[index]
        if index in impact_set:
            pending_reset = index
        if pending_reset is not None:
            if cur is None:
                continue
            report.resets.append((pending_reset, index))
            pending_reset = None
            if cur is Location.O1:
                report.completed_cycles += 1
            else:
                report.violations.append((index, TransitionKind.BACKWARD))
            continue

        kind = transition_kind(prev, cur)
        if kind not in CONFORMING:
            report.violations.append((index, kind))
        elif (prev, cur) == (Location.O4, Location.O1):
            report.completed_cycles += 1
    return report


def occupancy(trace: Sequence[PhaseLike]) -> dict[Location | None, float]:
    """Fraction of samples spent in each cycle location (None: outside the cycle)."""
    if len(trace) == 0:
        return {}
    counts = Counter(locate(state) for state in trace)
    return {loc: counts[loc] / len(trace) for loc in [*Location, None]}
