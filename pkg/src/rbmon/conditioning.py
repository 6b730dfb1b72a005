"""Per-step conditioning of subsystem reliability curves.

At every monitoring step the events observed in the closed window decide
how each subsystem's curve history is continued on the freshly evaluated
unconditioned curve: restarted after a rejuvenation (or repair), held
constant after a freeze shutdown, or continued value-matched otherwise.
The split happens at the window start, one period before execution time:
the window's data affects reliability from the instant it was collected.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Mapping

from .diagnostics import (
    DiagnosticsEvent,
    EventConsistencyError,
    EventKind,
    ShutdownCause,
    sort_events,
)
from .rbd import RbdNode, eval_curve
from .relcurve import (
    ReliabilityCurve,
    TimeGrid,
    splice_conserve,
    splice_freeze,
    splice_restore,
)
from .stpn import FailureRaceNet, transient_reliability


class ConditionCase(Enum):
    REJUVENATED = "rejuvenated"
    FROZEN = "frozen"
    CONSERVE = "conserve"


@dataclass(frozen=True)
class ClassifiedWindow:
    case: ConditionCase
    down_at_end: bool  # no curve update while the subsystem stays down
    freeze_flagged: bool  # freeze seen on a software subsystem (hardware-only op)


def classify(
    events: list[DiagnosticsEvent],
    subsystem_id: str,
    window: tuple[float, float],
    was_down: bool = False,
) -> ClassifiedWindow:
    """Decide the conditioning case for one subsystem from one window.

    A power-on that ends a rejuvenation or failure outage restarts the
    curve; a completed rejuvenation beats a freeze seen in the same window
    (it is the later lifecycle stage).
    """
    start, end = window
    down = was_down
    # Cause of the outage a power-on would be ending; failure covers the
    # was_down case (the subsystem re-enters conditioning at its repair).
    outage_cause = ShutdownCause.FAILURE if was_down else None
    rejuvenated = False
    froze = False
    for event in sort_events(events):
        if event.subsystem_id != subsystem_id:
            continue
        if not (start - 1e-9 <= event.timestamp <= end + 1e-9):
            raise ValueError(
                f"event at t={event.timestamp} outside window [{start}, {end}]"
            )
        if event.kind in (EventKind.SHUTDOWN, EventKind.STARTUP_TIMEOUT):
            if down:
                raise EventConsistencyError(
                    f"shutdown of already-down subsystem {subsystem_id!r}"
                )
            down = True
            outage_cause = event.cause or ShutdownCause.FAILURE
            if event.cause is ShutdownCause.FREEZE:
                froze = True
        elif event.kind is EventKind.POWER_ON:
            if not down:
                raise EventConsistencyError(
                    f"power_on of already-running subsystem {subsystem_id!r}"
                )
            down = False
            if outage_cause in (ShutdownCause.REJUVENATION, ShutdownCause.FAILURE):
                rejuvenated = True
            outage_cause = None
    if rejuvenated:
        case = ConditionCase.REJUVENATED
    elif froze and down:
        case = ConditionCase.FROZEN
    else:
        case = ConditionCase.CONSERVE
    return ClassifiedWindow(case=case, down_at_end=down, freeze_flagged=froze)


def condition_step(
    prev: ReliabilityCurve,
    fresh: ReliabilityCurve,
    case: ConditionCase,
    n_delta: float,
    delta: float,
) -> ReliabilityCurve:
    """Continue the curve history past n_delta according to the case."""
    if case is ConditionCase.REJUVENATED:
        return splice_restore(prev, fresh, n_delta)
    if case is ConditionCase.FROZEN:
        return splice_freeze(prev, n_delta)
    return splice_conserve(prev, fresh, n_delta, delta)


def initialize(
    a_priori_nets: Mapping[str, FailureRaceNet],
    rbd_operating: RbdNode,
    grid: TimeGrid,
) -> tuple[dict[str, ReliabilityCurve], ReliabilityCurve]:
    """A-priori curves before any diagnostics: one per subsystem + system."""
    curves = {
        sws: transient_reliability(net, grid)
        for sws, net in sorted(a_priori_nets.items())
    }
    system = eval_curve(rbd_operating, curves)
    return curves, system
