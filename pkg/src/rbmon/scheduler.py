"""Turn alarms into rejuvenation plans and dispatch them.

Policy: a subsystem alarm targets its own subsystem; a system alarm
targets the available subsystem with the lowest current reliability.
Low-priority plans go to the next night window, medium-priority ones to
the lowest-forecast-load slot within twelve hours, high-priority ones run
at the next tick. Execution is gated on the system being in full 2oo3
operation and on no other rejuvenation being in progress.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping

import numpy as np

from .prognostics import Alarm, Priority, SYSTEM_SCOPE
from .rbd import OPERATING, ModeOfOperation

HOURS_PER_DAY = 24.0


@dataclass(frozen=True)
class LoadForecast:
    """Expected load per wall-clock hour of day (24 values in [0, 1])."""

    hourly: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.hourly) != 24:
            raise ValueError(f"forecast needs 24 hourly values, got {len(self.hourly)}")
        if any(not (0.0 <= v <= 1.0) for v in self.hourly):
            raise ValueError("forecast loads must lie in [0, 1]")

    def at_hour(self, hour_of_day: float) -> float:
        return self.hourly[int(hour_of_day) % 24]

    @classmethod
    def from_observations(cls, loads_by_hour: Mapping[int, list[float]]) -> "LoadForecast":
        """Trailing average of observed window loads, bucketed by hour."""
        hourly = tuple(
            float(np.mean(loads_by_hour[h])) if loads_by_hour.get(h) else 0.0
            for h in range(24)
        )
        return cls(hourly)


class PlanStatus(str, Enum):
    PENDING = "pending"
    EXECUTING = "executing"
    DONE = "done"
    SUPERSEDED = "superseded"


@dataclass
class RejuvenationPlan:
    target: str
    requested_at: float
    due_by: float
    priority: Priority
    status: PlanStatus = PlanStatus.PENDING

    def to_dict(self) -> dict:
        return {
            "target": self.target,
            "requested_at": round(self.requested_at, 4),
            "due_by": round(self.due_by, 4),
            "priority": self.priority.label,
            "status": self.status.value,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RejuvenationPlan":
        return cls(
            target=data["target"],
            requested_at=data["requested_at"],
            due_by=data["due_by"],
            priority=Priority[data["priority"].upper()],
            status=PlanStatus(data["status"]),
        )


def select_target(
    alarm: Alarm,
    subsystem_reliabilities: Mapping[str, float],
    available: set[str],
) -> str | None:
    """Subsystem to rejuvenate, or None when no subsystem is available."""
    if alarm.scope != SYSTEM_SCOPE:
        return alarm.scope if alarm.scope in available else None
    candidates = sorted(i for i in subsystem_reliabilities if i in available)
    if not candidates:
        return None
    return min(candidates, key=lambda i: (subsystem_reliabilities[i], i))


@dataclass
class Scheduler:
    """Owns the plan list and the timing policy knobs."""

    forecast: LoadForecast
    clock_start_hour: float = 6.0  # wall-clock hour of day at simulation t=0
    night_window: tuple[float, float] = (0.0, 6.0)
    tick: float = 0.5  # monitor period; due times land on this grid
    plans: list[RejuvenationPlan] = field(default_factory=list)

    def wall_hour(self, t: float) -> float:
        return (self.clock_start_hour + t) % HOURS_PER_DAY

    def _ticks_between(self, t_from: float, t_to: float) -> np.ndarray:
        first = np.ceil(t_from / self.tick + 1e-9) * self.tick
        return np.arange(first, t_to + self.tick * 1e-6, self.tick)

    def _in_night_window(self, t: float) -> bool:
        start, end = self.night_window
        hour = self.wall_hour(t)
        if start <= end:
            return start <= hour < end
        return hour >= start or hour < end  # window wrapping past midnight

    def _due_time(self, priority: Priority, t_now: float) -> float:
        if priority is Priority.HIGH:
            return t_now
        if priority is Priority.MEDIUM:
            candidates = self._ticks_between(t_now, t_now + 12.0)
            loads = [self.forecast.at_hour(self.wall_hour(t)) for t in candidates]
            return float(candidates[int(np.argmin(loads))])
        # Low priority: lowest-load slot inside the next night window.
        candidates = self._ticks_between(t_now, t_now + 2 * HOURS_PER_DAY)
        night = [t for t in candidates if self._in_night_window(t)]
        if not night:
            return float(candidates[-1])
        first_night_end = next(
            (t for a, t in zip(night, night[1:]) if t - a > self.tick * 1.5),
            night[-1] + self.tick,
        )
        tonight = [t for t in night if t < first_night_end]
        loads = [self.forecast.at_hour(self.wall_hour(t)) for t in tonight]
        return float(tonight[int(np.argmin(loads))])

    def pending_for(self, target: str) -> RejuvenationPlan | None:
        for plan in self.plans:
            if plan.target == target and plan.status is PlanStatus.PENDING:
                return plan
        return None

    def schedule(self, target: str, priority: Priority, t_now: float) -> RejuvenationPlan | None:
        """Create a plan, or tighten the existing one on a higher priority.

        Repeated requests at the same or lower priority are duplicates of
        an already-planned intervention and are discarded.
        """
        due = self._due_time(priority, t_now)
        existing = self.pending_for(target)
        if existing is not None:
            if priority <= existing.priority:
                return None
            existing.priority = priority
            existing.due_by = min(existing.due_by, due)
            existing.requested_at = t_now
            return existing
        plan = RejuvenationPlan(
            target=target, requested_at=t_now, due_by=due, priority=priority
        )
        self.plans.append(plan)
        return plan

    def dispatch(
        self,
        mode: ModeOfOperation,
        t_now: float,
        subsystem_reliabilities: Mapping[str, float],
    ) -> list[RejuvenationPlan]:
        """Release at most one due plan; rejuvenation requires 2oo3 mode.

        Taking a subsystem down makes the mode degraded, so a second due
        plan is held until the system is back to full operation.
        """
        if mode.kind != OPERATING:
            return []
        if any(plan.status is PlanStatus.EXECUTING for plan in self.plans):
            return []
        due = [
            plan
            for plan in self.plans
            if plan.status is PlanStatus.PENDING and plan.due_by <= t_now + 1e-9
        ]
        if not due:
            return []
        chosen = min(
            due,
            key=lambda p: (subsystem_reliabilities.get(p.target, 1.0), p.target),
        )
        chosen.status = PlanStatus.EXECUTING
        return [chosen]

    def mark_done(self, target: str) -> None:
        for plan in self.plans:
            if plan.target == target and plan.status is PlanStatus.EXECUTING:
                plan.status = PlanStatus.DONE

    def supersede(self, target: str) -> None:
        """The target failed before its plan ran; repair replaces rejuvenation."""
        for plan in self.plans:
            if plan.target == target and plan.status in (
                PlanStatus.PENDING,
                PlanStatus.EXECUTING,
            ):
                plan.status = PlanStatus.SUPERSEDED

    def to_dict(self) -> dict:
        return {"plans": [plan.to_dict() for plan in self.plans]}

    def load_plans(self, data: dict) -> None:
        self.plans = [RejuvenationPlan.from_dict(p) for p in data["plans"]]
