"""Prognostic metrics and the alarm ledger.

Each monitoring step evaluates, against the system curve and every
subsystem curve, the residual reliability at a set of prediction
horizons, optionally the conditional probability of failure, and the
remaining useful life. Breaches raise alarms; an alarm stays active
(duplicates are discarded) until its subsystem is rejuvenated or the
metric stays recovered for one full step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Mapping

from .relcurve import OutOfRangeError, ReliabilityCurve

EOL_THRESHOLD = math.exp(-1.0)

SYSTEM_SCOPE = "system"


class Priority(IntEnum):
    LOW = 1
    MEDIUM = 2
    HIGH = 3

    @property
    def label(self) -> str:
        return self.name.lower()


@dataclass(frozen=True)
class PredictionTuple:
    """One prediction horizon with its thresholds and alarm priority."""

    delta_q: float  # prediction interval width, hours
    u_q: float  # residual-reliability threshold
    priority: Priority
    v_q: float | None = None  # optional probability-of-failure threshold

    def __post_init__(self) -> None:
        if self.delta_q <= 0:
            raise ValueError(f"prediction interval must be > 0, got {self.delta_q}")
        if not (0.0 <= self.u_q <= 1.0):
            raise ValueError(f"threshold u_q must be in [0, 1], got {self.u_q}")
        if self.v_q is not None and not (0.0 <= self.v_q <= 1.0):
            raise ValueError(f"threshold v_q must be in [0, 1], got {self.v_q}")


def default_tuples(
    mtti: float, mttr: float, n_horizons: int = 3, u: float = EOL_THRESHOLD
) -> tuple[PredictionTuple, ...]:
    """Day-spaced horizons: shortest horizon breached -> highest priority."""
    priorities = [Priority.HIGH, Priority.MEDIUM, Priority.LOW]
    if not (1 <= n_horizons <= len(priorities)):
        raise ValueError(f"supported horizon counts are 1..3, got {n_horizons}")
    tuples = tuple(
        PredictionTuple(delta_q=24.0 * (q + 1), u_q=u, priority=priorities[q])
        for q in range(n_horizons)
    )
    validate_tuples(tuples, mtti, mttr)
    return tuples


def validate_tuples(
    tuples: tuple[PredictionTuple, ...], mtti: float, mttr: float
) -> None:
    """Horizons must be strictly increasing and exceed one repair cycle."""
    deltas = [tup.delta_q for tup in tuples]
    if any(b <= a for a, b in zip(deltas, deltas[1:])):
        raise ValueError(f"prediction intervals must be strictly increasing: {deltas}")
    floor = mtti + mttr
    for tup in tuples:
        if tup.delta_q <= floor:
            raise ValueError(
                f"prediction interval {tup.delta_q} h must exceed MTTI+MTTR={floor} h"
            )


@dataclass(frozen=True)
class Alarm:
    scope: str  # SYSTEM_SCOPE or a subsystem id
    priority: Priority
    raised_at: float  # hours
    metric: str  # "residual_reliability" or "probability_of_failure"
    value: float

    def key(self) -> tuple[str, Priority]:
        return (self.scope, self.priority)

    def to_dict(self) -> dict:
        return {
            "t": round(self.raised_at, 4),
            "scope": self.scope,
            "priority": self.priority.label,
            "metric": self.metric,
            "value": round(self.value, 6),
        }


def residual_reliability_check(
    curve: ReliabilityCurve, t_now: float, tup: PredictionTuple
) -> tuple[float, bool]:
    """Reliability predicted at t_now + delta_q and whether it breaches u_q."""
    t_eval = t_now + tup.delta_q
    if t_eval > curve.horizon * (1 + 1e-9):
        raise OutOfRangeError(
            f"prediction time {t_eval} beyond curve horizon {curve.horizon}"
        )
    value = curve.eval(t_eval)
    return value, value <= tup.u_q


def probability_of_failure(
    curve: ReliabilityCurve, t_now: float, delta: float
) -> float:
    """P(failure in (t_now, t_now + delta] | alive at t_now)."""
    now = curve.eval(t_now)
    if now <= 0.0:
        raise ZeroDivisionError(
            f"conditional failure probability undefined: curve is 0 at t={t_now}"
        )
    if delta == 0:
        return 0.0
    later = curve.eval(t_now + delta)
    return (now - later) / now


@dataclass(frozen=True)
class RulEstimate:
    rul: float  # hours; lower bound when censored, may be <= 0 once expired
    t_eol: float  # first grid time with reliability <= the 1/e threshold
    censored: bool  # no crossing within the horizon


def remaining_useful_life(curve: ReliabilityCurve, t_now: float) -> RulEstimate:
    """Time from t_now to the curve's first crossing of the 1/e threshold."""
    below = curve.values <= EOL_THRESHOLD
    if not below.any():
        return RulEstimate(rul=curve.horizon - t_now, t_eol=curve.horizon, censored=True)
    idx = int(below.argmax())
    t_eol = idx * curve.step
    return RulEstimate(rul=t_eol - t_now, t_eol=t_eol, censored=False)


@dataclass
class AlarmLedger:
    """Active alarms keyed by (scope, priority), plus the raise history.

    ``recovered_streak`` counts consecutive steps an active alarm's metric
    evaluated un-triggered; two in a row (one full period of recovery)
    clears it.
    """

    active: dict[tuple[str, Priority], Alarm] = field(default_factory=dict)
    history: list[Alarm] = field(default_factory=list)
    recovered_streak: dict[tuple[str, Priority], int] = field(default_factory=dict)
    suppressed_count: int = 0

    def is_active(self, scope: str, priority: Priority) -> bool:
        return (scope, priority) in self.active

    def clear_scope(self, scope: str) -> None:
        """Drop all active alarms for a scope (its subsystem was rejuvenated)."""
        for key in [k for k in self.active if k[0] == scope]:
            del self.active[key]
            self.recovered_streak.pop(key, None)

    def to_dict(self) -> dict:
        return {
            "active": [a.to_dict() for a in self.active.values()],
            "history": [a.to_dict() for a in self.history],
            "recovered_streak": {
                f"{scope}|{priority.label}": streak
                for (scope, priority), streak in self.recovered_streak.items()
            },
            "suppressed_count": self.suppressed_count,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AlarmLedger":
        def parse(record: dict) -> Alarm:
            return Alarm(
                scope=record["scope"],
                priority=Priority[record["priority"].upper()],
                raised_at=record["t"],
                metric=record["metric"],
                value=record["value"],
            )

        ledger = cls()
        for record in data["active"]:
            alarm = parse(record)
            ledger.active[alarm.key()] = alarm
        ledger.history = [parse(r) for r in data["history"]]
        for key, streak in data["recovered_streak"].items():
            scope, label = key.rsplit("|", 1)
            ledger.recovered_streak[(scope, Priority[label.upper()])] = streak
        ledger.suppressed_count = data["suppressed_count"]
        return ledger


def step_alarms(
    system_curve: ReliabilityCurve,
    subsystem_curves: Mapping[str, ReliabilityCurve],
    t_now: float,
    tuples: tuple[PredictionTuple, ...],
    ledger: AlarmLedger,
) -> tuple[AlarmLedger, list[Alarm]]:
    """Evaluate every tuple against every scope and update the ledger.

    Returns the (mutated) ledger and the alarms newly raised this step.
    """
    new_alarms: list[Alarm] = []
    scopes: list[tuple[str, ReliabilityCurve]] = [(SYSTEM_SCOPE, system_curve)]
    scopes.extend(sorted(subsystem_curves.items()))
    for scope, curve in scopes:
        for tup in tuples:
            value, triggered = residual_reliability_check(curve, t_now, tup)
            metric = "residual_reliability"
            if not triggered and tup.v_q is not None:
                pof = probability_of_failure(curve, t_now, tup.delta_q)
                if pof > tup.v_q:
                    triggered = True
                    value = pof
                    metric = "probability_of_failure"
            key = (scope, tup.priority)
            if triggered:
                ledger.recovered_streak.pop(key, None)
                if key in ledger.active:
                    ledger.suppressed_count += 1
                else:
                    alarm = Alarm(
                        scope=scope,
                        priority=tup.priority,
                        raised_at=t_now,
                        metric=metric,
                        value=value,
                    )
                    ledger.active[key] = alarm
                    ledger.history.append(alarm)
                    new_alarms.append(alarm)
            elif key in ledger.active:
                streak = ledger.recovered_streak.get(key, 0) + 1
                if streak >= 2:
                    del ledger.active[key]
                    ledger.recovered_streak.pop(key, None)
                else:
                    ledger.recovered_streak[key] = streak
    return ledger, new_alarms
