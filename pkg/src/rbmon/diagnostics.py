"""Diagnostics stream data: discrete events and per-interval window data.

These are the only inputs the monitor sees; the simulator produces them
and a real deployment would extract them from a diagnostics system.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class EventKind(str, Enum):
    POWER_ON = "power_on"
    SHUTDOWN = "shutdown"
    STARTUP_TIMEOUT = "startup_timeout"


class ShutdownCause(str, Enum):
    REJUVENATION = "rejuvenation"
    FAILURE = "failure"
    FREEZE = "freeze"


class EventConsistencyError(ValueError):
    """An event contradicts the subsystem state implied by earlier events."""


@dataclass(frozen=True)
class DiagnosticsEvent:
    """Power-on / shutdown record for one subsystem, timestamped in hours."""

    timestamp: float
    subsystem_id: str
    kind: EventKind
    cause: ShutdownCause | None = None

    def __post_init__(self) -> None:
        if self.kind is EventKind.SHUTDOWN and self.cause is None:
            raise ValueError("shutdown events require a cause")
        if self.kind is not EventKind.SHUTDOWN and self.cause is not None:
            raise ValueError(f"{self.kind.value} events carry no cause")
        if self.timestamp < 0:
            raise ValueError(f"negative event timestamp {self.timestamp}")

    def to_dict(self) -> dict:
        record = {
            "t": round(self.timestamp, 4),
            "subsystem": self.subsystem_id,
            "kind": self.kind.value,
        }
        if self.cause is not None:
            record["cause"] = self.cause.value
        return record

    @classmethod
    def from_dict(cls, record: dict) -> "DiagnosticsEvent":
        return cls(
            timestamp=float(record["t"]),
            subsystem_id=record["subsystem"],
            kind=EventKind(record["kind"]),
            cause=ShutdownCause(record["cause"]) if "cause" in record else None,
        )


@dataclass(frozen=True)
class DiagnosticsWindow:
    """Per-interval data for one subsystem.

    ``stimuli_total`` counts external stimuli since the subsystem's last
    power-on; ``avg_cpu_load`` is the mean CPU load over the window.
    """

    subsystem_id: str
    window_index: int
    stimuli_total: int
    avg_cpu_load: float

    def __post_init__(self) -> None:
        if self.stimuli_total < 0:
            raise ValueError(f"negative stimuli count {self.stimuli_total}")
        if not (0.0 <= self.avg_cpu_load <= 1.0):
            raise ValueError(f"cpu load {self.avg_cpu_load} outside [0, 1]")
        if self.window_index < 0:
            raise ValueError(f"negative window index {self.window_index}")


def sort_events(events: list[DiagnosticsEvent]) -> list[DiagnosticsEvent]:
    """Events ordered by timestamp, stable for equal times."""
    return sorted(events, key=lambda e: e.timestamp)
