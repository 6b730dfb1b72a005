"""The periodic monitoring loop.

Each step consumes one closed diagnostics window and runs, in order:
failure-rate estimation, unconditioned curve evaluation, per-subsystem
conditioning, mode selection plus system-level evaluation, prognostic
checks, and rejuvenation scheduling/dispatch. A step is a pure function
of the previous snapshot and the window's data, so replaying a recorded
stream reproduces the same snapshots bit for bit.
"""

from __future__ import annotations

import copy
import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from . import conditioning, frf, prognostics, rbd, stpn
from .conditioning import ClassifiedWindow, ConditionCase
from .diagnostics import (
    DiagnosticsEvent,
    DiagnosticsWindow,
    EventKind,
    ShutdownCause,
    sort_events,
)
from .prognostics import Alarm, AlarmLedger, PredictionTuple
from .relcurve import ReliabilityCurve, TimeGrid
from .scheduler import LoadForecast, RejuvenationPlan, Scheduler, select_target


@dataclass(frozen=True)
class MonitorConfig:
    delta: float  # monitoring period, hours
    subsystems: dict[str, frf.SwsFrfParams]
    tuples: tuple[PredictionTuple, ...]
    forecast: LoadForecast
    clock_start_hour: float = 6.0
    night_window: tuple[float, float] = (0.0, 6.0)
    rejuvenation_enabled: bool = True
    base_fresh_horizon: float = 192.0  # hours; doubled as needed
    max_fresh_horizon: float = 24576.0  # hours; hard cap for the value search

    @property
    def coverage(self) -> float:
        """Prediction look-ahead every curve must keep beyond the splice point."""
        delta_max = max(t.delta_q for t in self.tuples)
        return delta_max + 24.0 + self.delta

    def subsystem_ids(self) -> tuple[str, ...]:
        return tuple(sorted(self.subsystems))


@dataclass
class StepResult:
    step: int
    t_now: float
    new_alarms: list[Alarm]
    commands: list[str]  # rejuvenation targets released this step
    cases: dict[str, ConditionCase]
    metrics: dict
    notes: list[str] = field(default_factory=list)


@dataclass
class MonitorSnapshot:
    """Full monitor state after ``step`` processed windows (t_now = step*delta)."""

    step: int
    t_now: float
    curves: dict[str, ReliabilityCurve]
    system_curve: ReliabilityCurve
    mode: rbd.ModeOfOperation
    health: dict[str, frf.SwsHealthState]
    ledger: AlarmLedger
    scheduler: Scheduler
    system_lost_since: float | None = None

    def to_dict(self) -> dict:
        def curve_dict(curve: ReliabilityCurve) -> dict:
            return {"step_h": curve.step, "values": curve.values.tolist()}

        return {
            "step": self.step,
            "t_now": self.t_now,
            "curves": {s: curve_dict(c) for s, c in sorted(self.curves.items())},
            "system_curve": curve_dict(self.system_curve),
            "mode_down": sorted(self.mode.down),
            "health": {
                s: {
                    "current_k": h.current_k,
                    "cumulative_fault_intensity": h.cumulative_fault_intensity,
                    "last_rates": list(h.last_rates),
                }
                for s, h in sorted(self.health.items())
            },
            "ledger": self.ledger.to_dict(),
            "scheduler": self.scheduler.to_dict(),
            "system_lost_since": self.system_lost_since,
        }

    @classmethod
    def from_dict(cls, data: dict, config: MonitorConfig) -> "MonitorSnapshot":
        def parse_curve(payload: dict) -> ReliabilityCurve:
            values = np.array(payload["values"], dtype=float)
            grid = TimeGrid(
                step=payload["step_h"], horizon=(len(values) - 1) * payload["step_h"]
            )
            return ReliabilityCurve(grid, values)

        monitor = Monitor(config)
        scheduler = monitor._new_scheduler()
        scheduler.load_plans(data["scheduler"])
        return cls(
            step=data["step"],
            t_now=data["t_now"],
            curves={s: parse_curve(c) for s, c in data["curves"].items()},
            system_curve=parse_curve(data["system_curve"]),
            mode=rbd.ModeOfOperation(
                all_ids=config.subsystem_ids(), down=frozenset(data["mode_down"])
            ),
            health={
                s: frf.SwsHealthState(
                    current_k=h["current_k"],
                    cumulative_fault_intensity=h["cumulative_fault_intensity"],
                    last_rates=tuple(h["last_rates"]),
                )
                for s, h in data["health"].items()
            },
            ledger=AlarmLedger.from_dict(data["ledger"]),
            scheduler=scheduler,
            system_lost_since=data["system_lost_since"],
        )


class Monitor:
    """Stateless step engine; all evolving state lives in the snapshot."""

    def __init__(self, config: MonitorConfig):
        if len(config.subsystems) < 3:
            raise ValueError("the 2oo3 monitor needs at least three subsystems")
        prognostics.validate_tuples(config.tuples, mtti=0.0, mttr=0.0)
        self.config = config

    # -- construction ------------------------------------------------------

    def _new_scheduler(self) -> Scheduler:
        return Scheduler(
            forecast=self.config.forecast,
            clock_start_hour=self.config.clock_start_hour,
            night_window=self.config.night_window,
            tick=self.config.delta,
        )

    def _grid(self, horizon: float) -> TimeGrid:
        delta = self.config.delta
        points = max(2, int(math.ceil(horizon / delta - 1e-9)) + 1)
        return TimeGrid(step=delta, horizon=(points - 1) * delta)

    def a_priori_curves(
        self, horizon: float | None = None
    ) -> tuple[dict[str, ReliabilityCurve], ReliabilityCurve]:
        """Initialization curves; the horizon extends until every curve has
        visibly crossed the end-of-life threshold unless one is given."""
        nets = {
            s: frf.a_priori_net(s, params)
            for s, params in self.config.subsystems.items()
        }
        if horizon is None:
            horizon = self.config.base_fresh_horizon
            target = prognostics.EOL_THRESHOLD * 0.9
            while horizon < self.config.max_fresh_horizon:
                grid = self._grid(horizon)
                done = all(
                    stpn.transient_reliability(net, grid).last_value() <= target
                    for net in nets.values()
                )
                if done:
                    break
                horizon *= 2
        grid = self._grid(horizon)
        mode = rbd.ModeOfOperation(all_ids=self.config.subsystem_ids())
        return conditioning.initialize(nets, mode.rbd, grid)

    def initial_snapshot(self, horizon: float | None = None) -> MonitorSnapshot:
        curves, system = self.a_priori_curves(horizon)
        return MonitorSnapshot(
            step=0,
            t_now=0.0,
            curves=curves,
            system_curve=system,
            mode=rbd.ModeOfOperation(all_ids=self.config.subsystem_ids()),
            health={
                s: frf.SwsHealthState.fresh(p)
                for s, p in self.config.subsystems.items()
            },
            ledger=AlarmLedger(),
            scheduler=self._new_scheduler(),
        )

    # -- fresh-curve policy --------------------------------------------------

    def _fresh_curve(
        self, net: stpn.FailureRaceNet, match_target: float
    ) -> ReliabilityCurve:
        """Unconditioned curve on a horizon long enough that the value search
        can reach ``match_target`` and still keep the prediction coverage."""
        coverage = self.config.coverage
        horizon = max(self.config.base_fresh_horizon, coverage + self.config.delta)
        while True:
            curve = stpn.transient_reliability(net, self._grid(horizon))
            if curve.eval(max(0.0, curve.horizon - coverage)) <= match_target:
                return curve
            if horizon >= self.config.max_fresh_horizon:
                return curve
            horizon = min(horizon * 2, self.config.max_fresh_horizon)

    # -- the step ------------------------------------------------------------

    def step(
        self,
        snapshot: MonitorSnapshot,
        windows: Mapping[str, DiagnosticsWindow],
        events: list[DiagnosticsEvent],
    ) -> tuple[MonitorSnapshot, StepResult]:
        cfg = self.config
        n = snapshot.step
        t_start = n * cfg.delta
        t_now = (n + 1) * cfg.delta
        ids = cfg.subsystem_ids()
        missing = [s for s in ids if s not in windows]
        if missing:
            raise ValueError(f"missing diagnostics windows for {missing}")
        events = sort_events(events)
        notes: list[str] = []

        # Classify each subsystem's window (also drives health resets).
        classified: dict[str, ClassifiedWindow] = {}
        for s in ids:
            classified[s] = conditioning.classify(
                [e for e in events if e.subsystem_id == s],
                s,
                (t_start, t_now),
                was_down=s in snapshot.mode.down,
            )
            if classified[s].freeze_flagged:
                notes.append(f"freeze event on software subsystem {s} (hardware-only operation)")

        # Failure-rate estimation, unconditioned evaluation, conditioning.
        health = dict(snapshot.health)
        curves = dict(snapshot.curves)
        cases: dict[str, ConditionCase] = {}
        for s in ids:
            cls = classified[s]
            cases[s] = cls.case
            if cls.down_at_end and cls.case is not ConditionCase.FROZEN:
                # Down across the window end: no conditioned curve until the
                # subsystem re-enters at its power-on step.
                continue
            if cls.case is ConditionCase.FROZEN:
                curves[s] = conditioning.condition_step(
                    curves[s], curves[s], cls.case, t_start, cfg.delta
                )
                continue
            reset = cls.case is ConditionCase.REJUVENATED
            health[s] = frf.update_health(
                health[s], cfg.subsystems[s], windows[s], cfg.delta, reset=reset
            )
            net = frf.build_net(health[s], cfg.subsystems[s], windows[s])
            match_target = (
                1.0 if reset else curves[s].eval(min(t_start, curves[s].horizon))
            )
            fresh = self._fresh_curve(net, match_target)
            curves[s] = conditioning.condition_step(
                curves[s], fresh, cls.case, t_start, cfg.delta
            )

        # Mode selection and system-level evaluation.
        mode = rbd.select_mode(snapshot.mode, events)
        lost_since = snapshot.system_lost_since
        if mode.kind == rbd.LOST:
            if lost_since is None:
                lost_since = t_now
                notes.append(f"system loss at t={t_now}")
            idx = snapshot.system_curve.grid.exact_index(
                min(t_start, snapshot.system_curve.horizon)
            )
            values = np.array(snapshot.system_curve.values)
            values[idx + 1 :] = 0.0
            system_curve = ReliabilityCurve(snapshot.system_curve.grid, values)
        else:
            if lost_since is not None:
                notes.append(f"system recovered from loss at t={t_now}")
                lost_since = None
            participating = mode.participating()
            n_points = min(curves[s].grid.n_points for s in participating)
            common = {
                s: curves[s].restricted((n_points - 1) * cfg.delta)
                for s in participating
            }
            system_curve = rbd.eval_curve(mode.rbd, common)

        previous_prediction = snapshot.system_curve.eval_clamped(t_now)

        # Prognostic monitoring.
        ledger = copy.deepcopy(snapshot.ledger)
        scheduler = copy.deepcopy(snapshot.scheduler)
        for s in ids:
            if cases[s] is ConditionCase.REJUVENATED:
                ledger.clear_scope(s)
        new_alarms: list[Alarm] = []
        if mode.kind != rbd.LOST:
            scope_curves = {s: curves[s] for s in mode.participating()}
            ledger, new_alarms = prognostics.step_alarms(
                system_curve, scope_curves, t_now, cfg.tuples, ledger
            )

        # Scheduling: translate alarms into plans, then dispatch.
        running = set(mode.participating())
        reliabilities = {s: curves[s].eval_clamped(t_now) for s in ids}
        for alarm in new_alarms:
            target = select_target(alarm, reliabilities, running)
            if target is None:
                notes.append(f"no available target for {alarm.scope} alarm; deferred")
                continue
            plan = scheduler.schedule(target, alarm.priority, t_now)
            if plan is None:
                notes.append(
                    f"{alarm.priority.label} request for {target} already planned; discarded"
                )

        for event in events:
            if (
                event.kind is EventKind.SHUTDOWN
                and event.cause is ShutdownCause.FAILURE
            ):
                scheduler.supersede(event.subsystem_id)
        for s in ids:
            if cases[s] is ConditionCase.REJUVENATED and s not in mode.down:
                scheduler.mark_done(s)

        commands: list[RejuvenationPlan] = []
        if cfg.rejuvenation_enabled:
            commands = scheduler.dispatch(mode, t_now, reliabilities)

        rul = prognostics.remaining_useful_life(system_curve, t_now)
        metrics = {
            "step": n + 1,
            "t_hours": t_now,
            "mode": mode.id,
            **{f"r_{s}": reliabilities[s] for s in ids},
            "r_system": system_curve.eval_clamped(t_now),
            "r_system_prev_prediction": previous_prediction,
            "rul_system_hours": rul.rul,
            "rul_censored": rul.censored,
            "new_alarms": len(new_alarms),
            "active_alarms": len(ledger.active),
            "pending_plans": sum(
                1 for p in scheduler.plans if p.status.value == "pending"
            ),
        }

        next_snapshot = MonitorSnapshot(
            step=n + 1,
            t_now=t_now,
            curves=curves,
            system_curve=system_curve,
            mode=mode,
            health=health,
            ledger=ledger,
            scheduler=scheduler,
            system_lost_since=lost_since,
        )
        result = StepResult(
            step=n + 1,
            t_now=t_now,
            new_alarms=new_alarms,
            commands=[plan.target for plan in commands],
            cases=cases,
            metrics=metrics,
            notes=notes,
        )
        return next_snapshot, result
