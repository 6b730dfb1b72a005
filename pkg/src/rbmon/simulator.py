"""Seeded discrete-event simulation of the 2oo3 software system.

The simulator owns the ground truth the monitor only estimates:

* external stimuli arrive as a nonhomogeneous Poisson stream shaped by
  the workload profile (one stream, counted by every running SwS);
* application failures follow the piecewise-constant hazard
  alpha + s(t) * beta, sampled exactly segment by segment;
* OS failures occur at the k0-th fault of a Poisson stream whose rate
  follows the simulated CPU load, while the monitor approximates the
  same process with a frozen-rate Erlang;
* rejuvenation costs one init delay, repair costs repair plus init.

Every run is a pure function of (scenario, seed): per-purpose random
streams are spawned from one seed so the monitor's decisions cannot
perturb the workload, which keeps on/off policy comparisons paired.
"""

from __future__ import annotations

import bisect
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .config import ScenarioConfig, n_steps
from .diagnostics import DiagnosticsEvent, DiagnosticsWindow, EventKind, ShutdownCause
from .monitor import Monitor, MonitorConfig, MonitorSnapshot, StepResult
from .prognostics import Alarm
from .rbd import LOST, OPERATING
from .scheduler import RejuvenationPlan

INIT = "init"
WORKING = "working"
FAILED = "failed"


@dataclass
class _SwsRuntime:
    """Ground-truth lifecycle state of one SwS."""

    state: str = WORKING
    completion_time: float = 0.0  # when init/repair finishes (while down)
    down_cause: ShutdownCause | None = None
    stimuli_since_power_on: int = 0
    os_faults: int = 0
    window_load: float = 0.0


@dataclass
class AvailabilityStats:
    uptime_fraction: float
    loss_count: int
    loss_time: float
    failure_count: int
    rejuvenation_count: int


@dataclass
class SimulationTrace:
    scenario_name: str
    seed: int
    rejuvenation_enabled: bool
    duration: float
    events: list[DiagnosticsEvent]
    step_metrics: list[dict]
    alarms: list[Alarm]
    notes: list[str]
    plans: list[RejuvenationPlan]
    curve_rows: list[tuple]  # rows for curves.csv: (step, t, kind, v1, v2, v3, vsys)
    availability: AvailabilityStats
    final_snapshot: MonitorSnapshot
    ground_truth_modes: list[str]  # simulator-side mode at each window end


class ScenarioRuntimeError(RuntimeError):
    """A simulation step could not be completed."""


def _hour_of_day(t: float, clock_start_hour: float) -> int:
    return int((clock_start_hour + t) % 24.0)


class Simulation:
    def __init__(
        self,
        scenario: ScenarioConfig,
        seed: int | None = None,
        rejuvenation_enabled: bool = True,
    ):
        self.scenario = scenario
        self.seed = scenario.seed if seed is None else seed
        self.rejuvenation_enabled = rejuvenation_enabled
        self.ids = scenario.subsystem_ids()
        self.monitor = Monitor(
            MonitorConfig(
                delta=scenario.delta,
                subsystems=dict(scenario.subsystems),
                tuples=scenario.tuples,
                forecast=scenario.forecast(),
                clock_start_hour=scenario.clock_start_hour,
                night_window=scenario.night_window,
                rejuvenation_enabled=rejuvenation_enabled,
                base_fresh_horizon=scenario.base_fresh_horizon,
                max_fresh_horizon=scenario.max_fresh_horizon,
            )
        )
        self._spawn_streams()

    def _spawn_streams(self) -> None:
        # One child stream per purpose: the stimuli/cpu streams never depend
        # on policy decisions, so on/off comparisons share their randomness.
        seq = np.random.SeedSequence(self.seed)
        children = seq.spawn(1 + 3 * len(self.ids) + 1)
        self.stimuli_rng = np.random.Generator(np.random.PCG64(children[0]))
        self.cpu_rng: dict[str, np.random.Generator] = {}
        self.hazard_rng: dict[str, np.random.Generator] = {}
        self.downtime_rng: dict[str, np.random.Generator] = {}
        for i, sws in enumerate(self.ids):
            self.cpu_rng[sws] = np.random.Generator(np.random.PCG64(children[1 + 3 * i]))
            self.hazard_rng[sws] = np.random.Generator(
                np.random.PCG64(children[2 + 3 * i])
            )
            self.downtime_rng[sws] = np.random.Generator(
                np.random.PCG64(children[3 + 3 * i])
            )

    # -- fault injection ---------------------------------------------------

    def _window_stimuli(self, t0: float, t1: float) -> list[float]:
        """Arrival times of the shared external-stimuli stream in [t0, t1)."""
        rate = self.scenario.workload.stimuli_per_hour[
            _hour_of_day(t0, self.scenario.clock_start_hour)
        ]
        if rate <= 0:
            return []
        count = self.stimuli_rng.poisson(rate * (t1 - t0))
        if count == 0:
            return []
        return sorted(self.stimuli_rng.uniform(t0, t1, count).tolist())

    def _window_cpu_load(self, sws: str, t0: float) -> float:
        profile = self.scenario.workload.cpu_load[
            _hour_of_day(t0, self.scenario.clock_start_hour)
        ]
        noise = self.scenario.workload.cpu_noise
        raw = profile + self.cpu_rng[sws].uniform(-noise, noise)
        return float(min(1.0, max(0.0, raw)))

    def _advance_sws(
        self,
        sws: str,
        runtime: _SwsRuntime,
        t0: float,
        t1: float,
        arrivals: list[float],
        events_out: list[DiagnosticsEvent],
    ) -> None:
        """Play one SwS's lifecycle across [t0, t1)."""
        params = self.scenario.subsystems[sws]
        rng = self.hazard_rng[sws]
        lam_os = params.lambda1 + params.lambda2 * runtime.window_load
        cursor = t0
        idx = bisect.bisect_right(arrivals, cursor)
        while cursor < t1 - 1e-12:
            if runtime.state != WORKING:
                if runtime.completion_time < t1 - 1e-12:
                    cursor = runtime.completion_time
                    runtime.state = WORKING
                    runtime.down_cause = None
                    runtime.stimuli_since_power_on = 0
                    runtime.os_faults = 0
                    idx = bisect.bisect_right(arrivals, cursor)
                    events_out.append(
                        DiagnosticsEvent(cursor, sws, EventKind.POWER_ON)
                    )
                else:
                    return
                continue
            next_arrival = arrivals[idx] if idx < len(arrivals) else None
            seg_end = min(next_arrival, t1) if next_arrival is not None else t1
            rate_app = params.alpha + runtime.stimuli_since_power_on * params.beta
            candidate_app = cursor + rng.exponential(1.0 / rate_app)
            fault_count = rng.poisson(lam_os * (seg_end - cursor))
            fault_times: list[float] = []
            if fault_count:
                fault_times = sorted(
                    rng.uniform(cursor, seg_end, fault_count).tolist()
                )
            needed = params.k0 - runtime.os_faults
            candidate_os = fault_times[needed - 1] if fault_count >= needed else None

            failure_time = None
            if candidate_app < seg_end:
                failure_time, cause_transition = candidate_app, "application"
            if candidate_os is not None and (
                failure_time is None or candidate_os < failure_time
            ):
                failure_time, cause_transition = candidate_os, "os"

            if failure_time is not None:
                events_out.append(
                    DiagnosticsEvent(
                        failure_time, sws, EventKind.SHUTDOWN, ShutdownCause.FAILURE
                    )
                )
                runtime.state = FAILED
                runtime.down_cause = ShutdownCause.FAILURE
                down_rng = self.downtime_rng[sws]
                runtime.completion_time = (
                    failure_time
                    + down_rng.exponential(self.scenario.mttr_hours)
                    + down_rng.exponential(self.scenario.mtti_hours)
                )
                cursor = failure_time
                continue

            runtime.os_faults += fault_count
            if next_arrival is not None and seg_end < t1 - 1e-12:
                runtime.stimuli_since_power_on += 1
                cursor = next_arrival
                idx += 1
            else:
                cursor = t1

    def _execute_rejuvenation(
        self, sws: str, t: float, runtime: _SwsRuntime
    ) -> DiagnosticsEvent | None:
        if runtime.state != WORKING:
            return None  # target went down first; the command is void
        runtime.state = INIT
        runtime.down_cause = ShutdownCause.REJUVENATION
        runtime.completion_time = t + self.downtime_rng[sws].exponential(
            self.scenario.mtti_hours
        )
        return DiagnosticsEvent(t, sws, EventKind.SHUTDOWN, ShutdownCause.REJUVENATION)

    def _ground_truth_mode(self, runtimes: dict[str, _SwsRuntime]) -> str:
        down = sorted(s for s, r in runtimes.items() if r.state != WORKING)
        if not down:
            return OPERATING
        if len(self.ids) - len(down) >= 2:
            return f"degraded({','.join(down)})"
        return f"{LOST}({','.join(down)})"

    # -- main loop -----------------------------------------------------------

    def run(self, duration: float | None = None) -> SimulationTrace:
        scenario = self.scenario
        delta = scenario.delta
        steps = n_steps(scenario, duration)
        if steps < 1:
            raise ScenarioRuntimeError("duration shorter than one monitoring period")
        total_time = steps * delta

        runtimes = {sws: _SwsRuntime() for sws in self.ids}
        snapshot = self.monitor.initial_snapshot()
        carryover: list[DiagnosticsEvent] = []
        all_events: list[DiagnosticsEvent] = []
        step_metrics: list[dict] = []
        alarms: list[Alarm] = []
        notes: list[str] = []
        curve_rows: list[tuple] = []
        truth_modes: list[str] = []
        transitions: list[tuple[float, int]] = []  # (time, +1/-1 working)

        for n in range(steps):
            t0, t1 = n * delta, (n + 1) * delta
            window_events = [e for e in carryover if t0 - 1e-9 <= e.timestamp < t1]
            carryover = [e for e in carryover if e.timestamp >= t1]

            arrivals = self._window_stimuli(t0, t1)
            for sws in self.ids:
                runtimes[sws].window_load = self._window_cpu_load(sws, t0)
            for sws in self.ids:
                self._advance_sws(
                    sws, runtimes[sws], t0, t1, arrivals, window_events
                )

            window_events.sort(key=lambda e: e.timestamp)
            all_events.extend(window_events)
            for event in window_events:
                if event.kind is EventKind.POWER_ON:
                    transitions.append((event.timestamp, +1))
                else:
                    transitions.append((event.timestamp, -1))

            windows = {
                sws: DiagnosticsWindow(
                    subsystem_id=sws,
                    window_index=n,
                    stimuli_total=runtimes[sws].stimuli_since_power_on,
                    avg_cpu_load=runtimes[sws].window_load,
                )
                for sws in self.ids
            }
            truth_modes.append(self._ground_truth_mode(runtimes))

            snapshot, result = self.monitor.step(snapshot, windows, window_events)
            step_metrics.append(result.metrics)
            alarms.extend(result.new_alarms)
            notes.extend(f"t={result.t_now:.4f}: {note}" for note in result.notes)
            if (n + 1) % scenario.curve_record_stride == 0 or n == steps - 1:
                curve_rows.extend(_curve_rows(snapshot, self.monitor.config))

            for target in result.commands:
                shutdown = self._execute_rejuvenation(target, t1, runtimes[target])
                if shutdown is None:
                    snapshot.scheduler.supersede(target)
                    notes.append(
                        f"t={t1:.4f}: rejuvenation command for {target} superseded"
                    )
                else:
                    carryover.append(shutdown)

        availability = _availability(transitions, len(self.ids), total_time, all_events)
        return SimulationTrace(
            scenario_name=scenario.name,
            seed=self.seed,
            rejuvenation_enabled=self.rejuvenation_enabled,
            duration=total_time,
            events=all_events,
            step_metrics=step_metrics,
            alarms=alarms,
            notes=notes,
            plans=list(snapshot.scheduler.plans),
            curve_rows=curve_rows,
            availability=availability,
            final_snapshot=snapshot,
            ground_truth_modes=truth_modes,
        )


def _curve_rows(snapshot: MonitorSnapshot, config: MonitorConfig) -> list[tuple]:
    """Observed/predicted rows of all four curves at this snapshot."""
    delta = config.delta
    t_now = snapshot.t_now
    horizon = min(
        t_now + config.coverage,
        min(c.horizon for c in snapshot.curves.values()),
        snapshot.system_curve.horizon,
    )
    rows = []
    ids = sorted(snapshot.curves)
    n_pts = int(round(horizon / delta)) + 1
    for m in range(n_pts):
        t = m * delta
        kind = "observed" if t <= t_now + 1e-9 else "predicted"
        rows.append(
            (
                snapshot.step,
                t,
                kind,
                *(snapshot.curves[s].eval_clamped(t) for s in ids),
                snapshot.system_curve.eval_clamped(t),
            )
        )
    return rows


def _availability(
    transitions: list[tuple[float, int]],
    n_subsystems: int,
    total_time: float,
    events: list[DiagnosticsEvent],
) -> AvailabilityStats:
    transitions = sorted(transitions, key=lambda x: x[0])
    working = n_subsystems
    up_time = 0.0
    loss_time = 0.0
    loss_count = 0
    prev_t = 0.0
    for t, delta_w in transitions:
        span = min(t, total_time) - prev_t
        if span > 0:
            if working >= 2:
                up_time += span
            else:
                loss_time += span
        was_up = working >= 2
        working += delta_w
        if was_up and working < 2:
            loss_count += 1
        prev_t = min(t, total_time)
    tail = total_time - prev_t
    if tail > 0:
        if working >= 2:
            up_time += tail
        else:
            loss_time += tail
    failures = sum(
        1
        for e in events
        if e.kind is EventKind.SHUTDOWN and e.cause is ShutdownCause.FAILURE
    )
    rejuvenations = sum(
        1
        for e in events
        if e.kind is EventKind.SHUTDOWN and e.cause is ShutdownCause.REJUVENATION
    )
    return AvailabilityStats(
        uptime_fraction=up_time / total_time,
        loss_count=loss_count,
        loss_time=loss_time,
        failure_count=failures,
        rejuvenation_count=rejuvenations,
    )


@dataclass
class AbPair:
    seed: int
    availability_on: float
    availability_off: float
    losses_on: int
    losses_off: int
    failures_on: int
    failures_off: int
    rejuvenations: int


@dataclass
class AbReport:
    scenario_name: str
    duration: float
    pairs: list[AbPair]

    @property
    def mean_availability_on(self) -> float:
        return float(np.mean([p.availability_on for p in self.pairs]))

    @property
    def mean_availability_off(self) -> float:
        return float(np.mean([p.availability_off for p in self.pairs]))

    @property
    def loss_dominance(self) -> float:
        """Fraction of pairs where the policy did not increase loss count."""
        return float(
            np.mean([p.losses_on <= p.losses_off for p in self.pairs])
        )


def ab_compare(
    scenario: ScenarioConfig,
    seeds: list[int],
    duration: float | None = None,
    workers: int = 4,
) -> AbReport:
    """Paired on/off comparison of the rejuvenation policy over shared seeds."""
    if len(seeds) < 1:
        raise ScenarioRuntimeError("ab comparison needs at least one seed")

    def one_pair(seed: int) -> AbPair:
        on = Simulation(scenario, seed=seed, rejuvenation_enabled=True).run(duration)
        off = Simulation(scenario, seed=seed, rejuvenation_enabled=False).run(duration)
        return AbPair(
            seed=seed,
            availability_on=on.availability.uptime_fraction,
            availability_off=off.availability.uptime_fraction,
            losses_on=on.availability.loss_count,
            losses_off=off.availability.loss_count,
            failures_on=on.availability.failure_count,
            failures_off=off.availability.failure_count,
            rejuvenations=on.availability.rejuvenation_count,
        )

    if workers <= 1:
        pairs = [one_pair(seed) for seed in seeds]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            pairs = list(pool.map(one_pair, seeds))
    total = n_steps(scenario, duration) * scenario.delta
    return AbReport(scenario_name=scenario.name, duration=total, pairs=pairs)
