"""Scenario configuration: a YAML key-value tree validated up front.

Every invariant of the domain types is checked here with a field-precise
message before anything runs; defaults reproduce the 2oo3 case study
(three diverse SwSs, 30-minute monitoring period, day-spaced prediction
horizons with the 1/e threshold).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .frf import DEFAULT_SWS_PARAMS, SwsFrfParams
from .prognostics import EOL_THRESHOLD, PredictionTuple, Priority, validate_tuples
from .scheduler import LoadForecast


class ConfigError(ValueError):
    """Invalid scenario configuration; message names the offending field."""


# Heavy-stress defaults: sized so degradation unfolds over hours, like a
# burst of sustained daytime traffic on an otherwise day/night profile.
HEAVY_STRESS_STIMULI = [
    2.0, 2.0, 2.0, 2.0, 3.0, 5.0,  # 00:00 .. 05:59
    8.0, 10.0, 12.0, 13.0, 14.0, 14.0,  # 06:00 .. 11:59
    14.0, 13.0, 12.0, 11.0, 10.0, 9.0,  # 12:00 .. 17:59
    7.0, 6.0, 5.0, 4.0, 3.0, 3.0,  # 18:00 .. 23:59
]
HEAVY_STRESS_CPU = [
    0.15, 0.12, 0.10, 0.10, 0.12, 0.25,
    0.45, 0.65, 0.80, 0.88, 0.90, 0.90,
    0.90, 0.88, 0.85, 0.80, 0.75, 0.65,
    0.55, 0.45, 0.35, 0.28, 0.22, 0.18,
]


@dataclass(frozen=True)
class WorkloadProfile:
    """Hour-of-day workload: stimuli arrival intensity and CPU load."""

    stimuli_per_hour: tuple[float, ...]
    cpu_load: tuple[float, ...]
    cpu_noise: float = 0.05

    def __post_init__(self) -> None:
        for name, values in (
            ("stimuli_per_hour", self.stimuli_per_hour),
            ("cpu_load", self.cpu_load),
        ):
            if len(values) != 24:
                raise ConfigError(
                    f"workload.{name}: expected 24 hourly values, got {len(values)}"
                )
        if any(v < 0 for v in self.stimuli_per_hour):
            raise ConfigError("workload.stimuli_per_hour: intensities must be >= 0")
        if any(not (0.0 <= v <= 1.0) for v in self.cpu_load):
            raise ConfigError("workload.cpu_load: loads must lie in [0, 1]")
        if self.cpu_noise < 0:
            raise ConfigError("workload.cpu_noise: must be >= 0")


def heavy_stress_workload() -> WorkloadProfile:
    return WorkloadProfile(
        stimuli_per_hour=tuple(HEAVY_STRESS_STIMULI),
        cpu_load=tuple(HEAVY_STRESS_CPU),
        cpu_noise=0.05,
    )


@dataclass(frozen=True)
class ScenarioConfig:
    name: str = "heavy-stress"
    duration_hours: float = 48.0
    delta: float = 0.5  # monitoring period, hours
    mtti_hours: float = 0.05  # 3 minutes
    mttr_hours: float = 40.0 / 60.0  # 40 minutes
    subsystems: dict[str, SwsFrfParams] = field(
        default_factory=lambda: dict(DEFAULT_SWS_PARAMS)
    )
    tuples: tuple[PredictionTuple, ...] = ()
    workload: WorkloadProfile = field(default_factory=heavy_stress_workload)
    night_window: tuple[float, float] = (0.0, 6.0)
    clock_start_hour: float = 6.0
    seed: int = 0
    base_fresh_horizon: float = 192.0
    max_fresh_horizon: float = 24576.0
    curve_record_stride: int = 1

    def __post_init__(self) -> None:
        if self.delta <= 0:
            raise ConfigError(f"delta: monitoring period must be > 0, got {self.delta}")
        if self.duration_hours < self.delta:
            raise ConfigError(
                f"duration_hours: must cover at least one period ({self.delta} h)"
            )
        if self.mtti_hours <= 0 or self.mttr_hours <= 0:
            raise ConfigError("mtti_hours/mttr_hours: must be > 0")
        if len(self.subsystems) != 3:
            raise ConfigError(
                f"subsystems: the 2oo3 system needs exactly 3, got {len(self.subsystems)}"
            )
        if "system" in self.subsystems:
            raise ConfigError("subsystems: the id 'system' is reserved")
        if not self.tuples:
            object.__setattr__(
                self,
                "tuples",
                _default_tuples(self.mtti_hours, self.mttr_hours),
            )
        try:
            validate_tuples(self.tuples, self.mtti_hours, self.mttr_hours)
        except ValueError as exc:
            raise ConfigError(f"prediction.tuples: {exc}") from None
        if not (0 <= self.clock_start_hour < 24):
            raise ConfigError(
                f"clock_start_hour: must be in [0, 24), got {self.clock_start_hour}"
            )
        lo, hi = self.night_window
        if not (0 <= lo < 24 and 0 <= hi <= 24):
            raise ConfigError(f"night_window: hours must be in [0, 24], got {self.night_window}")
        if self.base_fresh_horizon < self.delta * 2:
            raise ConfigError("base_fresh_horizon: too short for the grid")
        if self.max_fresh_horizon < self.base_fresh_horizon:
            raise ConfigError("max_fresh_horizon: must be >= base_fresh_horizon")
        if self.curve_record_stride < 1:
            raise ConfigError("curve_record_stride: must be >= 1")

    def subsystem_ids(self) -> tuple[str, ...]:
        return tuple(sorted(self.subsystems))

    def forecast(self) -> LoadForecast:
        return LoadForecast(hourly=self.workload.cpu_load)


def _default_tuples(mtti: float, mttr: float) -> tuple[PredictionTuple, ...]:
    priorities = [Priority.HIGH, Priority.MEDIUM, Priority.LOW]
    return tuple(
        PredictionTuple(delta_q=24.0 * (q + 1), u_q=EOL_THRESHOLD, priority=priorities[q])
        for q in range(3)
    )


def _require_number(raw: dict, key: str, path: str) -> float:
    value = raw[key]
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ConfigError(f"{path}.{key}: expected a number, got {value!r}")
    return float(value)


def _parse_subsystem(sws_id: str, raw: dict) -> SwsFrfParams:
    if not isinstance(raw, dict):
        raise ConfigError(f"subsystems.{sws_id}: expected a mapping of parameters")
    path = f"subsystems.{sws_id}"
    for key in ("alpha", "beta", "lambda1", "lambda2", "k0"):
        if key not in raw:
            raise ConfigError(f"{path}.{key}: missing required parameter")
    extra = set(raw) - {"alpha", "beta", "lambda1", "lambda2", "k0"}
    if extra:
        raise ConfigError(f"{path}: unknown parameters {sorted(extra)}")
    try:
        return SwsFrfParams(
            alpha=_require_number(raw, "alpha", path),
            beta=_require_number(raw, "beta", path),
            lambda1=_require_number(raw, "lambda1", path),
            lambda2=_require_number(raw, "lambda2", path),
            k0=int(raw["k0"]),
        )
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def _parse_tuple(index: int, raw: dict) -> PredictionTuple:
    path = f"prediction.tuples[{index}]"
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: expected a mapping")
    if "delta_hours" not in raw:
        raise ConfigError(f"{path}.delta_hours: missing")
    priority_name = str(raw.get("priority", "")).upper()
    if priority_name not in Priority.__members__:
        raise ConfigError(
            f"{path}.priority: expected one of low/medium/high, got {raw.get('priority')!r}"
        )
    try:
        return PredictionTuple(
            delta_q=_require_number(raw, "delta_hours", path),
            u_q=float(raw.get("u", EOL_THRESHOLD)),
            v_q=float(raw["v"]) if "v" in raw and raw["v"] is not None else None,
            priority=Priority[priority_name],
        )
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def load_scenario(path: str | Path) -> ScenarioConfig:
    """Parse and validate a scenario YAML file."""
    try:
        with open(path) as fh:
            raw = yaml.safe_load(fh)
    except FileNotFoundError:
        raise ConfigError(f"scenario file not found: {path}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"scenario file is not valid YAML: {exc}") from None
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError("scenario file must contain a mapping at the top level")
    return scenario_from_dict(raw)


def scenario_from_dict(raw: dict) -> ScenarioConfig:
    known = {
        "name", "duration_hours", "delta_hours", "mtti_hours", "mttr_hours",
        "subsystems", "prediction", "workload", "schedule", "seed",
        "base_fresh_horizon_hours", "max_fresh_horizon_hours", "curve_record_stride",
    }
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown top-level keys {sorted(unknown)}")

    kwargs: dict = {}
    if "name" in raw:
        kwargs["name"] = str(raw["name"])
    for src, dst in (
        ("duration_hours", "duration_hours"),
        ("delta_hours", "delta"),
        ("mtti_hours", "mtti_hours"),
        ("mttr_hours", "mttr_hours"),
        ("base_fresh_horizon_hours", "base_fresh_horizon"),
        ("max_fresh_horizon_hours", "max_fresh_horizon"),
    ):
        if src in raw:
            kwargs[dst] = _require_number(raw, src, "scenario")
    if "seed" in raw:
        kwargs["seed"] = int(raw["seed"])
    if "curve_record_stride" in raw:
        kwargs["curve_record_stride"] = int(raw["curve_record_stride"])

    if "subsystems" in raw:
        if not isinstance(raw["subsystems"], dict):
            raise ConfigError("subsystems: expected a mapping of id -> parameters")
        kwargs["subsystems"] = {
            str(sws): _parse_subsystem(str(sws), params)
            for sws, params in raw["subsystems"].items()
        }

    if "prediction" in raw:
        pred = raw["prediction"]
        if not isinstance(pred, dict) or set(pred) - {"tuples"}:
            raise ConfigError("prediction: expected a mapping with a 'tuples' list")
        tuples_raw = pred.get("tuples", [])
        if not isinstance(tuples_raw, list) or not tuples_raw:
            raise ConfigError("prediction.tuples: expected a non-empty list")
        kwargs["tuples"] = tuple(
            _parse_tuple(i, t) for i, t in enumerate(tuples_raw)
        )

    if "workload" in raw:
        wl = raw["workload"]
        if not isinstance(wl, dict):
            raise ConfigError("workload: expected a mapping")
        extra = set(wl) - {"stimuli_per_hour", "cpu_load", "cpu_noise"}
        if extra:
            raise ConfigError(f"workload: unknown keys {sorted(extra)}")
        base = heavy_stress_workload()
        kwargs["workload"] = WorkloadProfile(
            stimuli_per_hour=tuple(
                float(v) for v in wl.get("stimuli_per_hour", base.stimuli_per_hour)
            ),
            cpu_load=tuple(float(v) for v in wl.get("cpu_load", base.cpu_load)),
            cpu_noise=float(wl.get("cpu_noise", base.cpu_noise)),
        )

    if "schedule" in raw:
        sched = raw["schedule"]
        if not isinstance(sched, dict):
            raise ConfigError("schedule: expected a mapping")
        extra = set(sched) - {"night_window", "clock_start_hour"}
        if extra:
            raise ConfigError(f"schedule: unknown keys {sorted(extra)}")
        if "night_window" in sched:
            window = sched["night_window"]
            if not isinstance(window, list) or len(window) != 2:
                raise ConfigError("schedule.night_window: expected [start_hour, end_hour]")
            kwargs["night_window"] = (float(window[0]), float(window[1]))
        if "clock_start_hour" in sched:
            kwargs["clock_start_hour"] = float(sched["clock_start_hour"])

    return ScenarioConfig(**kwargs)


def n_steps(config: ScenarioConfig, duration: float | None = None) -> int:
    hours = config.duration_hours if duration is None else duration
    return int(math.floor(hours / config.delta + 1e-9))
