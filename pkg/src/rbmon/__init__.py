"""Reliability-based monitoring toolkit.

Hierarchical reliability model (block diagram over failure-race nets),
periodic runtime prognostics from diagnostics data, and a discrete-event
simulator of a 2oo3 software system with predictive rejuvenation.
"""

from .config import ScenarioConfig, WorkloadProfile, load_scenario
from .diagnostics import DiagnosticsEvent, DiagnosticsWindow, EventKind, ShutdownCause
from .frf import DEFAULT_SWS_PARAMS, SwsFrfParams, SwsHealthState
from .monitor import Monitor, MonitorConfig, MonitorSnapshot
from .prognostics import (
    Alarm,
    AlarmLedger,
    PredictionTuple,
    Priority,
    probability_of_failure,
    remaining_useful_life,
    residual_reliability_check,
)
from .rbd import KOfN, Leaf, ModeOfOperation, Parallel, Series, eval_curve, eval_point
from .relcurve import (
    ReliabilityCurve,
    TimeGrid,
    match_time,
    splice_conserve,
    splice_freeze,
    splice_restore,
)
from .scheduler import LoadForecast, RejuvenationPlan, Scheduler
from .simulator import AbReport, Simulation, SimulationTrace, ab_compare
from .stpn import (
    Deterministic,
    Erlang,
    Exponential,
    FailureRaceNet,
    Weibull,
    sample_failure_time,
    survival,
    transient_reliability,
)

__version__ = "0.1.0"
